"""Saliency analysis for full-sphere panoramas.

Thin package wrapper around the compiled `_vrsal` extension; see the
repository README for the coordinate and file-format conventions.
"""
try:
    from ._vrsal import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _vrsal import *  # noqa: F401,F403  (development tree: module on PYTHONPATH)
