// On-disk artifact bundles: saliency maps (PFM + preview PNG + JSON sidecar)
// and report writing shared by the CLI.
#pragma once

#include "vrsal/salmap.hpp"

#include <json.hpp>

#include <string>

namespace vrsal {

using json = nlohmann::ordered_json;

// Writes <base>.pfm (float data), <base>.png (max-one 8-bit preview), and
// <base>.json (normalization, resolution, source + extra metadata).
void save_saliency_map(const std::string& basePath, const SaliencyMap& m,
                       const json& extraMeta = json::object());

// Loads <base>.pfm plus its sidecar; a bare .pfm/.png path (no sidecar) is
// accepted and tagged raw-counts.
SaliencyMap load_saliency_map(const std::string& path);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

// Human-readable key/value report next to the JSON one.
void write_text_report(const std::string& path, const json& j);

}  // namespace vrsal
