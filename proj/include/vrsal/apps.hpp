// Saliency-driven applications: cut alignment, panorama thumbnails, video
// synopsis paths, and saliency-aware compression.
#pragma once

#include "vrsal/predict.hpp"

#include <span>
#include <vector>

namespace vrsal {

struct CutAlignment {
    double shiftDeg = 0;    // in [-180, 180); ties broken toward the smallest |shift|
    double ccAtShift = 0;
    std::vector<double> shiftsDeg;  // full correlation-vs-shift curve
    std::vector<double> ccCurve;
};

// Longitudinal shift of the pre-cut map that maximizes Pearson CC with the
// post-cut map, evaluated for every integer-column circular shift (per-row FFT
// cross-correlation). align_cut(A, rotate(A, +d)) recovers +d.
CutAlignment align_cut(const SaliencyMap& salBefore, const SaliencyMap& salAfter);

struct ThumbnailParams {
    double fovDeg = 60;
    double weightSigmaFrac = 0.25;  // Gaussian sigma as a fraction of the patch side
    double gridStepDeg = 2;         // candidate spacing in lon and lat
    int searchRes = 32;             // patch sampling resolution during the search
    int renderRes = 512;            // resolution of the returned pano patch
    bool refine = false;            // extra pass at gridStep/4 around the best cell
};

struct ThumbnailResult {
    GnomonicWindow window;
    Image patch;   // rendered from the panorama at renderRes
    double score;
};

// Grid search for the gnomonic window with the highest Gaussian-weighted
// integrated saliency. Ties break toward the equator, then the smallest lon.
ThumbnailResult thumbnail(const SaliencyMap& sal, const EquirectGrid& pano,
                          const ThumbnailParams& p = {});

struct ViewportPath {
    std::vector<GnomonicWindow> keyframes;
    std::vector<int> frameIndices;
    int strideN = 1;
    double neighborhoodDeg = 0;
};

// First keyframe via the global thumbnail search; each subsequent keyframe
// (every strideN frames) searches only centers within neighborhoodDeg of the
// previous window center.
ViewportPath synopsis(std::span<const SaliencyMap> frameSaliency, int strideN,
                      double neighborhoodDeg, const ThumbnailParams& p = {});

struct CompressParams {
    int downFactor = 6;      // per-dimension cube-face downsampling
    double topPercent = 10;  // retained high-resolution fraction
    double featherDeg = 1;   // blend feather inside the mask boundary
    int faceRes = 0;         // 0 = width / 4
};

struct CompressResult {
    EquirectGrid image;
    Image blendWeights;          // 1 = high-res source, 0 = down/up path
    EquirectGrid lowResPath;     // the full down/up reconstruction
    std::size_t lowResPixels = 0;
    std::size_t retainedPixels = 0;
    double retentionRatio = 0;   // lowRes / cube pixels + retained / equirect pixels
};

// Cube-map bicubic down/up by downFactor, blended with the top-percent salient
// regions of the original. Pixels beyond the feather keep the exact source
// (inside the mask) or the exact down/up value (outside it).
CompressResult compress(const EquirectGrid& pano, const SaliencyMap& sal,
                        const CompressParams& p = {});

}  // namespace vrsal
