// Lifting planar saliency predictors to the sphere (equirect / cube map /
// blended gnomonic patches), time-dependent prediction, and head-only saliency.
#pragma once

#include "vrsal/bias.hpp"
#include "vrsal/metrics.hpp"
#include "vrsal/salmap.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace vrsal {

// Opaque planar predictor contract: planar patch in, same-size non-negative
// saliency out. Output dimensions are validated on every call.
struct PlanarPredictor {
    std::string name;
    std::string version;
    std::function<Image(const Image&)> run;
};

// Built-in classical spectral-residual predictor (log-amplitude residual of
// the Fourier spectrum at a 64x64 working size, squared magnitude smoothed and
// upsampled back). Deterministic; invariant to global intensity scaling.
// Throws for patches smaller than 16x16.
Image spectral_residual(const Image& patch);
PlanarPredictor baseline_predictor();

enum class StrategyKind { Equirect, Cubemap, Patch };
std::string strategy_name(StrategyKind k);
StrategyKind parse_strategy(const std::string& name);

struct ProjectionStrategy {
    StrategyKind kind = StrategyKind::Equirect;
    int faceRes = 256;        // cubemap
    double fovDeg = 90;       // patch
    double overlapDeg = 30;   // patch
    int patchRes = 64;        // patch sampling resolution fed to the predictor
};

// Raised-cosine blend profile for patch stitching: 1 inside the window core,
// falling to 0 across the overlap band at the window edge. Returns 0 for
// directions outside the window.
double patch_blend_weight(const GnomonicWindow& w, double overlapDeg, const Vec3& dir);

// Run a planar predictor over the chosen projection of the panorama and lift
// the result back to a sum-one equirect saliency map. Patch results are
// blended with a partition-of-unity weighting; the optional bias is applied
// last.
SaliencyMap predict(const EquirectGrid& pano, const PlanarPredictor& predictor,
                    const ProjectionStrategy& strategy,
                    const std::optional<EquatorBias>& bias = std::nullopt);

// Reproject an externally computed planar map onto the canonical grid.
SaliencyMap import_saliency_equirect(const Image& map, const GridDims& canonical);
SaliencyMap import_saliency_cubemap(const CubeMap& faces, const GridDims& canonical);

// Active-window model: a longitudinal window centered at the starting point
// grows with the inverse exploration curve, uncovering the converged map.
SaliencyMap time_dependent(const SaliencyMap& converged, double startLonDeg, double tSec,
                           const ExplorationCurve& curve, double initHalfWidthDeg = 47.5);

struct HeadSaliencyParams {
    double speedThreshDegPerSec = 19.6;
    double blurSigmaDeg = 11.7;
    bool excludeStartVicinity = true;  // mirror the fixation-map start filter
    double vicinityDeg = 20;
};

// Counts head-direction samples whose longitudinal head speed stays below the
// threshold, then blurs; no gaze data is used. Throws when nothing qualifies.
SaliencyMap head_saliency(std::span<const Trajectory> trajectories, const GridDims& dims,
                          const HeadSaliencyParams& p = {});

// --- external predictor exchange -------------------------------------------------
// A manifest lists projection units (full equirect, faces, or patches) with
// their rendered input image paths and the planar saliency paths an external
// predictor must fill in; stitching verifies completeness first.

struct PredictionUnits {
    std::string manifestPath;
    int unitCount = 0;
};
PredictionUnits write_prediction_units(const EquirectGrid& pano, const ProjectionStrategy& strategy,
                                       const std::string& outDir);
SaliencyMap stitch_prediction_units(const std::string& manifestPath,
                                    const std::optional<EquatorBias>& bias = std::nullopt);

}  // namespace vrsal
