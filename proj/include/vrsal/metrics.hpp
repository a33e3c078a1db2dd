// Evaluation machinery: Pearson CC between maps, inter-observer congruency
// ROC, behavioral metrics, saliency convergence, and exploration timing.
#pragma once

#include "vrsal/salmap.hpp"

#include <optional>
#include <span>
#include <vector>

namespace vrsal {

// Pearson correlation over pixels. Throws if either map is constant.
double pearson_cc(const SaliencyMap& a, const SaliencyMap& b);

struct RocCurve {
    std::vector<double> thresholds;  // top-% values in (0, 100]
    std::vector<double> hitRates;    // non-decreasing, hitRate(100) == 1
    double auc = 0;                  // mean hit rate over thresholds, in [0, 1]
};

// Per threshold n, the fraction of the user's fixation centroids that land in
// the top-n% mask of the leave-one-out ground truth. Empty thresholds selects
// the default 1..100% in 1% steps.
RocCurve congruency_roc(std::span<const Fixation> userFixations, const SaliencyMap& groundTruth,
                        std::span<const double> thresholds = {});

// tStart (seconds) of the first fixation inside the mask; nullopt = never hit.
std::optional<double> time_to_sr_sec(std::span<const Fixation> fixations, const SalientMask& mask);

// Centroid-in-mask fraction; nullopt on an empty fixation list.
std::optional<double> perc_fix_inside(std::span<const Fixation> fixations, const SalientMask& mask);

inline std::size_t n_fix(std::span<const Fixation> fixations) { return fixations.size(); }

struct ConvergParams {
    double stepSec = 1;
    double horizonSec = 30;
    double blurSigmaDeg = 1.0;
    FixationParams fixation{};
};

struct ConvergResult {
    double auc = 0;               // trapezoidal area of CC(t) over [0, horizon] / horizon
    bool partial = false;         // trajectory shorter than the horizon
    std::vector<double> ccOverTime;  // samples at t = 0, step, ..., horizon
};

// CC between the user's progressively accumulated (blurred) fixation map and
// the converged reference; empty or constant user maps contribute CC = 0.
ConvergResult converg_time(const Trajectory& traj, const SaliencyMap& convergedMap,
                           const ConvergParams& p = {});

struct ExplorationCurve {
    std::vector<double> offsetsDeg;      // 0..180 in fixed bins
    std::vector<double> meanTimeSec;     // isotonic-cleaned; NaN where no trajectory reached
    std::vector<double> rawMeanTimeSec;  // before the isotonic cleanup
    std::vector<int> counts;             // trajectories that reached each bin
    int rawViolations = 0;               // adjacent decreases removed by the cleanup
};

// Mean first time at which the gaze's longitudinal offset from the start
// exceeds each bin value. Bins no trajectory reached are excluded (count 0).
ExplorationCurve exploration_curve(std::span<const Trajectory> trajectories, double binDeg = 5);

// Piecewise-linear inverse of the curve: the longitudinal offset uncovered by
// time tSec (180 once the curve is exhausted).
double exploration_offset_at(const ExplorationCurve& curve, double tSec);

}  // namespace vrsal
