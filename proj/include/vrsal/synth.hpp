// Ground-truth-known synthetic trajectories and panoramas; the oracle supply
// for the test suite.
#pragma once

#include "vrsal/salmap.hpp"
#include "vrsal/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace vrsal {

// Portable PRNG: xoshiro256++ seeded via splitmix64, uniform doubles from the
// top 53 bits, normals via Box-Muller, Laplace via inverse CDF. Identical
// streams for identical seeds on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed);
    uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);
    double normal(double mean = 0, double stddev = 1);
    double laplace(double mu, double beta);

private:
    uint64_t s_[4];
    std::optional<double> cachedNormal_;
};

struct PlannedFixation {
    SphericalDir target;
    double durationMs = 300;
    std::optional<double> startMs;  // default: right after the travel from the previous target
};

struct SynthSpec {
    uint64_t seed = 1;
    std::vector<PlannedFixation> plan;
    double saccadeSpeedDegPerSec = 300;
    double sampleRateHz = 120;
    double vorCompensation = 1.0;  // fraction of head wobble cancelled by the eyes, [0, 1]
    double headLagMs = 60;
    double headWobbleDeg = 0;      // longitudinal head oscillation amplitude
    double headWobbleHz = 0.5;
    double gazeJitterDeg = 0;
    double startLonDeg = 0;
    Condition condition = Condition::VR;
    std::string sceneId = "synthetic";
    std::string userId = "synthetic";
};

struct SynthTruth {
    std::vector<Fixation> fixations;  // the planted dwells
    double headLagMs = 0;
    double vorSlope = 0;              // -vorCompensation
};

struct SynthTrajectory {
    Trajectory trajectory;
    SynthTruth truth;
};

// Deterministic for a given seed; annotations hold by construction.
// Throws on an infeasible plan (explicit start times that overlap).
SynthTrajectory gen_trajectory(const SynthSpec& spec);

struct BlobSpec {
    SphericalDir center;
    double sigmaDeg = 5;
    double mass = 1;
};

struct SynthPanorama {
    EquirectGrid pano;     // grayscale rendering, max value 1 (all-zero if no blobs)
    SaliencyMap saliency;  // the exact blob mixture (sum-one, or all-zero raw counts)
};

// Spherical Gaussian blobs exp(-theta^2 / 2 sigma^2) rendered on the grid.
SynthPanorama gen_panorama(std::span<const BlobSpec> blobs, const GridDims& dims);

// JSON spec files for the CLI (see README for the schema).
SynthSpec load_synth_spec(const std::string& path);
std::vector<BlobSpec> load_blob_spec(const std::string& path);

}  // namespace vrsal
