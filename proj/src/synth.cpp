#include "vrsal/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace vrsal {

// --- portable RNG (xoshiro256++, splitmix64 seeding) ---------------------------

namespace {

uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

uint64_t Rng::next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double mean, double stddev) {
    if (cachedNormal_) {
        const double z = *cachedNormal_;
        cachedNormal_.reset();
        return mean + stddev * z;
    }
    double u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cachedNormal_ = r * std::sin(2.0 * kPi * u2);
    return mean + stddev * r * std::cos(2.0 * kPi * u2);
}

double Rng::laplace(double mu, double beta) {
    const double u = uniform() - 0.5;
    return mu - beta * std::copysign(1.0, u) * std::log(1.0 - 2.0 * std::fabs(u));
}

// --- trajectory generator -------------------------------------------------------

namespace {

// Great-circle interpolation between two directions.
SphericalDir slerp_dir(const SphericalDir& a, const SphericalDir& b, double t) {
    const Vec3 va = to_unit(a), vb = to_unit(b);
    const double ang = deg2rad(angular_distance(va, vb));
    if (ang < 1e-12) return a;
    const double sa = std::sin((1.0 - t) * ang) / std::sin(ang);
    const double sb = std::sin(t * ang) / std::sin(ang);
    return to_spherical(va * sa + vb * sb);
}

struct Segment {
    double startMs, endMs;
    bool dwell;
    std::size_t planIdx;      // dwell: which planned fixation
    SphericalDir from, to;    // saccade endpoints
};

}  // namespace

SynthTrajectory gen_trajectory(const SynthSpec& spec) {
    if (spec.plan.empty()) throw Error("gen_trajectory: empty fixation plan");
    if (spec.sampleRateHz <= 0 || spec.saccadeSpeedDegPerSec <= 0)
        throw Error("gen_trajectory: rates must be positive");
    if (spec.vorCompensation < 0 || spec.vorCompensation > 1)
        throw Error("gen_trajectory: vorCompensation must lie in [0, 1]");
    for (const auto& pf : spec.plan)
        if (pf.durationMs <= 0) throw Error("gen_trajectory: durations must be positive");

    // Resolve the dwell timeline; explicit start times must leave room for the
    // travel from the previous target.
    std::vector<Segment> segments;
    double cursor = 0;
    SphericalDir prev = spec.plan.front().target;
    for (std::size_t k = 0; k < spec.plan.size(); ++k) {
        const auto& pf = spec.plan[k];
        const double travelMs =
            (k == 0) ? 0 : angular_distance(prev, pf.target) / spec.saccadeSpeedDegPerSec * 1000.0;
        double start = cursor + travelMs;
        if (pf.startMs) {
            if (*pf.startMs < start - 1e-9)
                throw Error("gen_trajectory: infeasible plan, dwell " + std::to_string(k) +
                            " starts at " + std::to_string(*pf.startMs) + " ms but the previous dwell+travel ends at " +
                            std::to_string(start) + " ms");
            start = *pf.startMs;
        }
        if (k > 0) segments.push_back({cursor, start, false, k, prev, pf.target});
        segments.push_back({start, start + pf.durationMs, true, k, pf.target, pf.target});
        cursor = start + pf.durationMs;
        prev = pf.target;
    }
    const double totalMs = cursor;

    Rng rng(spec.seed);
    const double dtMs = 1000.0 / spec.sampleRateHz;

    auto ideal_gaze = [&](double tMs) -> SphericalDir {
        for (const Segment& seg : segments) {
            if (tMs < seg.endMs || &seg == &segments.back()) {
                if (seg.dwell || seg.endMs <= seg.startMs) return seg.to;
                if (tMs <= seg.startMs) return seg.from;
                const double t = std::clamp((tMs - seg.startMs) / (seg.endMs - seg.startMs), 0.0, 1.0);
                return slerp_dir(seg.from, seg.to, t);
            }
        }
        return segments.back().to;
    };
    auto dwell_at = [&](double tMs) -> const Segment* {
        for (const Segment& seg : segments)
            if (seg.dwell && tMs >= seg.startMs && tMs < seg.endMs) return &seg;
        return nullptr;
    };
    auto wobble = [&](double tMs) {
        return spec.headWobbleDeg * std::sin(2.0 * kPi * spec.headWobbleHz * tMs / 1000.0);
    };

    SynthTrajectory out;
    Trajectory& traj = out.trajectory;
    traj.condition = spec.condition;
    traj.sceneId = spec.sceneId;
    traj.userId = spec.userId;
    traj.startLonDeg = wrap_lon(spec.startLonDeg);
    traj.sampleRateHz = spec.sampleRateHz;

    for (double tMs = 0; tMs <= totalMs + 1e-9; tMs += dtMs) {
        Sample s;
        s.tMs = tMs;

        const SphericalDir g0 = ideal_gaze(tMs);
        double gazeLon = g0.lon;
        double gazeLat = g0.lat;

        // Head trails the ideal gaze and carries the longitudinal wobble.
        const SphericalDir h0 = ideal_gaze(std::max(0.0, tMs - spec.headLagMs));
        s.headLonDeg = wrap_lon(h0.lon + wobble(tMs));
        s.headLatDeg = h0.lat;
        s.headRollDeg = 0;

        // During a dwell the eyes cancel a vorCompensation fraction of the
        // head wobble; the rest leaks into the world gaze.
        if (dwell_at(tMs)) gazeLon = wrap_lon(gazeLon + (1.0 - spec.vorCompensation) * wobble(tMs));

        if (spec.gazeJitterDeg > 0) {
            gazeLat = std::clamp(gazeLat + rng.normal(0, spec.gazeJitterDeg), -90.0, 90.0);
            const double cosLat = std::max(0.05, std::cos(deg2rad(gazeLat)));
            gazeLon = wrap_lon(gazeLon + rng.normal(0, spec.gazeJitterDeg) / cosLat);
        }
        s.gazeLonDeg = gazeLon;
        s.gazeLatDeg = gazeLat;
        traj.samples.push_back(s);
    }
    if (traj.samples.size() < 2) throw Error("gen_trajectory: plan too short for the sample rate");

    for (const Segment& seg : segments)
        if (seg.dwell)
            out.truth.fixations.push_back(
                {seg.startMs, seg.endMs - seg.startMs, spec.plan[seg.planIdx].target});
    out.truth.headLagMs = spec.headLagMs;
    out.truth.vorSlope = -spec.vorCompensation;
    return out;
}

SynthPanorama gen_panorama(std::span<const BlobSpec> blobs, const GridDims& dims) {
    for (const auto& b : blobs)
        if (b.sigmaDeg <= 0) throw Error("gen_panorama: blob sigma must be positive");

    std::vector<Vec3> centers;
    centers.reserve(blobs.size());
    for (const auto& b : blobs) centers.push_back(to_unit(b.center));

    Image sal(dims.width, dims.height, 1);
    double maxV = 0;
    for (int y = 0; y < dims.height; ++y)
        for (int x = 0; x < dims.width; ++x) {
            const Vec3 v = to_unit(pixel_to_dir({x, y}, dims));
            double s = 0;
            for (std::size_t k = 0; k < blobs.size(); ++k) {
                const double theta = angular_distance(v, centers[k]);
                s += blobs[k].mass * std::exp(-theta * theta / (2.0 * blobs[k].sigmaDeg * blobs[k].sigmaDeg));
            }
            sal.at(x, y) = float(s);
            maxV = std::max(maxV, s);
        }

    SynthPanorama out;
    Image pano = sal;
    if (maxV > 0)
        for (float& v : pano.data) v = float(v / maxV);
    out.pano = EquirectGrid(std::move(pano));

    const double total = sal.sum();
    if (total > 0) {
        for (float& v : sal.data) v = float(v / total);
        out.saliency = SaliencyMap(EquirectGrid(std::move(sal)), Normalization::SumOne);
    } else {
        out.saliency = SaliencyMap(EquirectGrid(std::move(sal)), Normalization::RawCounts);
    }
    return out;
}

// --- JSON spec files --------------------------------------------------------------

namespace {

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open spec file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace

SynthSpec load_synth_spec(const std::string& path) {
    const auto j = load_json_file(path);
    SynthSpec spec;
    static const std::vector<std::string> known = {
        "seed", "plan", "saccade_speed_deg_per_sec", "sample_rate_hz", "vor_compensation",
        "head_lag_ms", "head_wobble_deg", "head_wobble_hz", "gaze_jitter_deg", "start_lon",
        "condition", "scene", "user"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error("synth spec " + path + ": unknown key '" + key + "'");
    }
    spec.seed = j.value("seed", uint64_t(1));
    spec.saccadeSpeedDegPerSec = j.value("saccade_speed_deg_per_sec", 300.0);
    spec.sampleRateHz = j.value("sample_rate_hz", 120.0);
    spec.vorCompensation = j.value("vor_compensation", 1.0);
    spec.headLagMs = j.value("head_lag_ms", 60.0);
    spec.headWobbleDeg = j.value("head_wobble_deg", 0.0);
    spec.headWobbleHz = j.value("head_wobble_hz", 0.5);
    spec.gazeJitterDeg = j.value("gaze_jitter_deg", 0.0);
    spec.startLonDeg = j.value("start_lon", 0.0);
    spec.condition = parse_condition(j.value("condition", std::string("VR")));
    spec.sceneId = j.value("scene", std::string("synthetic"));
    spec.userId = j.value("user", std::string("synthetic"));
    if (!j.contains("plan")) throw Error("synth spec " + path + ": missing 'plan'");
    for (const auto& p : j.at("plan")) {
        PlannedFixation pf;
        pf.target = SphericalDir(p.at("lat").get<double>(), p.at("lon").get<double>());
        pf.durationMs = p.at("duration_ms").get<double>();
        if (p.contains("start_ms")) pf.startMs = p.at("start_ms").get<double>();
        spec.plan.push_back(pf);
    }
    return spec;
}

std::vector<BlobSpec> load_blob_spec(const std::string& path) {
    const auto j = load_json_file(path);
    if (!j.contains("blobs")) throw Error("blob spec " + path + ": missing 'blobs'");
    std::vector<BlobSpec> blobs;
    for (const auto& b : j.at("blobs")) {
        BlobSpec spec;
        spec.center = SphericalDir(b.at("lat").get<double>(), b.at("lon").get<double>());
        spec.sigmaDeg = b.value("sigma_deg", 5.0);
        spec.mass = b.value("mass", 1.0);
        blobs.push_back(spec);
    }
    return blobs;
}

}  // namespace vrsal
