#include "vrsal/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace vrsal {

double pearson_cc(const SaliencyMap& a, const SaliencyMap& b) {
    if (a.dims() != b.dims())
        throw Error("pearson_cc: dimension mismatch (" + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()) + ")");
    const auto& da = a.grid().image().data;
    const auto& db = b.grid().image().data;
    const std::size_t n = da.size();
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += da[i];
        sb += db[i];
    }
    const double ma = sa / n, mb = sb / n;
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xa = da[i] - ma, xb = db[i] - mb;
        saa += xa * xa;
        sbb += xb * xb;
        sab += xa * xb;
    }
    if (saa <= 0 || sbb <= 0) throw Error("pearson_cc: undefined correlation (constant map)");
    return sab / std::sqrt(saa * sbb);
}

RocCurve congruency_roc(std::span<const Fixation> userFixations, const SaliencyMap& groundTruth,
                        std::span<const double> thresholds) {
    if (userFixations.empty()) throw Error("congruency_roc: empty fixation list");
    std::vector<double> th(thresholds.begin(), thresholds.end());
    if (th.empty()) {
        th.resize(100);
        for (int i = 0; i < 100; ++i) th[i] = i + 1.0;
    }
    for (double t : th)
        if (!(t > 0 && t <= 100)) throw Error("congruency_roc: thresholds must lie in (0, 100]");

    // Rank of each pixel under the shared (value desc, index asc) order; a
    // fixation is inside the top-n% mask iff its pixel rank < ceil(N*n/100).
    const auto order = saliency_rank_order(groundTruth);
    std::vector<int> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = int(i);

    const GridDims dims = groundTruth.dims();
    std::vector<int> fixRanks;
    fixRanks.reserve(userFixations.size());
    for (const Fixation& f : userFixations) {
        const PixelCoord p = dir_to_pixel(f.centroid, dims);
        fixRanks.push_back(rank[std::size_t(p.y) * dims.width + p.x]);
    }

    const double n = double(order.size());
    RocCurve out;
    out.thresholds = th;
    out.hitRates.resize(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) {
        const int k = int(std::ceil(n * th[i] / 100.0 - 1e-12));
        int hits = 0;
        for (int r : fixRanks)
            if (r < k) ++hits;
        out.hitRates[i] = double(hits) / double(fixRanks.size());
    }
    double sum = 0;
    for (double h : out.hitRates) sum += h;
    out.auc = sum / double(out.hitRates.size());
    return out;
}

std::optional<double> time_to_sr_sec(std::span<const Fixation> fixations, const SalientMask& mask) {
    const GridDims dims{mask.width, mask.height};
    for (const Fixation& f : fixations)
        if (mask.contains(dir_to_pixel(f.centroid, dims))) return f.tStartMs / 1000.0;
    return std::nullopt;
}

std::optional<double> perc_fix_inside(std::span<const Fixation> fixations, const SalientMask& mask) {
    if (fixations.empty()) return std::nullopt;
    const GridDims dims{mask.width, mask.height};
    std::size_t inside = 0;
    for (const Fixation& f : fixations)
        if (mask.contains(dir_to_pixel(f.centroid, dims))) ++inside;
    return double(inside) / double(fixations.size());
}

ConvergResult converg_time(const Trajectory& traj, const SaliencyMap& convergedMap,
                           const ConvergParams& p) {
    if (p.stepSec <= 0 || p.horizonSec <= 0) throw Error("converg_time: bad step/horizon");
    ConvergResult res;
    res.partial = traj.span_ms() < p.horizonSec * 1000.0;

    const auto fixations = detect_fixations(traj, p.fixation);
    const GridDims dims = convergedMap.dims();

    const int steps = int(std::lround(p.horizonSec / p.stepSec));
    for (int si = 0; si <= steps; ++si) {
        const double tMs = si * p.stepSec * 1000.0;
        std::vector<Fixation> upTo;
        for (const Fixation& f : fixations)
            if (f.tStartMs <= tMs) upTo.push_back(f);
        double cc = 0;
        if (!upTo.empty()) {
            const SaliencyMap userMap = spherical_blur(accumulate_fixations(upTo, dims), p.blurSigmaDeg);
            try {
                cc = pearson_cc(userMap, convergedMap);
            } catch (const Error&) {
                cc = 0;  // constant map at this step contributes zero
            }
        }
        res.ccOverTime.push_back(cc);
    }

    double area = 0;
    for (int si = 0; si < steps; ++si)
        area += 0.5 * (res.ccOverTime[si] + res.ccOverTime[si + 1]) * p.stepSec;
    res.auc = area / p.horizonSec;
    return res;
}

ExplorationCurve exploration_curve(std::span<const Trajectory> trajectories, double binDeg) {
    if (trajectories.empty()) throw Error("exploration_curve: needs at least one trajectory");
    if (binDeg <= 0 || binDeg > 180) throw Error("exploration_curve: bad bin size");

    const int nBins = int(std::floor(180.0 / binDeg)) + 1;
    ExplorationCurve out;
    out.offsetsDeg.resize(nBins);
    for (int k = 0; k < nBins; ++k) out.offsetsDeg[k] = k * binDeg;
    std::vector<double> sums(nBins, 0.0);
    out.counts.assign(nBins, 0);

    for (const Trajectory& traj : trajectories) {
        double reached = -1;  // running max offset
        std::size_t nextBin = 0;
        for (const Sample& s : traj.samples) {
            const double off = std::fabs(lon_diff(s.gazeLonDeg, traj.startLonDeg));
            if (off > reached) {
                reached = off;
                while (nextBin < std::size_t(nBins) && out.offsetsDeg[nextBin] <= reached) {
                    sums[nextBin] += s.tMs / 1000.0;
                    out.counts[nextBin] += 1;
                    ++nextBin;
                }
            }
        }
    }

    out.rawMeanTimeSec.assign(nBins, std::nan(""));
    for (int k = 0; k < nBins; ++k)
        if (out.counts[k] > 0) out.rawMeanTimeSec[k] = sums[k] / out.counts[k];

    // Isotonic cleanup (pool adjacent violators) over the reached prefix.
    out.meanTimeSec = out.rawMeanTimeSec;
    int defined = 0;
    while (defined < nBins && out.counts[defined] > 0) ++defined;
    std::vector<double> level;
    std::vector<int> size;
    for (int k = 0; k < defined; ++k) {
        double v = out.rawMeanTimeSec[k];
        int s = 1;
        if (k > 0 && v < out.rawMeanTimeSec[k - 1]) ++out.rawViolations;
        while (!level.empty() && level.back() > v) {
            v = (level.back() * size.back() + v * s) / (size.back() + s);
            s += size.back();
            level.pop_back();
            size.pop_back();
        }
        level.push_back(v);
        size.push_back(s);
    }
    int pos = 0;
    for (std::size_t g = 0; g < level.size(); ++g)
        for (int r = 0; r < size[g]; ++r) out.meanTimeSec[pos++] = level[g];
    return out;
}

double exploration_offset_at(const ExplorationCurve& curve, double tSec) {
    if (tSec < 0) throw Error("exploration_offset_at: negative time");
    double prevT = 0, prevOff = 0;
    bool any = false;
    for (std::size_t k = 0; k < curve.offsetsDeg.size(); ++k) {
        if (curve.counts.empty() || k >= curve.counts.size() || curve.counts[k] <= 0) break;
        const double t = curve.meanTimeSec[k];
        const double off = curve.offsetsDeg[k];
        if (tSec <= t) {
            if (!any && t <= 0) return off;
            if (t <= prevT) return off;
            return prevOff + (off - prevOff) * (tSec - prevT) / (t - prevT);
        }
        prevT = t;
        prevOff = off;
        any = true;
    }
    // beyond the measured curve: everything reached
    return any ? 180.0 : 0.0;
}

}  // namespace vrsal
