#include "vrsal/apps.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numeric>

namespace vrsal {

// --- cut alignment ----------------------------------------------------------------

namespace {

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

// Sum over rows of circular row cross-correlations: S(k) = sum_xy a(x-k,y) b(x,y),
// computed with per-row real FFTs.
std::vector<double> column_cross_correlation(const Image& a, const Image& b) {
    const int W = a.width, H = a.height;
    const int spec = W / 2 + 1;
    std::vector<double> row(W);
    std::vector<std::complex<double>> fa(spec), fb(spec), acc(spec, {0, 0});

    fftw_plan fwd, inv;
    std::vector<double> in(W), outRow(W);
    std::vector<std::complex<double>> outSpec(spec);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fwd = fftw_plan_dft_r2c_1d(W, in.data(), reinterpret_cast<fftw_complex*>(outSpec.data()),
                                   FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(W, reinterpret_cast<fftw_complex*>(acc.data()), outRow.data(),
                                   FFTW_ESTIMATE);
    }
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) in[x] = a.at(x, y);
        fftw_execute_dft_r2c(fwd, in.data(), reinterpret_cast<fftw_complex*>(fa.data()));
        for (int x = 0; x < W; ++x) in[x] = b.at(x, y);
        fftw_execute_dft_r2c(fwd, in.data(), reinterpret_cast<fftw_complex*>(fb.data()));
        // S_y(k) = sum_x a(x, y) b(x + k, y) -> conj(FA) * FB
        for (int i = 0; i < spec; ++i) acc[i] += std::conj(fa[i]) * fb[i];
    }
    fftw_execute_dft_c2r(inv, reinterpret_cast<fftw_complex*>(acc.data()), outRow.data());
    std::vector<double> s(W);
    for (int k = 0; k < W; ++k) s[k] = outRow[k] / W;  // FFTW c2r is unnormalized
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    return s;
}

}  // namespace

CutAlignment align_cut(const SaliencyMap& salBefore, const SaliencyMap& salAfter) {
    if (salBefore.dims() != salAfter.dims()) throw Error("align_cut: dimension mismatch");
    const Image& a = salBefore.grid().image();
    const Image& b = salAfter.grid().image();
    const int W = a.width;
    const std::size_t n = a.data.size();

    double sa = 0, sb = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += a.data[i];
        sb += b.data[i];
        saa += double(a.data[i]) * a.data[i];
        sbb += double(b.data[i]) * b.data[i];
    }
    const double varA = saa - sa * sa / double(n);
    const double varB = sbb - sb * sb / double(n);
    if (varA <= 0 || varB <= 0) throw Error("align_cut: constant map");

    // S(k) = sum a(x-k) b(x): CC of "salBefore rotated k columns toward +lon" vs salAfter.
    // S(k) = sum_x a(x) b(x+k), so feed (a, b) into the FFT cross-correlation.
    const auto s = column_cross_correlation(a, b);

    CutAlignment out;
    out.shiftsDeg.resize(W);
    out.ccCurve.resize(W);
    for (int k = 0; k < W; ++k) {
        const double cc = (s[k] - sa * sb / double(n)) / std::sqrt(varA * varB);
        const double deg = wrap_lon(k * 360.0 / W);
        out.shiftsDeg[k] = deg;
        out.ccCurve[k] = cc;
    }

    // Argmax with ties broken toward the smallest |shift| (positive first).
    int bestK = 0;
    double bestCC = -std::numeric_limits<double>::infinity();
    std::vector<int> order(W);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const double ai = std::fabs(out.shiftsDeg[i]), aj = std::fabs(out.shiftsDeg[j]);
        if (ai != aj) return ai < aj;
        return out.shiftsDeg[i] > out.shiftsDeg[j];
    });
    for (int k : order)
        if (out.ccCurve[k] > bestCC) {
            bestCC = out.ccCurve[k];
            bestK = k;
        }
    out.shiftDeg = out.shiftsDeg[bestK];
    out.ccAtShift = bestCC;
    return out;
}

// --- thumbnails -------------------------------------------------------------------

namespace {

// Gaussian-weighted saliency integral over the window's gnomonic patch.
double window_score(const SaliencyMap& sal, const GnomonicWindow& w, double weightSigmaFrac) {
    const int res = w.resolution;
    const TangentFrame fr = tangent_frame(w.center);
    const double tx = std::tan(deg2rad(w.fovLonDeg / 2));
    const double ty = std::tan(deg2rad(w.fovLatDeg / 2));
    const double sigma = weightSigmaFrac * res;
    const double c = (res - 1) / 2.0;
    double score = 0;
    for (int j = 0; j < res; ++j) {
        const double v = 1.0 - 2.0 * (j + 0.5) / res;
        for (int i = 0; i < res; ++i) {
            const double u = 2.0 * (i + 0.5) / res - 1.0;
            const Vec3 ray = normalized(fr.forward + fr.right * (u * tx) + fr.up * (v * ty));
            const double g = std::exp(-((i - c) * (i - c) + (j - c) * (j - c)) / (2 * sigma * sigma));
            score += g * sal.grid().sample(to_spherical(ray));
        }
    }
    return score;
}

struct Candidate {
    double lat, lon;
};

// Candidate order implements the tie-break: toward the equator, then the
// smallest longitude (strictly-greater argmax keeps the first seen).
std::vector<Candidate> candidate_grid(double stepDeg) {
    std::vector<double> lats;
    lats.push_back(0);
    for (double l = stepDeg; l <= 90.0 + 1e-9; l += stepDeg) {
        lats.push_back(-std::min(l, 90.0));
        lats.push_back(std::min(l, 90.0));
    }
    std::vector<Candidate> cands;
    for (double lat : lats)
        for (double lon = -180.0 + stepDeg / 2; lon < 180.0; lon += stepDeg)
            cands.push_back({lat, lon});
    return cands;
}

ThumbnailResult search_windows(const SaliencyMap& sal, const EquirectGrid& pano,
                               const ThumbnailParams& p, const std::vector<Candidate>& cands) {
    double bestScore = -1;
    Candidate best{0, 0};
    for (const Candidate& c : cands) {
        const GnomonicWindow w{SphericalDir(c.lat, c.lon), p.fovDeg, p.fovDeg, p.searchRes};
        const double s = window_score(sal, w, p.weightSigmaFrac);
        if (s > bestScore) {
            bestScore = s;
            best = c;
        }
    }
    if (p.refine) {
        const double fine = p.gridStepDeg / 4;
        std::vector<Candidate> refined;
        for (double dl = -p.gridStepDeg; dl <= p.gridStepDeg + 1e-9; dl += fine)
            for (double dn = -p.gridStepDeg; dn <= p.gridStepDeg + 1e-9; dn += fine) {
                const double lat = std::clamp(best.lat + dl, -90.0, 90.0);
                refined.push_back({lat, wrap_lon(best.lon + dn)});
            }
        std::stable_sort(refined.begin(), refined.end(), [](const Candidate& a, const Candidate& b) {
            if (std::fabs(a.lat) != std::fabs(b.lat)) return std::fabs(a.lat) < std::fabs(b.lat);
            if (a.lat != b.lat) return a.lat < b.lat;
            return a.lon < b.lon;
        });
        for (const Candidate& c : refined) {
            const GnomonicWindow w{SphericalDir(c.lat, c.lon), p.fovDeg, p.fovDeg, p.searchRes};
            const double s = window_score(sal, w, p.weightSigmaFrac);
            if (s > bestScore) {
                bestScore = s;
                best = c;
            }
        }
    }
    ThumbnailResult out;
    out.window = {SphericalDir(best.lat, best.lon), p.fovDeg, p.fovDeg, p.renderRes};
    out.patch = gnomonic_sample(pano, out.window).image;
    out.score = bestScore;
    return out;
}

}  // namespace

ThumbnailResult thumbnail(const SaliencyMap& sal, const EquirectGrid& pano,
                          const ThumbnailParams& p) {
    if (!(p.fovDeg > 0 && p.fovDeg < 180)) throw Error("thumbnail: fov must lie in (0, 180)");
    if (p.gridStepDeg <= 0) throw Error("thumbnail: grid step must be positive");
    if (sal.dims() != pano.dims()) throw Error("thumbnail: saliency/panorama dimension mismatch");
    return search_windows(sal, pano, p, candidate_grid(p.gridStepDeg));
}

ViewportPath synopsis(std::span<const SaliencyMap> frameSaliency, int strideN,
                      double neighborhoodDeg, const ThumbnailParams& p) {
    if (frameSaliency.empty()) throw Error("synopsis: empty frame list");
    if (strideN < 1) throw Error("synopsis: stride must be >= 1");
    if (neighborhoodDeg <= 0) throw Error("synopsis: neighborhood must be positive");

    // Rendering target for the per-keyframe patches: a synthetic gray panorama
    // is not available here, so render patches from the saliency itself only
    // when the caller asks via thumbnail(); the path holds window geometry.
    const auto fullGrid = candidate_grid(p.gridStepDeg);

    ViewportPath path;
    path.strideN = strideN;
    path.neighborhoodDeg = neighborhoodDeg;

    SphericalDir prevCenter(0, 0);
    for (std::size_t f = 0; f < frameSaliency.size(); f += std::size_t(strideN)) {
        const SaliencyMap& sal = frameSaliency[f];
        double bestScore = -1;
        Candidate best{0, 0};
        bool anyCandidate = false;
        for (const Candidate& c : fullGrid) {
            if (!path.keyframes.empty() &&
                angular_distance(SphericalDir(c.lat, c.lon), prevCenter) > neighborhoodDeg)
                continue;
            anyCandidate = true;
            const GnomonicWindow w{SphericalDir(c.lat, c.lon), p.fovDeg, p.fovDeg, p.searchRes};
            const double s = window_score(sal, w, p.weightSigmaFrac);
            if (s > bestScore) {
                bestScore = s;
                best = c;
            }
        }
        SphericalDir center(best.lat, best.lon);
        if (!anyCandidate) center = prevCenter;  // neighborhood tighter than the grid step
        path.keyframes.push_back({center, p.fovDeg, p.fovDeg, p.renderRes});
        path.frameIndices.push_back(int(f));
        prevCenter = center;
    }
    return path;
}

// --- saliency-aware compression ------------------------------------------------------

namespace {

// Felzenszwalb-Huttenlocher exact 1D squared distance transform.
void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
    const int n = int(f.size());
    d.assign(n, 0);
    std::vector<int> v(n, 0);
    std::vector<double> z(n + 1, 0);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * double(q - v[k]) + f[v[k]];
    }
}

// Pixel distance (exact Euclidean in grid units) from each mask pixel to the
// nearest non-mask pixel; 0 outside the mask. Longitude wraps via 3x tiling.
Image mask_interior_distance(const SalientMask& mask) {
    const int W = mask.width, H = mask.height;
    const double INF = 1e12;
    std::vector<double> col(H), dcol(H);

    // vertical pass on the original grid
    std::vector<std::vector<double>> vert(H, std::vector<double>(W));
    for (int x = 0; x < W; ++x) {
        for (int y = 0; y < H; ++y)
            col[y] = mask.mask[std::size_t(y) * W + x] ? INF : 0.0;
        edt_1d(col, dcol);
        for (int y = 0; y < H; ++y) vert[y][x] = dcol[y];
    }
    // horizontal pass on a 3x lon tiling, read back from the middle copy
    Image out(W, H, 1);
    std::vector<double> row(3 * W), drow(3 * W);
    for (int y = 0; y < H; ++y) {
        for (int t = 0; t < 3; ++t)
            for (int x = 0; x < W; ++x) row[std::size_t(t) * W + x] = vert[y][x];
        edt_1d(row, drow);
        for (int x = 0; x < W; ++x)
            out.at(x, y) = float(std::sqrt(std::min(drow[std::size_t(W) + x], INF)));
    }
    return out;
}

}  // namespace

CompressResult compress(const EquirectGrid& pano, const SaliencyMap& sal, const CompressParams& p) {
    if (p.downFactor < 2) throw Error("compress: downFactor must be >= 2");
    if (!(p.topPercent > 0 && p.topPercent <= 100))
        throw Error("compress: topPercent must lie in (0, 100]");
    if (sal.dims() != pano.dims()) throw Error("compress: saliency/panorama dimension mismatch");

    const int W = pano.width(), H = pano.height();
    const int faceRes = (p.faceRes > 0) ? p.faceRes : W / 4;

    // Down/up path through the cube map.
    const CubeMap cube = equirect_to_cubemap(pano, faceRes);
    const int downRes = std::max(1, int(std::lround(double(faceRes) / p.downFactor)));
    CubeMap upCube(faceRes, pano.channels());
    for (int f = 0; f < kNumCubeFaces; ++f) {
        const Image down = resize_bicubic(cube.face(CubeFace(f)), downRes, downRes);
        upCube.face(CubeFace(f)) = resize_bicubic(down, faceRes, faceRes);
    }
    EquirectGrid lowRes = cubemap_to_equirect(upCube, pano.dims());

    // Catmull-Rom overshoot is clipped to the source range.
    float mn = pano.image().data[0], mx = pano.image().data[0];
    for (float v : pano.image().data) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    for (float& v : lowRes.image().data) v = std::clamp(v, mn, mx);

    const SalientMask mask = salient_mask(sal, p.topPercent);
    Image weights(W, H, 1);
    if (p.featherDeg > 0) {
        const Image dist = mask_interior_distance(mask);
        const double featherPx = p.featherDeg / (180.0 / H);
        for (std::size_t i = 0; i < weights.data.size(); ++i)
            weights.data[i] = float(std::clamp(dist.data[i] / featherPx, 0.0, 1.0));
    } else {
        for (std::size_t i = 0; i < weights.data.size(); ++i)
            weights.data[i] = mask.mask[i] ? 1.0f : 0.0f;
    }

    CompressResult res;
    res.image = EquirectGrid(W, H, pano.channels());
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const float w = weights.at(x, y);
            for (int c = 0; c < pano.channels(); ++c) {
                if (w >= 1.0f) res.image.at(x, y, c) = pano.at(x, y, c);
                else if (w <= 0.0f) res.image.at(x, y, c) = lowRes.at(x, y, c);
                else res.image.at(x, y, c) = lerp(lowRes.at(x, y, c), pano.at(x, y, c), w);
            }
        }
    res.blendWeights = std::move(weights);
    res.lowResPath = std::move(lowRes);
    res.lowResPixels = std::size_t(kNumCubeFaces) * downRes * downRes;
    res.retainedPixels = mask.count();
    res.retentionRatio = double(res.lowResPixels) / (double(kNumCubeFaces) * faceRes * faceRes) +
                         double(res.retainedPixels) / (double(W) * H);
    return res;
}

}  // namespace vrsal
