#include "vrsal/predict.hpp"

#include "vrsal/reports.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <mutex>

namespace vrsal {

std::string strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Equirect: return "equirect";
        case StrategyKind::Cubemap: return "cubemap";
        case StrategyKind::Patch: return "patch";
    }
    throw Error("strategy_name: bad kind");
}

StrategyKind parse_strategy(const std::string& name) {
    if (name == "equirect") return StrategyKind::Equirect;
    if (name == "cubemap") return StrategyKind::Cubemap;
    if (name == "patch") return StrategyKind::Patch;
    throw Error("unknown projection strategy '" + name + "'");
}

// --- spectral residual ------------------------------------------------------------

namespace {

constexpr int kSrWork = 64;  // working resolution of the spectral pipeline

// Single shared 64x64 complex FFT pair; FFTW planning is not thread-safe and
// the transform is cheap, so the whole call is serialized.
struct SrFft {
    fftw_complex* buf;
    fftw_plan fwd;
    fftw_plan inv;
    std::mutex mutex;

    SrFft() {
        buf = fftw_alloc_complex(kSrWork * kSrWork);
        fwd = fftw_plan_dft_2d(kSrWork, kSrWork, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        inv = fftw_plan_dft_2d(kSrWork, kSrWork, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
};

SrFft& sr_fft() {
    static SrFft instance;
    return instance;
}

// 3x3 circular box blur (the spectrum grid is periodic).
std::vector<double> box3_circular(const std::vector<double>& in, int n) {
    std::vector<double> out(in.size());
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double s = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    s += in[std::size_t((y + dy + n) % n) * n + (x + dx + n) % n];
            out[std::size_t(y) * n + x] = s / 9.0;
        }
    return out;
}

// Circular separable Gaussian used for the final smoothing pass.
std::vector<double> gauss_circular(const std::vector<double>& in, int n, double sigma) {
    const int radius = std::max(1, int(std::ceil(2.5 * sigma)));
    std::vector<double> k(radius + 1);
    double ksum = 0;
    for (int d = 0; d <= radius; ++d) {
        k[d] = std::exp(-d * d / (2.0 * sigma * sigma));
        ksum += (d == 0) ? k[d] : 2 * k[d];
    }
    for (double& v : k) v /= ksum;
    std::vector<double> tmp(in.size()), out(in.size());
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double s = k[0] * in[std::size_t(y) * n + x];
            for (int d = 1; d <= radius; ++d)
                s += k[d] * (in[std::size_t(y) * n + (x - d + n) % n] +
                             in[std::size_t(y) * n + (x + d) % n]);
            tmp[std::size_t(y) * n + x] = s;
        }
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double s = k[0] * tmp[std::size_t(y) * n + x];
            for (int d = 1; d <= radius; ++d)
                s += k[d] * (tmp[std::size_t((y - d + n) % n) * n + x] +
                             tmp[std::size_t((y + d) % n) * n + x]);
            out[std::size_t(y) * n + x] = s;
        }
    return out;
}

}  // namespace

Image spectral_residual(const Image& patch) {
    if (patch.width < 16 || patch.height < 16)
        throw Error("spectral_residual: patch must be at least 16x16, got " +
                    std::to_string(patch.width) + "x" + std::to_string(patch.height));

    Image gray = patch.to_gray();
    Image work = resize_bilinear(gray, kSrWork, kSrWork);

    // Remove the mean: the DC bin carries no spatial structure, and zeroing it
    // makes a constant patch map to an (exactly) empty response.
    double mean = work.sum() / double(work.size());
    std::vector<double> centered(work.size());
    double maxAbs = 0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        centered[i] = work.data[i] - mean;
        maxAbs = std::max(maxAbs, std::fabs(centered[i]));
    }
    Image out(patch.width, patch.height, 1);
    if (maxAbs < 1e-30) return out;  // structureless input

    const std::size_t n2 = std::size_t(kSrWork) * kSrWork;
    std::vector<std::complex<double>> spectrum(n2);
    {
        SrFft& fft = sr_fft();
        std::lock_guard<std::mutex> lock(fft.mutex);
        for (std::size_t i = 0; i < n2; ++i) {
            fft.buf[i][0] = centered[i];
            fft.buf[i][1] = 0;
        }
        fftw_execute(fft.fwd);
        for (std::size_t i = 0; i < n2; ++i) spectrum[i] = {fft.buf[i][0], fft.buf[i][1]};
    }

    std::vector<double> amp(n2), logAmp(n2);
    double maxAmp = 0;
    for (std::size_t i = 0; i < n2; ++i) {
        amp[i] = std::abs(spectrum[i]);
        maxAmp = std::max(maxAmp, amp[i]);
    }
    const double eps = 1e-12 * maxAmp;
    for (std::size_t i = 0; i < n2; ++i) logAmp[i] = std::log(amp[i] + eps);
    const auto smoothed = box3_circular(logAmp, kSrWork);

    std::vector<std::complex<double>> shaped(n2);
    for (std::size_t i = 0; i < n2; ++i) {
        const double residual = logAmp[i] - smoothed[i];
        shaped[i] = spectrum[i] * (std::exp(residual) / std::max(amp[i], eps));
    }

    std::vector<double> sal(n2);
    {
        SrFft& fft = sr_fft();
        std::lock_guard<std::mutex> lock(fft.mutex);
        for (std::size_t i = 0; i < n2; ++i) {
            fft.buf[i][0] = shaped[i].real();
            fft.buf[i][1] = shaped[i].imag();
        }
        fftw_execute(fft.inv);
        for (std::size_t i = 0; i < n2; ++i) {
            const double re = fft.buf[i][0] / double(n2);
            const double im = fft.buf[i][1] / double(n2);
            sal[i] = re * re + im * im;
        }
    }

    sal = gauss_circular(sal, kSrWork, 2.5);
    double maxS = 0;
    for (double v : sal) maxS = std::max(maxS, v);
    Image salImg(kSrWork, kSrWork, 1);
    if (maxS > 0)
        for (std::size_t i = 0; i < n2; ++i) salImg.data[i] = float(sal[i] / maxS);

    out = resize_bilinear(salImg, patch.width, patch.height);
    for (float& v : out.data) v = std::max(0.0f, v);
    return out;
}

PlanarPredictor baseline_predictor() {
    return {"spectral-residual", "1", [](const Image& patch) { return spectral_residual(patch); }};
}

// --- strategy lifting ----------------------------------------------------------------

namespace {

Image run_predictor(const PlanarPredictor& predictor, const Image& patch) {
    if (!predictor.run) throw Error("predict: predictor '" + predictor.name + "' has no callable");
    Image out = predictor.run(patch);
    if (out.width != patch.width || out.height != patch.height || out.channels != 1)
        throw Error("predict: predictor '" + predictor.name + "' returned " +
                    std::to_string(out.width) + "x" + std::to_string(out.height) + "x" +
                    std::to_string(out.channels) + " for a " + std::to_string(patch.width) + "x" +
                    std::to_string(patch.height) + " patch");
    for (float& v : out.data) {
        if (v < -1e-6f)
            throw Error("predict: predictor '" + predictor.name + "' returned negative saliency");
        v = std::max(0.0f, v);
    }
    return out;
}

SaliencyMap finish_map(Image img, const std::optional<EquatorBias>& bias) {
    for (float& v : img.data) v = std::max(0.0f, v);
    const double total = img.sum();
    if (total <= 0) throw Error("predict: prediction has no mass");
    for (float& v : img.data) v = float(v / total);
    SaliencyMap map(EquirectGrid(std::move(img)), Normalization::SumOne);
    if (bias) map = apply_equator_bias(map, *bias);
    return map;
}

double falloff(double angleDeg, double halfDeg, double overlapDeg) {
    const double a = std::fabs(angleDeg);
    if (overlapDeg <= 0) return a <= halfDeg ? 1.0 : 0.0;
    if (a <= halfDeg - overlapDeg) return 1.0;
    if (a >= halfDeg) return 0.0;
    const double t = (a - (halfDeg - overlapDeg)) / overlapDeg;
    const double c = std::cos(0.5 * kPi * t);
    return c * c;
}

double weight_from_uv(const GnomonicWindow& w, double overlapDeg, double u, double v) {
    const double lam = rad2deg(std::atan(std::fabs(u) * std::tan(deg2rad(w.fovLonDeg / 2))));
    const double phi = rad2deg(std::atan(std::fabs(v) * std::tan(deg2rad(w.fovLatDeg / 2))));
    return falloff(lam, w.fovLonDeg / 2, overlapDeg) * falloff(phi, w.fovLatDeg / 2, overlapDeg);
}

struct WindowBounds {
    double latMin, latMax;
    bool fullLon;
    double lonHalfRange;
};

WindowBounds window_bounds(const GnomonicWindow& w) {
    const double tx = std::tan(deg2rad(w.fovLonDeg / 2));
    const double ty = std::tan(deg2rad(w.fovLatDeg / 2));
    const double diag = rad2deg(std::atan(std::sqrt(tx * tx + ty * ty))) + 0.5;
    WindowBounds b;
    b.latMin = w.center.lat - diag;
    b.latMax = w.center.lat + diag;
    if (std::fabs(w.center.lat) + diag >= 90.0) {
        b.fullLon = true;
        b.lonHalfRange = 180;
    } else {
        b.fullLon = false;
        const double s = std::sin(deg2rad(diag)) / std::cos(deg2rad(w.center.lat));
        b.lonHalfRange = (s >= 1.0) ? 180.0 : rad2deg(std::asin(s)) + 0.5;
    }
    return b;
}

Image blend_patches(const std::vector<GnomonicWindow>& windows, const std::vector<Image>& salPatches,
                    const GridDims& dims, double overlapDeg) {
    std::vector<WindowBounds> bounds;
    bounds.reserve(windows.size());
    for (const auto& w : windows) bounds.push_back(window_bounds(w));

    Image out(dims.width, dims.height, 1);
    for (int y = 0; y < dims.height; ++y) {
        const double lat = 90.0 - (y + 0.5) * 180.0 / dims.height;
        for (int x = 0; x < dims.width; ++x) {
            const double lon = -180.0 + (x + 0.5) * 360.0 / dims.width;
            const Vec3 d = to_unit(SphericalDir(lat, lon));
            double wsum = 0, vsum = 0;
            for (std::size_t k = 0; k < windows.size(); ++k) {
                if (lat < bounds[k].latMin || lat > bounds[k].latMax) continue;
                if (!bounds[k].fullLon &&
                    std::fabs(lon_diff(lon, windows[k].center.lon)) > bounds[k].lonHalfRange)
                    continue;
                const auto uv = gnomonic_project(windows[k], d);
                if (!uv) continue;
                const double wt = weight_from_uv(windows[k], overlapDeg, uv->first, uv->second);
                if (wt <= 0) continue;
                const int res = windows[k].resolution;
                const double px = (uv->first + 1.0) * 0.5 * res - 0.5;
                const double py = (1.0 - uv->second) * 0.5 * res - 0.5;
                vsum += wt * salPatches[k].sample_clamped(px, py);
                wsum += wt;
            }
            if (wsum <= 0)
                throw Error("predict: direction (" + std::to_string(lat) + "," + std::to_string(lon) +
                            ") not covered by any patch window");
            out.at(x, y) = float(vsum / wsum);
        }
    }
    return out;
}

}  // namespace

double patch_blend_weight(const GnomonicWindow& w, double overlapDeg, const Vec3& dir) {
    const auto uv = gnomonic_project(w, dir);
    if (!uv) return 0.0;
    return weight_from_uv(w, overlapDeg, uv->first, uv->second);
}

SaliencyMap predict(const EquirectGrid& pano, const PlanarPredictor& predictor,
                    const ProjectionStrategy& strategy, const std::optional<EquatorBias>& bias) {
    if (pano.empty()) throw Error("predict: empty panorama");
    switch (strategy.kind) {
        case StrategyKind::Equirect: {
            return finish_map(run_predictor(predictor, pano.image()), bias);
        }
        case StrategyKind::Cubemap: {
            const CubeMap faces = equirect_to_cubemap(pano, strategy.faceRes);
            CubeMap salFaces(strategy.faceRes, 1);
            for (int f = 0; f < kNumCubeFaces; ++f)
                salFaces.face(CubeFace(f)) = run_predictor(predictor, faces.face(CubeFace(f)));
            return finish_map(cubemap_to_equirect(salFaces, pano.dims()).image(), bias);
        }
        case StrategyKind::Patch: {
            const auto windows =
                patch_centers(strategy.fovDeg, strategy.overlapDeg, strategy.patchRes);
            std::vector<Image> salPatches;
            salPatches.reserve(windows.size());
            for (const auto& w : windows)
                salPatches.push_back(run_predictor(predictor, gnomonic_sample(pano, w).image));
            return finish_map(blend_patches(windows, salPatches, pano.dims(), strategy.overlapDeg),
                              bias);
        }
    }
    throw Error("predict: bad strategy");
}

SaliencyMap import_saliency_equirect(const Image& map, const GridDims& canonical) {
    if (map.width != 2 * map.height)
        throw Error("import_saliency: equirect-tagged map must be 2:1, got " +
                    std::to_string(map.width) + "x" + std::to_string(map.height));
    Image gray = map.to_gray();
    if (gray.width != canonical.width || gray.height != canonical.height)
        gray = resize_bilinear(gray, canonical.width, canonical.height);
    return finish_map(std::move(gray), std::nullopt);
}

SaliencyMap import_saliency_cubemap(const CubeMap& faces, const GridDims& canonical) {
    return finish_map(cubemap_to_equirect(faces, canonical).image(), std::nullopt);
}

// --- time-dependent prediction ----------------------------------------------------------

SaliencyMap time_dependent(const SaliencyMap& converged, double startLonDeg, double tSec,
                           const ExplorationCurve& curve, double initHalfWidthDeg) {
    if (tSec < 0) throw Error("time_dependent: negative time");
    if (initHalfWidthDeg <= 0) throw Error("time_dependent: initial half-width must be positive");
    const double halfWidth = initHalfWidthDeg + exploration_offset_at(curve, tSec);
    if (halfWidth >= 180.0) return normalize(converged, Normalization::SumOne);

    const int W = converged.width(), H = converged.height();
    Image out(W, H, 1);
    for (int x = 0; x < W; ++x) {
        const double lon = -180.0 + (x + 0.5) * 360.0 / W;
        if (std::fabs(lon_diff(lon, startLonDeg)) > halfWidth) continue;
        for (int y = 0; y < H; ++y) out.at(x, y) = converged.at(x, y);
    }
    const double total = out.sum();
    if (total <= 0) throw Error("time_dependent: active window contains no saliency");
    for (float& v : out.data) v = float(v / total);
    return SaliencyMap(EquirectGrid(std::move(out)), Normalization::SumOne);
}

// --- head-based prediction ---------------------------------------------------------------

SaliencyMap head_saliency(std::span<const Trajectory> trajectories, const GridDims& dims,
                          const HeadSaliencyParams& p) {
    if (trajectories.empty()) throw Error("head_saliency: no trajectories");
    EquirectGrid counts(dims.width, dims.height, 1);
    std::size_t qualifying = 0;
    for (const Trajectory& traj : trajectories) {
        const auto headVel = angular_velocity(traj, AngularSignal::HeadLon);
        std::size_t begin = 0;
        if (p.excludeStartVicinity) {
            begin = traj.samples.size();
            for (std::size_t k = 0; k < traj.samples.size(); ++k)
                if (std::fabs(lon_diff(traj.samples[k].headLonDeg, traj.startLonDeg)) >
                    p.vicinityDeg) {
                    begin = k;
                    break;
                }
        }
        for (std::size_t k = begin; k < traj.samples.size(); ++k) {
            if (std::fabs(headVel[k]) >= p.speedThreshDegPerSec) continue;
            const PixelCoord px = dir_to_pixel(traj.head_dir(k), dims);
            counts.at(px.x, px.y) += 1.0f;
            ++qualifying;
        }
    }
    if (qualifying == 0)
        throw Error("head_saliency: no samples below the head-speed threshold");
    const SaliencyMap blurred =
        spherical_blur(SaliencyMap(std::move(counts), Normalization::RawCounts), p.blurSigmaDeg);
    return normalize(blurred, Normalization::SumOne);
}

// --- external predictor exchange ------------------------------------------------------------

namespace {

std::string face_tag(CubeFace f) {
    switch (f) {
        case CubeFace::PosX: return "posx";
        case CubeFace::NegX: return "negx";
        case CubeFace::PosY: return "posy";
        case CubeFace::NegY: return "negy";
        case CubeFace::PosZ: return "posz";
        case CubeFace::NegZ: return "negz";
    }
    throw Error("face_tag: bad face");
}

Image load_unit_map(const std::string& path, int width, int height) {
    if (!std::filesystem::exists(path))
        throw Error("stitch: missing predictor output '" + path + "'");
    Image img = load_image(path).to_gray();
    if (img.width != width || img.height != height)
        throw Error("stitch: '" + path + "' is " + std::to_string(img.width) + "x" +
                    std::to_string(img.height) + ", expected " + std::to_string(width) + "x" +
                    std::to_string(height));
    return img;
}

}  // namespace

PredictionUnits write_prediction_units(const EquirectGrid& pano, const ProjectionStrategy& strategy,
                                       const std::string& outDir) {
    namespace fs = std::filesystem;
    fs::create_directories(outDir);
    json manifest;
    manifest["strategy"] = strategy_name(strategy.kind);
    manifest["pano"] = {{"width", pano.width()}, {"height", pano.height()}};
    json units = json::array();

    auto add_unit = [&](const std::string& id, const Image& img, const json& extra) {
        const std::string input = (fs::path(outDir) / (id + ".png")).string();
        const std::string output = (fs::path(outDir) / (id + "_sal.pfm")).string();
        save_png(input, img, 16);
        json u = extra;
        u["id"] = id;
        u["input"] = input;
        u["output"] = output;
        u["width"] = img.width;
        u["height"] = img.height;
        units.push_back(u);
    };

    switch (strategy.kind) {
        case StrategyKind::Equirect:
            add_unit("unit_equirect", pano.image(), json::object());
            break;
        case StrategyKind::Cubemap: {
            manifest["face_res"] = strategy.faceRes;
            const CubeMap faces = equirect_to_cubemap(pano, strategy.faceRes);
            for (int f = 0; f < kNumCubeFaces; ++f)
                add_unit("unit_face_" + face_tag(CubeFace(f)), faces.face(CubeFace(f)),
                         {{"face", face_tag(CubeFace(f))}});
            break;
        }
        case StrategyKind::Patch: {
            manifest["fov_deg"] = strategy.fovDeg;
            manifest["overlap_deg"] = strategy.overlapDeg;
            manifest["patch_res"] = strategy.patchRes;
            const auto windows =
                patch_centers(strategy.fovDeg, strategy.overlapDeg, strategy.patchRes);
            for (std::size_t k = 0; k < windows.size(); ++k) {
                const auto patch = gnomonic_sample(pano, windows[k]);
                add_unit("unit_patch_" + std::to_string(k),
                         patch.image,
                         {{"center_lat", windows[k].center.lat},
                          {"center_lon", windows[k].center.lon}});
            }
            break;
        }
    }
    manifest["units"] = units;
    const std::string manifestPath = (fs::path(outDir) / "manifest.json").string();
    write_json(manifestPath, manifest);
    return {manifestPath, int(units.size())};
}

SaliencyMap stitch_prediction_units(const std::string& manifestPath,
                                    const std::optional<EquatorBias>& bias) {
    const json manifest = read_json(manifestPath);
    const StrategyKind kind = parse_strategy(manifest.at("strategy").get<std::string>());
    const GridDims dims{manifest.at("pano").at("width").get<int>(),
                        manifest.at("pano").at("height").get<int>()};
    const auto& units = manifest.at("units");

    switch (kind) {
        case StrategyKind::Equirect: {
            const auto& u = units.at(0);
            Image sal = load_unit_map(u.at("output"), u.at("width"), u.at("height"));
            SaliencyMap map = import_saliency_equirect(sal, dims);
            return bias ? apply_equator_bias(map, *bias) : map;
        }
        case StrategyKind::Cubemap: {
            const int faceRes = manifest.at("face_res").get<int>();
            CubeMap faces(faceRes, 1);
            for (const auto& u : units) {
                const std::string tag = u.at("face").get<std::string>();
                for (int f = 0; f < kNumCubeFaces; ++f)
                    if (face_tag(CubeFace(f)) == tag)
                        faces.face(CubeFace(f)) = load_unit_map(u.at("output"), faceRes, faceRes);
            }
            SaliencyMap map = import_saliency_cubemap(faces, dims);
            return bias ? apply_equator_bias(map, *bias) : map;
        }
        case StrategyKind::Patch: {
            const double fov = manifest.at("fov_deg").get<double>();
            const double overlap = manifest.at("overlap_deg").get<double>();
            const int patchRes = manifest.at("patch_res").get<int>();
            const auto windows = patch_centers(fov, overlap, patchRes);
            if (units.size() != windows.size())
                throw Error("stitch: manifest lists " + std::to_string(units.size()) +
                            " units but the layout has " + std::to_string(windows.size()));
            std::vector<Image> salPatches;
            salPatches.reserve(windows.size());
            for (const auto& u : units)
                salPatches.push_back(load_unit_map(u.at("output"), patchRes, patchRes));
            return finish_map(blend_patches(windows, salPatches, dims, overlap), bias);
        }
    }
    throw Error("stitch: bad strategy");
}

}  // namespace vrsal
