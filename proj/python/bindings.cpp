// Python bindings for the main vrsal operations. Saliency maps and planar
// images cross the boundary as float32 numpy arrays (row-major, HxW or HxWx3).
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vrsal/apps.hpp"
#include "vrsal/bias.hpp"
#include "vrsal/metrics.hpp"
#include "vrsal/predict.hpp"
#include "vrsal/synth.hpp"

namespace py = pybind11;
using namespace vrsal;

namespace {

Image image_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2 && arr.ndim() != 3)
        throw Error("expected a HxW or HxWxC array");
    const int h = int(arr.shape(0));
    const int w = int(arr.shape(1));
    const int c = arr.ndim() == 3 ? int(arr.shape(2)) : 1;
    Image img(w, h, c);
    std::copy(arr.data(), arr.data() + img.data.size(), img.data.begin());
    img.check_finite("array input");
    return img;
}

py::array_t<float> array_from_image(const Image& img) {
    if (img.channels == 1) {
        py::array_t<float> arr({img.height, img.width});
        std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
        return arr;
    }
    py::array_t<float> arr({img.height, img.width, img.channels});
    std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
    return arr;
}

SaliencyMap map_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr,
                           const std::string& norm = "raw-counts") {
    return SaliencyMap(EquirectGrid(image_from_array(arr)), parse_normalization(norm));
}

std::vector<Fixation> fixations_from_list(const std::vector<std::tuple<double, double, double, double>>& rows) {
    std::vector<Fixation> out;
    out.reserve(rows.size());
    for (const auto& [t, dur, lat, lon] : rows)
        out.push_back({t, dur, SphericalDir(lat, lon)});
    return out;
}

}  // namespace

PYBIND11_MODULE(_vrsal, m) {
    m.doc() = "Saliency analysis for full-sphere panoramas: spherical projections, "
              "I-DT fixation detection, saliency maps, metrics, and applications.";

    py::register_exception<Error>(m, "VrsalError");

    // --- sphere ------------------------------------------------------------------
    m.def("angular_distance",
          [](double lat1, double lon1, double lat2, double lon2) {
              return angular_distance(SphericalDir(lat1, lon1), SphericalDir(lat2, lon2));
          },
          py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
          "Great-circle angle in degrees.");
    m.def("pixel_to_dir",
          [](int x, int y, int width, int height) {
              const SphericalDir d = pixel_to_dir({x, y}, {width, height});
              return std::make_pair(d.lat, d.lon);
          },
          py::arg("x"), py::arg("y"), py::arg("width"), py::arg("height"));
    m.def("dir_to_pixel",
          [](double lat, double lon, int width, int height) {
              const PixelCoord p = dir_to_pixel(SphericalDir(lat, lon), {width, height});
              return std::make_pair(p.x, p.y);
          },
          py::arg("lat"), py::arg("lon"), py::arg("width"), py::arg("height"));
    m.def("equirect_to_cubemap",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& pano, int faceRes) {
              const CubeMap cm = equirect_to_cubemap(EquirectGrid(image_from_array(pano)), faceRes);
              py::list faces;
              for (int f = 0; f < kNumCubeFaces; ++f)
                  faces.append(array_from_image(cm.face(CubeFace(f))));
              return faces;
          },
          py::arg("pano"), py::arg("face_res"),
          "Six faces in order +X, -X, +Y, -Y, +Z, -Z.");
    m.def("cubemap_to_equirect",
          [](const std::vector<py::array_t<float, py::array::c_style | py::array::forcecast>>& faces,
             int width) {
              if (faces.size() != kNumCubeFaces) throw Error("expected 6 faces");
              const Image first = image_from_array(faces[0]);
              CubeMap cm(first.width, first.channels);
              for (int f = 0; f < kNumCubeFaces; ++f) cm.face(CubeFace(f)) = image_from_array(faces[f]);
              return array_from_image(cubemap_to_equirect(cm, {width, width / 2}).image());
          },
          py::arg("faces"), py::arg("width"));
    m.def("gnomonic_patch",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& pano, double lat,
             double lon, double fovLon, double fovLat, int resolution) {
              const GnomonicWindow w{SphericalDir(lat, lon), fovLon, fovLat, resolution};
              return array_from_image(gnomonic_sample(EquirectGrid(image_from_array(pano)), w).image);
          },
          py::arg("pano"), py::arg("lat"), py::arg("lon"), py::arg("fov_lon") = 90.0,
          py::arg("fov_lat") = 90.0, py::arg("resolution") = 256);

    // --- trajectories ---------------------------------------------------------------
    m.def("load_trajectory", [](const std::string& path) {
        const Trajectory t = load_trajectory_file(path);
        py::dict d;
        py::list samples;
        for (const Sample& s : t.samples)
            samples.append(py::make_tuple(s.tMs, s.headLonDeg, s.headLatDeg, s.headRollDeg,
                                          s.gazeLonDeg, s.gazeLatDeg));
        d["samples"] = samples;
        d["scene"] = t.sceneId;
        d["user"] = t.userId;
        d["condition"] = condition_name(t.condition);
        d["start_lon"] = t.startLonDeg;
        d["rate_hz"] = t.sampleRateHz;
        return d;
    });
    m.def("detect_fixations",
          [](const std::string& path, double minDurMs, double maxDispDeg) {
              const Trajectory t = load_trajectory_file(path);
              FixationParams p;
              p.minDurMs = minDurMs;
              p.maxDispDeg = maxDispDeg;
              std::vector<std::tuple<double, double, double, double>> out;
              for (const Fixation& f : detect_fixations(t, p))
                  out.emplace_back(f.tStartMs, f.durationMs, f.centroid.lat, f.centroid.lon);
              return out;
          },
          py::arg("trajectory_path"), py::arg("min_dur_ms") = 150.0, py::arg("max_disp_deg") = 1.0,
          "Spherical I-DT fixation detection; returns (t_start_ms, duration_ms, lat, lon) rows.");

    // --- saliency maps ----------------------------------------------------------------
    m.def("accumulate_fixations",
          [](const std::vector<std::tuple<double, double, double, double>>& fixations, int width) {
              return array_from_image(
                  accumulate_fixations(fixations_from_list(fixations), {width, width / 2})
                      .grid().image());
          },
          py::arg("fixations"), py::arg("width"));
    m.def("spherical_blur",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& map, double sigma) {
              return array_from_image(spherical_blur(map_from_array(map), sigma).grid().image());
          },
          py::arg("map"), py::arg("sigma_deg") = 1.0,
          "Isotropic spherical Gaussian blur on an equirect map (mass preserving).");
    m.def("entropy",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& map) {
              return entropy(map_from_array(map));
          },
          py::arg("map"));
    m.def("salient_mask",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& map, double top) {
              const SalientMask mask = salient_mask(map_from_array(map), top);
              py::array_t<uint8_t> arr({mask.height, mask.width});
              std::copy(mask.mask.begin(), mask.mask.end(), arr.mutable_data());
              return arr;
          },
          py::arg("map"), py::arg("top_percent") = 5.0);
    m.def("pearson_cc",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a,
             const py::array_t<float, py::array::c_style | py::array::forcecast>& b) {
              return pearson_cc(map_from_array(a), map_from_array(b));
          },
          py::arg("a"), py::arg("b"));

    // --- bias ----------------------------------------------------------------------------
    m.def("fit_equator_bias",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& map) {
              const SaliencyMap m = map_from_array(map);
              const LaplaceFit fit = fit_laplace(lat_marginal(m), row_latitudes(m.height()));
              return py::make_tuple(fit.bias.muDeg, fit.bias.betaDeg, fit.degenerateClamped);
          },
          py::arg("map"), "Laplace fit over the latitude marginal: (mu_deg, beta_deg, clamped).");
    m.def("apply_equator_bias",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& map, double mu,
             double beta) {
              return array_from_image(
                  apply_equator_bias(map_from_array(map), {mu, beta}).grid().image());
          },
          py::arg("map"), py::arg("mu_deg"), py::arg("beta_deg"));

    // --- prediction ------------------------------------------------------------------------
    m.def("predict_baseline",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& pano,
             const std::string& strategy, double fov, double overlap,
             std::optional<std::pair<double, double>> bias) {
              ProjectionStrategy s;
              s.kind = parse_strategy(strategy);
              s.fovDeg = fov;
              s.overlapDeg = overlap;
              std::optional<EquatorBias> b;
              if (bias) b = EquatorBias{bias->first, bias->second};
              return array_from_image(
                  predict(EquirectGrid(image_from_array(pano)), baseline_predictor(), s, b)
                      .grid().image());
          },
          py::arg("pano"), py::arg("strategy") = "equirect", py::arg("fov_deg") = 90.0,
          py::arg("overlap_deg") = 30.0, py::arg("bias") = std::nullopt,
          "Spectral-residual saliency lifted to the sphere by the chosen projection.");
    m.def("spectral_residual",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& patch) {
              return array_from_image(spectral_residual(image_from_array(patch)));
          },
          py::arg("patch"));

    // --- applications ------------------------------------------------------------------------
    m.def("align_cut",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& before,
             const py::array_t<float, py::array::c_style | py::array::forcecast>& after) {
              const CutAlignment a = align_cut(map_from_array(before), map_from_array(after));
              return py::make_tuple(a.shiftDeg, a.ccAtShift);
          },
          py::arg("before"), py::arg("after"),
          "Longitudinal shift (deg) maximizing the Pearson CC, with the score.");
    m.def("thumbnail_window",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& sal, double fov,
             double step) {
              const SaliencyMap m = map_from_array(sal);
              EquirectGrid pano(m.width(), m.height(), 1, 0.5f);
              ThumbnailParams p;
              p.fovDeg = fov;
              p.gridStepDeg = step;
              p.searchRes = 24;
              p.renderRes = 16;
              const ThumbnailResult r = thumbnail(m, pano, p);
              return py::make_tuple(r.window.center.lat, r.window.center.lon, r.score);
          },
          py::arg("saliency"), py::arg("fov_deg") = 60.0, py::arg("grid_step_deg") = 2.0,
          "Center (lat, lon) and score of the most salient gnomonic window.");
    m.def("compress",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& pano,
             const py::array_t<float, py::array::c_style | py::array::forcecast>& sal,
             int downFactor, double topPercent, double featherDeg) {
              CompressParams p;
              p.downFactor = downFactor;
              p.topPercent = topPercent;
              p.featherDeg = featherDeg;
              const CompressResult r =
                  compress(EquirectGrid(image_from_array(pano)), map_from_array(sal), p);
              return py::make_tuple(array_from_image(r.image.image()), r.retentionRatio);
          },
          py::arg("pano"), py::arg("saliency"), py::arg("down_factor") = 6,
          py::arg("top_percent") = 10.0, py::arg("feather_deg") = 1.0);

    // --- synthetic data -------------------------------------------------------------------------
    m.def("gen_blob_panorama",
          [](const std::vector<std::tuple<double, double, double, double>>& blobs, int width) {
              std::vector<BlobSpec> specs;
              for (const auto& [lat, lon, sigma, mass] : blobs)
                  specs.push_back({SphericalDir(lat, lon), sigma, mass});
              const SynthPanorama sp = gen_panorama(specs, {width, width / 2});
              return py::make_tuple(array_from_image(sp.pano.image()),
                                    array_from_image(sp.saliency.grid().image()));
          },
          py::arg("blobs"), py::arg("width") = 256,
          "Blobs as (lat, lon, sigma_deg, mass) rows; returns (panorama, saliency).");
}
