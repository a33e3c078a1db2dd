// vrsal: analysis and prediction toolkit for gaze/head trajectories on
// full-sphere panoramas. One subcommand per pipeline stage; every run echoes
// its effective configuration so it can be reproduced bit-identically.
#include <CLI11.hpp>

#include "vrsal/apps.hpp"
#include "vrsal/bias.hpp"
#include "vrsal/metrics.hpp"
#include "vrsal/predict.hpp"
#include "vrsal/reports.hpp"
#include "vrsal/synth.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using vrsal::json;

namespace {

void require_keys(const json& params, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : params.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw vrsal::Error("config: unknown key '" + key + "'");
    }
}

std::vector<std::string> path_list(const json& params, const std::string& key) {
    std::vector<std::string> out;
    for (const auto& p : params.at(key)) out.push_back(p.get<std::string>());
    if (out.empty()) throw vrsal::Error("config: '" + key + "' must list at least one file");
    return out;
}

std::vector<vrsal::Trajectory> load_trajectories(const std::vector<std::string>& paths) {
    std::vector<vrsal::Trajectory> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(vrsal::load_trajectory_file(p));
    return out;
}

vrsal::FixationParams fixation_params(const json& params, const vrsal::Trajectory& traj) {
    vrsal::FixationParams p;
    p.minDurMs = params.value("min_dur_ms", 150.0);
    p.maxDispDeg = params.value("max_disp_deg", 0.0);
    p.maxGapMs = params.value("max_gap_ms", 0.0);
    if (p.maxDispDeg <= 0)
        p.maxDispDeg = (traj.condition == vrsal::Condition::Desktop) ? 2.0 : 1.0;
    return p;
}

// Desktop trajectories get the 2-sample running average before detection.
std::vector<vrsal::Fixation> detect_for(const json& params, const vrsal::Trajectory& traj) {
    const vrsal::FixationParams p = fixation_params(params, traj);
    const int smooth = params.value("smooth_window", 0);
    if (traj.condition == vrsal::Condition::Desktop)
        return detect_fixations(vrsal::smooth_desktop(traj, smooth > 0 ? smooth : 2), p);
    if (smooth > 1) throw vrsal::Error("config: smoothing applies to the desktop condition only");
    return detect_fixations(traj, p);
}

json fixations_to_json(const std::vector<vrsal::Fixation>& fix) {
    json arr = json::array();
    for (const auto& f : fix)
        arr.push_back({{"t_start_ms", f.tStartMs},
                       {"duration_ms", f.durationMs},
                       {"lat", f.centroid.lat},
                       {"lon", f.centroid.lon}});
    return arr;
}

std::vector<vrsal::Fixation> fixations_from_json(const json& arr) {
    std::vector<vrsal::Fixation> out;
    for (const auto& f : arr)
        out.push_back({f.at("t_start_ms").get<double>(), f.at("duration_ms").get<double>(),
                       vrsal::SphericalDir(f.at("lat").get<double>(), f.at("lon").get<double>())});
    return out;
}

std::vector<vrsal::Fixation> load_fixations_file(const std::string& path) {
    const json j = vrsal::read_json(path);
    return fixations_from_json(j.contains("fixations") ? j.at("fixations") : j);
}

json curve_to_json(const vrsal::ExplorationCurve& c) {
    json j;
    j["offsets_deg"] = c.offsetsDeg;
    json mean = json::array(), raw = json::array();
    for (double v : c.meanTimeSec) mean.push_back(std::isnan(v) ? json(nullptr) : json(v));
    for (double v : c.rawMeanTimeSec) raw.push_back(std::isnan(v) ? json(nullptr) : json(v));
    j["mean_time_sec"] = mean;
    j["raw_mean_time_sec"] = raw;
    j["counts"] = c.counts;
    j["raw_violations"] = c.rawViolations;
    return j;
}

vrsal::ExplorationCurve curve_from_json(const json& j) {
    vrsal::ExplorationCurve c;
    for (const auto& v : j.at("offsets_deg")) c.offsetsDeg.push_back(v.get<double>());
    for (const auto& v : j.at("mean_time_sec"))
        c.meanTimeSec.push_back(v.is_null() ? std::nan("") : v.get<double>());
    for (const auto& v : j.at("counts")) c.counts.push_back(v.get<int>());
    c.rawMeanTimeSec = c.meanTimeSec;
    return c;
}

std::optional<vrsal::EquatorBias> bias_from(const json& params) {
    if (params.contains("bias_file"))
        return vrsal::load_bias(params.at("bias_file").get<std::string>());
    if (params.contains("bias_mu") || params.contains("bias_beta")) {
        vrsal::EquatorBias b{params.value("bias_mu", 0.0), params.value("bias_beta", 15.0)};
        vrsal::validate_bias(b);
        return b;
    }
    return std::nullopt;
}

vrsal::EquirectGrid load_pano(const std::string& path) {
    return vrsal::EquirectGrid(vrsal::load_image(path));
}

// --- subcommand handlers (each returns the report payload) ------------------------

json run_synth(const json& params, const std::string& outDir) {
    require_keys(params, {"mode", "spec", "width"});
    const std::string mode = params.at("mode").get<std::string>();
    if (mode == "traj") {
        const vrsal::SynthTrajectory st =
            vrsal::gen_trajectory(vrsal::load_synth_spec(params.at("spec").get<std::string>()));
        vrsal::save_trajectory_file((fs::path(outDir) / "trajectory.csv").string(), st.trajectory);
        json truth;
        truth["fixations"] = fixations_to_json(st.truth.fixations);
        truth["head_lag_ms"] = st.truth.headLagMs;
        truth["vor_slope"] = st.truth.vorSlope;
        vrsal::write_json((fs::path(outDir) / "truth.json").string(), truth);
        return {{"samples", st.trajectory.samples.size()},
                {"planned_fixations", st.truth.fixations.size()},
                {"span_ms", st.trajectory.span_ms()}};
    }
    if (mode == "pano") {
        const int width = params.value("width", 1024);
        const auto blobs = vrsal::load_blob_spec(params.at("spec").get<std::string>());
        const vrsal::SynthPanorama sp = vrsal::gen_panorama(blobs, {width, width / 2});
        vrsal::save_png((fs::path(outDir) / "pano.png").string(), sp.pano.image(), 16);
        vrsal::save_saliency_map((fs::path(outDir) / "saliency").string(), sp.saliency,
                                 {{"source", "synthetic-blobs"}});
        return {{"blobs", blobs.size()}, {"width", width}};
    }
    throw vrsal::Error("synth: mode must be 'traj' or 'pano'");
}

json run_fixations(const json& params, const std::string& outDir) {
    require_keys(params, {"traj", "min_dur_ms", "max_disp_deg", "max_gap_ms", "smooth_window",
                          "start_filter", "vicinity_deg"});
    const vrsal::Trajectory traj =
        vrsal::load_trajectory_file(params.at("traj").get<std::string>());
    std::vector<vrsal::Fixation> fix = detect_for(params, traj);
    const bool startFilter = params.value("start_filter", false);
    const std::size_t beforeFilter = fix.size();
    if (startFilter)
        fix = filter_start_vicinity(fix, traj.startLonDeg, params.value("vicinity_deg", 20.0));
    json out;
    out["fixations"] = fixations_to_json(fix);
    out["scene"] = traj.sceneId;
    out["user"] = traj.userId;
    out["condition"] = condition_name(traj.condition);
    out["start_lon"] = traj.startLonDeg;
    vrsal::write_json((fs::path(outDir) / "fixations.json").string(), out);

    double meanDur = 0;
    for (const auto& f : fix) meanDur += f.durationMs;
    if (!fix.empty()) meanDur /= double(fix.size());
    return {{"n_fix", fix.size()},
            {"dropped_by_start_filter", beforeFilter - fix.size()},
            {"mean_duration_ms", meanDur},
            {"trajectory_span_ms", traj.span_ms()}};
}

json run_salmap(const json& params, const std::string& outDir) {
    require_keys(params, {"traj", "fixations", "width", "sigma_deg", "min_dur_ms", "max_disp_deg",
                          "max_gap_ms", "smooth_window", "start_filter", "vicinity_deg"});
    const int width = params.value("width", 1024);
    const vrsal::GridDims dims{width, width / 2};
    std::vector<vrsal::Fixation> all;
    std::size_t nTraj = 0;
    if (params.contains("traj")) {
        for (const auto& t : load_trajectories(path_list(params, "traj"))) {
            ++nTraj;
            auto fix = detect_for(params, t);
            if (params.value("start_filter", true))
                fix = filter_start_vicinity(fix, t.startLonDeg, params.value("vicinity_deg", 20.0));
            all.insert(all.end(), fix.begin(), fix.end());
        }
    }
    if (params.contains("fixations"))
        for (const auto& f : path_list(params, "fixations")) {
            const auto fix = load_fixations_file(f);
            all.insert(all.end(), fix.begin(), fix.end());
        }
    if (all.empty()) throw vrsal::Error("salmap: no fixations to accumulate");

    const vrsal::SaliencyMap counts = vrsal::accumulate_fixations(all, dims);
    const vrsal::SaliencyMap blurred =
        vrsal::spherical_blur(counts, params.value("sigma_deg", 1.0));
    const vrsal::SaliencyMap out = vrsal::normalize(blurred, vrsal::Normalization::SumOne);
    vrsal::save_saliency_map((fs::path(outDir) / "salmap").string(), out,
                             {{"source", "fixation-accumulation"}});
    return {{"n_fix", all.size()}, {"trajectories", nTraj}, {"width", width}};
}

json run_bias_fit(const json& params, const std::string& outDir) {
    require_keys(params, {"map"});
    const vrsal::SaliencyMap m = vrsal::load_saliency_map(params.at("map").get<std::string>());
    const auto profile = vrsal::lat_marginal(m);
    const vrsal::LaplaceFit fit = vrsal::fit_laplace(profile, vrsal::row_latitudes(m.height()));
    vrsal::save_bias((fs::path(outDir) / "bias.txt").string(), fit.bias);
    return {{"mu_deg", fit.bias.muDeg},
            {"beta_deg", fit.bias.betaDeg},
            {"degenerate_clamped", fit.degenerateClamped}};
}

json run_entropy(const json& params, const std::string&) {
    require_keys(params, {"map"});
    const vrsal::SaliencyMap m = vrsal::load_saliency_map(params.at("map").get<std::string>());
    return {{"entropy_nats", vrsal::entropy(m)},
            {"pixels", m.width() * m.height()}};
}

json run_metrics(const json& params, const std::string& outDir) {
    require_keys(params, {"traj", "map", "top_percent", "step_sec", "horizon_sec", "min_dur_ms",
                          "max_disp_deg", "max_gap_ms", "smooth_window", "start_filter",
                          "vicinity_deg", "sigma_deg"});
    const vrsal::Trajectory traj =
        vrsal::load_trajectory_file(params.at("traj").get<std::string>());
    const vrsal::SaliencyMap gt = vrsal::load_saliency_map(params.at("map").get<std::string>());
    auto fix = detect_for(params, traj);
    if (params.value("start_filter", true))
        fix = filter_start_vicinity(fix, traj.startLonDeg, params.value("vicinity_deg", 20.0));

    const vrsal::SalientMask mask = vrsal::salient_mask(gt, params.value("top_percent", 5.0));
    json rep;
    rep["scene"] = traj.sceneId;
    rep["user"] = traj.userId;
    rep["condition"] = condition_name(traj.condition);
    rep["n_fix"] = fix.size();
    const auto tts = vrsal::time_to_sr_sec(fix, mask);
    rep["time_to_sr_sec"] = tts ? json(*tts) : json(nullptr);
    const auto pfi = vrsal::perc_fix_inside(fix, mask);
    rep["perc_fix_inside"] = pfi ? json(*pfi) : json(nullptr);

    vrsal::ConvergParams cp;
    cp.stepSec = params.value("step_sec", 1.0);
    cp.horizonSec = params.value("horizon_sec", 30.0);
    cp.blurSigmaDeg = params.value("sigma_deg", 1.0);
    cp.fixation = fixation_params(params, traj);
    const vrsal::ConvergResult conv = vrsal::converg_time(traj, gt, cp);
    rep["converg_time_auc"] = conv.auc;
    rep["converg_partial"] = conv.partial;
    rep["cc_over_time"] = conv.ccOverTime;

    // kinematic summary; degenerate estimators are reported as null
    double meanDur = 0, meanEcc = 0;
    for (const auto& f : fix) meanDur += f.durationMs;
    if (!fix.empty()) meanDur /= double(fix.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        meanEcc += vrsal::angular_distance(traj.gaze_dir(i), traj.head_dir(i));
    meanEcc /= double(traj.samples.size());
    rep["mean_fix_duration_ms"] = meanDur;
    rep["mean_eye_eccentricity_deg"] = meanEcc;
    try {
        rep["head_gaze_delay_ms"] = vrsal::head_gaze_delay_ms(traj);
    } catch (const vrsal::Error&) {
        rep["head_gaze_delay_ms"] = nullptr;
    }
    try {
        rep["vor_slope"] = vrsal::vor_slope(traj, fix);
    } catch (const vrsal::Error&) {
        rep["vor_slope"] = nullptr;
    }
    vrsal::write_json((fs::path(outDir) / "metrics.json").string(), rep);
    return rep;
}

json run_congruency(const json& params, const std::string& outDir) {
    require_keys(params, {"fixations", "map", "thresholds"});
    const auto fix = load_fixations_file(params.at("fixations").get<std::string>());
    const vrsal::SaliencyMap gt = vrsal::load_saliency_map(params.at("map").get<std::string>());
    std::vector<double> thresholds;
    if (params.contains("thresholds"))
        for (const auto& t : params.at("thresholds")) thresholds.push_back(t.get<double>());
    const vrsal::RocCurve roc = vrsal::congruency_roc(fix, gt, thresholds);
    json rep;
    rep["auc"] = roc.auc;
    rep["thresholds"] = roc.thresholds;
    rep["hit_rates"] = roc.hitRates;
    vrsal::write_json((fs::path(outDir) / "roc.json").string(), rep);
    return {{"auc", roc.auc}, {"n_fix", fix.size()}, {"thresholds", roc.thresholds.size()}};
}

json run_explore_curve(const json& params, const std::string& outDir) {
    require_keys(params, {"traj", "bin_deg"});
    const auto trajs = load_trajectories(path_list(params, "traj"));
    const vrsal::ExplorationCurve c = vrsal::exploration_curve(trajs, params.value("bin_deg", 5.0));
    vrsal::write_json((fs::path(outDir) / "curve.json").string(), curve_to_json(c));
    int reached = 0;
    for (int n : c.counts)
        if (n > 0) ++reached;
    return {{"trajectories", trajs.size()},
            {"bins_reached", reached},
            {"raw_violations", c.rawViolations}};
}

json run_predict(const json& params, const std::string& outDir) {
    require_keys(params, {"pano", "strategy", "face_res", "fov_deg", "overlap_deg", "patch_res",
                          "bias_file", "bias_mu", "bias_beta", "emit_units", "from_units"});
    const auto bias = bias_from(params);

    if (params.contains("from_units")) {
        const vrsal::SaliencyMap m =
            vrsal::stitch_prediction_units(params.at("from_units").get<std::string>(), bias);
        vrsal::save_saliency_map((fs::path(outDir) / "salmap").string(), m,
                                 {{"source", "external-predictor"}});
        return {{"stitched", true}, {"bias_applied", bias.has_value()}};
    }

    const vrsal::EquirectGrid pano = load_pano(params.at("pano").get<std::string>());
    vrsal::ProjectionStrategy strategy;
    strategy.kind = vrsal::parse_strategy(params.value("strategy", std::string("equirect")));
    strategy.faceRes = params.value("face_res", 256);
    strategy.fovDeg = params.value("fov_deg", 90.0);
    strategy.overlapDeg = params.value("overlap_deg", 30.0);
    strategy.patchRes = params.value("patch_res", 64);

    if (params.value("emit_units", false)) {
        const vrsal::PredictionUnits units =
            vrsal::write_prediction_units(pano, strategy, (fs::path(outDir) / "units").string());
        return {{"manifest", units.manifestPath}, {"units", units.unitCount}};
    }

    const vrsal::SaliencyMap m = vrsal::predict(pano, vrsal::baseline_predictor(), strategy, bias);
    vrsal::save_saliency_map((fs::path(outDir) / "salmap").string(), m,
                             {{"source", "spectral-residual"},
                              {"strategy", strategy_name(strategy.kind)},
                              {"bias_applied", bias.has_value()}});
    return {{"strategy", strategy_name(strategy.kind)}, {"bias_applied", bias.has_value()}};
}

json run_timedep(const json& params, const std::string& outDir) {
    require_keys(params, {"converged", "curve", "start_lon", "t_sec", "init_half_width_deg"});
    const vrsal::SaliencyMap converged =
        vrsal::load_saliency_map(params.at("converged").get<std::string>());
    const vrsal::ExplorationCurve curve =
        curve_from_json(vrsal::read_json(params.at("curve").get<std::string>()));
    const vrsal::SaliencyMap m =
        vrsal::time_dependent(converged, params.at("start_lon").get<double>(),
                              params.at("t_sec").get<double>(), curve,
                              params.value("init_half_width_deg", 47.5));
    vrsal::save_saliency_map((fs::path(outDir) / "salmap").string(), m,
                             {{"source", "time-dependent"}});
    return {{"t_sec", params.at("t_sec").get<double>()}};
}

json run_headsal(const json& params, const std::string& outDir) {
    require_keys(params, {"traj", "width", "speed_thresh", "blur_deg", "exclude_start",
                          "vicinity_deg"});
    const auto trajs = load_trajectories(path_list(params, "traj"));
    const int width = params.value("width", 1024);
    vrsal::HeadSaliencyParams p;
    p.speedThreshDegPerSec = params.value("speed_thresh", 19.6);
    p.blurSigmaDeg = params.value("blur_deg", 11.7);
    p.excludeStartVicinity = params.value("exclude_start", true);
    p.vicinityDeg = params.value("vicinity_deg", 20.0);
    const vrsal::SaliencyMap m = vrsal::head_saliency(trajs, {width, width / 2}, p);
    vrsal::save_saliency_map((fs::path(outDir) / "salmap").string(), m,
                             {{"source", "head-velocity"}});
    return {{"trajectories", trajs.size()}, {"width", width}};
}

json run_align_cut(const json& params, const std::string& outDir) {
    require_keys(params, {"before", "after"});
    const vrsal::SaliencyMap before =
        vrsal::load_saliency_map(params.at("before").get<std::string>());
    const vrsal::SaliencyMap after =
        vrsal::load_saliency_map(params.at("after").get<std::string>());
    const vrsal::CutAlignment a = vrsal::align_cut(before, after);
    json rep;
    rep["shift_deg"] = a.shiftDeg;
    rep["cc_at_shift"] = a.ccAtShift;
    rep["shifts_deg"] = a.shiftsDeg;
    rep["cc_curve"] = a.ccCurve;
    vrsal::write_json((fs::path(outDir) / "alignment.json").string(), rep);
    return {{"shift_deg", a.shiftDeg}, {"cc_at_shift", a.ccAtShift}};
}

json run_thumbnail(const json& params, const std::string& outDir) {
    require_keys(params, {"map", "pano", "fov_deg", "grid_step_deg", "weight_sigma_frac",
                          "search_res", "render_res", "refine"});
    const vrsal::SaliencyMap sal = vrsal::load_saliency_map(params.at("map").get<std::string>());
    const vrsal::EquirectGrid pano = load_pano(params.at("pano").get<std::string>());
    vrsal::ThumbnailParams p;
    p.fovDeg = params.value("fov_deg", 60.0);
    p.gridStepDeg = params.value("grid_step_deg", 2.0);
    p.weightSigmaFrac = params.value("weight_sigma_frac", 0.25);
    p.searchRes = params.value("search_res", 32);
    p.renderRes = params.value("render_res", 512);
    p.refine = params.value("refine", false);
    const vrsal::ThumbnailResult r = vrsal::thumbnail(sal, pano, p);
    vrsal::save_png((fs::path(outDir) / "thumbnail.png").string(), r.patch);
    const json window = {{"lat", r.window.center.lat},
                         {"lon", r.window.center.lon},
                         {"fov_deg", p.fovDeg},
                         {"score", r.score}};
    vrsal::write_json((fs::path(outDir) / "window.json").string(), window);
    return window;
}

json run_synopsis(const json& params, const std::string& outDir) {
    require_keys(params, {"frames", "stride", "neighborhood_deg", "fov_deg", "grid_step_deg",
                          "weight_sigma_frac", "search_res"});
    std::vector<vrsal::SaliencyMap> frames;
    for (const auto& f : path_list(params, "frames"))
        frames.push_back(vrsal::load_saliency_map(f));
    vrsal::ThumbnailParams p;
    p.fovDeg = params.value("fov_deg", 60.0);
    p.gridStepDeg = params.value("grid_step_deg", 2.0);
    p.weightSigmaFrac = params.value("weight_sigma_frac", 0.25);
    p.searchRes = params.value("search_res", 32);
    p.renderRes = 16;  // the path stores geometry; patches render elsewhere
    const vrsal::ViewportPath path = vrsal::synopsis(
        frames, params.at("stride").get<int>(), params.at("neighborhood_deg").get<double>(), p);
    json keyframes = json::array();
    for (std::size_t k = 0; k < path.keyframes.size(); ++k)
        keyframes.push_back({{"frame", path.frameIndices[k]},
                             {"lat", path.keyframes[k].center.lat},
                             {"lon", path.keyframes[k].center.lon}});
    json rep;
    rep["stride"] = path.strideN;
    rep["neighborhood_deg"] = path.neighborhoodDeg;
    rep["keyframes"] = keyframes;
    vrsal::write_json((fs::path(outDir) / "path.json").string(), rep);
    return {{"keyframes", keyframes.size()}};
}

json run_compress(const json& params, const std::string& outDir) {
    require_keys(params, {"pano", "map", "down_factor", "top_percent", "feather_deg", "face_res"});
    const vrsal::EquirectGrid pano = load_pano(params.at("pano").get<std::string>());
    const vrsal::SaliencyMap sal = vrsal::load_saliency_map(params.at("map").get<std::string>());
    vrsal::CompressParams p;
    p.downFactor = params.value("down_factor", 6);
    p.topPercent = params.value("top_percent", 10.0);
    p.featherDeg = params.value("feather_deg", 1.0);
    p.faceRes = params.value("face_res", 0);
    const vrsal::CompressResult r = vrsal::compress(pano, sal, p);
    vrsal::save_png((fs::path(outDir) / "compressed.png").string(), r.image.image(), 16);
    vrsal::save_png((fs::path(outDir) / "blend_mask.png").string(), r.blendWeights);
    return {{"retention_ratio", r.retentionRatio},
            {"low_res_pixels", r.lowResPixels},
            {"retained_pixels", r.retainedPixels},
            // factor-6-per-dimension arithmetic; the cited 25% figure matches
            // neither this nor a per-area factor (~26.7%), so the computed
            // value is reported as-is
            {"ratio_note", "lowres cube fraction + retained equirect fraction"}};
}

using Handler = json (*)(const json&, const std::string&);

Handler handler_for(const std::string& command) {
    static const std::map<std::string, Handler> table = {
        {"synth", run_synth},        {"fixations", run_fixations},
        {"salmap", run_salmap},      {"bias-fit", run_bias_fit},
        {"entropy", run_entropy},    {"metrics", run_metrics},
        {"congruency", run_congruency}, {"explore-curve", run_explore_curve},
        {"predict", run_predict},    {"timedep", run_timedep},
        {"headsal", run_headsal},    {"align-cut", run_align_cut},
        {"thumbnail", run_thumbnail}, {"synopsis", run_synopsis},
        {"compress", run_compress},
    };
    const auto it = table.find(command);
    if (it == table.end()) throw vrsal::Error("unknown command '" + command + "'");
    return it->second;
}

std::string default_out(const std::string& command) {
    const char* root = std::getenv("VRSAL_OUT_ROOT");
    return (fs::path(root ? root : ".") / ("vrsal_" + command)).string();
}

// Runs a command, then echoes config + report into the output directory.
void run_command(const std::string& command, const json& params, std::string outDir) {
    if (outDir.empty()) outDir = default_out(command);
    fs::create_directories(outDir);
    const json report = handler_for(command)(params, outDir);
    vrsal::write_json((fs::path(outDir) / "config.json").string(),
                      {{"command", command}, {"params", params}});
    vrsal::write_json((fs::path(outDir) / "report.json").string(), report);
    vrsal::write_text_report((fs::path(outDir) / "report.txt").string(), report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vrsal: saliency analysis toolkit for full-sphere panoramas"};
    app.require_subcommand(1);

    json params;
    std::string outDir;
    std::string activeCommand;

    auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", outDir, "output directory (default: $VRSAL_OUT_ROOT/vrsal_<cmd>)");
    };
    // stores a scalar option into the params object when given
    auto opt_d = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
        sub->add_option_function<double>(
            flag, [&params, key](double v) { params[key] = v; }, help);
    };
    auto opt_i = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
        sub->add_option_function<int>(flag, [&params, key](int v) { params[key] = v; }, help);
    };
    auto opt_s = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help, bool required = false) {
        auto* o = sub->add_option_function<std::string>(
            flag, [&params, key](const std::string& v) { params[key] = v; }, help);
        if (required) o->required();
    };
    auto opt_list = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                        const std::string& help, bool required = false) {
        auto* o = sub->add_option_function<std::vector<std::string>>(
            flag, [&params, key](const std::vector<std::string>& v) { params[key] = v; }, help);
        if (required) o->required();
    };
    auto opt_b = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
        sub->add_flag_function(
            flag, [&params, key](std::int64_t n) { params[key] = n > 0; }, help);
    };
    auto fix_opts = [&](CLI::App* sub) {
        opt_d(sub, "--min-dur", "min_dur_ms", "minimum fixation duration, ms");
        opt_d(sub, "--max-disp", "max_disp_deg", "dispersion threshold, deg (default 1, desktop 2)");
        opt_d(sub, "--max-gap", "max_gap_ms", "dropout gap that splits windows, ms");
        opt_i(sub, "--smooth-window", "smooth_window", "desktop running-average width, samples");
        opt_d(sub, "--vicinity", "vicinity_deg", "start vicinity, deg lon");
    };
    auto bias_opts = [&](CLI::App* sub) {
        opt_s(sub, "--bias", "bias_file", "equator bias record file");
        opt_d(sub, "--bias-mu", "bias_mu", "bias location, deg lat");
        opt_d(sub, "--bias-beta", "bias_beta", "bias diversity, deg");
    };

    {
        auto* synth = app.add_subcommand("synth", "generate ground-truth-known synthetic data");
        synth->require_subcommand(1);
        auto* traj = synth->add_subcommand("traj", "synthetic trajectory from a plan spec");
        opt_s(traj, "--spec", "spec", "synth spec JSON", true);
        add_out(traj);
        traj->callback([&] { params["mode"] = "traj"; activeCommand = "synth"; });
        auto* pano = synth->add_subcommand("pano", "synthetic blob panorama + analytic saliency");
        opt_s(pano, "--spec", "spec", "blob spec JSON", true);
        opt_i(pano, "--width", "width", "equirect width, px");
        add_out(pano);
        pano->callback([&] { params["mode"] = "pano"; activeCommand = "synth"; });
    }
    {
        auto* sub = app.add_subcommand("fixations", "detect fixations in a trajectory log");
        opt_s(sub, "--traj", "traj", "trajectory log", true);
        fix_opts(sub);
        opt_b(sub, "--start-filter", "start_filter", "drop fixations before leaving the start vicinity");
        add_out(sub);
        sub->callback([&] { activeCommand = "fixations"; });
    }
    {
        auto* sub = app.add_subcommand("salmap", "ground-truth saliency map from trajectories");
        opt_list(sub, "--traj", "traj", "trajectory logs");
        opt_list(sub, "--fixations", "fixations", "precomputed fixation files");
        opt_i(sub, "--width", "width", "map width, px (height = width/2)");
        opt_d(sub, "--sigma", "sigma_deg", "blur sigma, deg");
        fix_opts(sub);
        sub->add_flag_function("--no-start-filter",
                               [&params](std::int64_t) { params["start_filter"] = false; },
                               "keep fixations near the starting point");
        add_out(sub);
        sub->callback([&] { activeCommand = "salmap"; });
    }
    {
        auto* sub = app.add_subcommand("bias-fit", "fit the Laplace equator bias to a map");
        opt_s(sub, "--map", "map", "saliency map (pfm/png + sidecar)", true);
        add_out(sub);
        sub->callback([&] { activeCommand = "bias-fit"; });
    }
    {
        auto* sub = app.add_subcommand("entropy", "saliency-map entropy");
        opt_s(sub, "--map", "map", "saliency map", true);
        add_out(sub);
        sub->callback([&] { activeCommand = "entropy"; });
    }
    {
        auto* sub = app.add_subcommand("metrics", "behavioral metrics for one trajectory");
        opt_s(sub, "--traj", "traj", "trajectory log", true);
        opt_s(sub, "--map", "map", "converged ground-truth map", true);
        opt_d(sub, "--top-percent", "top_percent", "salient-region threshold, %");
        opt_d(sub, "--step", "step_sec", "convergence step, s");
        opt_d(sub, "--horizon", "horizon_sec", "convergence horizon, s");
        opt_d(sub, "--sigma", "sigma_deg", "blur sigma for per-step maps, deg");
        fix_opts(sub);
        add_out(sub);
        sub->callback([&] { activeCommand = "metrics"; });
    }
    {
        auto* sub = app.add_subcommand("congruency", "inter-observer congruency ROC");
        opt_s(sub, "--fixations", "fixations", "user fixation file", true);
        opt_s(sub, "--map", "map", "leave-one-out ground truth map", true);
        add_out(sub);
        sub->callback([&] { activeCommand = "congruency"; });
    }
    {
        auto* sub = app.add_subcommand("explore-curve", "exploration time vs longitudinal offset");
        opt_list(sub, "--traj", "traj", "trajectory logs", true);
        opt_d(sub, "--bin", "bin_deg", "offset bin size, deg");
        add_out(sub);
        sub->callback([&] { activeCommand = "explore-curve"; });
    }
    {
        auto* sub = app.add_subcommand("predict", "saliency prediction on a panorama");
        opt_s(sub, "--pano", "pano", "panorama image (png/pfm)");
        opt_s(sub, "--strategy", "strategy", "equirect | cubemap | patch");
        opt_i(sub, "--face-res", "face_res", "cubemap face resolution");
        opt_d(sub, "--fov", "fov_deg", "patch fov, deg");
        opt_d(sub, "--overlap", "overlap_deg", "patch overlap, deg");
        opt_i(sub, "--patch-res", "patch_res", "patch sampling resolution");
        bias_opts(sub);
        opt_b(sub, "--emit-units", "emit_units", "write projection units for an external predictor");
        opt_s(sub, "--from-units", "from_units", "stitch a completed unit manifest");
        add_out(sub);
        sub->callback([&] { activeCommand = "predict"; });
    }
    {
        auto* sub = app.add_subcommand("timedep", "time-dependent saliency window");
        opt_s(sub, "--converged", "converged", "converged saliency map", true);
        opt_s(sub, "--curve", "curve", "exploration curve JSON", true);
        sub->add_option_function<double>(
               "--start-lon", [&params](double v) { params["start_lon"] = v; }, "starting longitude")
            ->required();
        sub->add_option_function<double>(
               "--t", [&params](double v) { params["t_sec"] = v; }, "time since scene start, s")
            ->required();
        opt_d(sub, "--init-half-width", "init_half_width_deg", "initial window half-width, deg");
        add_out(sub);
        sub->callback([&] { activeCommand = "timedep"; });
    }
    {
        auto* sub = app.add_subcommand("headsal", "head-velocity-only saliency");
        opt_list(sub, "--traj", "traj", "trajectory logs", true);
        opt_i(sub, "--width", "width", "map width, px");
        opt_d(sub, "--speed-thresh", "speed_thresh", "head speed threshold, deg/s");
        opt_d(sub, "--blur", "blur_deg", "blur sigma, deg");
        sub->add_flag_function("--include-start",
                               [&params](std::int64_t) { params["exclude_start"] = false; },
                               "count samples inside the start vicinity too");
        opt_d(sub, "--vicinity", "vicinity_deg", "start vicinity, deg lon");
        add_out(sub);
        sub->callback([&] { activeCommand = "headsal"; });
    }
    {
        auto* sub = app.add_subcommand("align-cut", "longitudinal cut alignment of two maps");
        opt_s(sub, "--before", "before", "map of the last frame before the cut", true);
        opt_s(sub, "--after", "after", "map of the first frame after the cut", true);
        add_out(sub);
        sub->callback([&] { activeCommand = "align-cut"; });
    }
    {
        auto* sub = app.add_subcommand("thumbnail", "most-salient gnomonic window");
        opt_s(sub, "--map", "map", "saliency map", true);
        opt_s(sub, "--pano", "pano", "panorama image", true);
        opt_d(sub, "--fov", "fov_deg", "thumbnail fov, deg");
        opt_d(sub, "--step", "grid_step_deg", "search grid step, deg");
        opt_d(sub, "--weight-sigma", "weight_sigma_frac", "center weighting sigma, patch fraction");
        opt_i(sub, "--search-res", "search_res", "search sampling resolution");
        opt_i(sub, "--render-res", "render_res", "output patch resolution");
        opt_b(sub, "--refine", "refine", "extra quarter-step refinement pass");
        add_out(sub);
        sub->callback([&] { activeCommand = "thumbnail"; });
    }
    {
        auto* sub = app.add_subcommand("synopsis", "viewport path through per-frame saliency");
        opt_list(sub, "--frames", "frames", "per-frame saliency maps, in order", true);
        sub->add_option_function<int>(
               "--stride", [&params](int v) { params["stride"] = v; }, "keyframe stride, frames")
            ->required();
        sub->add_option_function<double>(
               "--neighborhood", [&params](double v) { params["neighborhood_deg"] = v; },
               "search neighborhood around the last window, deg")
            ->required();
        opt_d(sub, "--fov", "fov_deg", "window fov, deg");
        opt_d(sub, "--step", "grid_step_deg", "search grid step, deg");
        opt_d(sub, "--weight-sigma", "weight_sigma_frac", "center weighting sigma");
        opt_i(sub, "--search-res", "search_res", "search sampling resolution");
        add_out(sub);
        sub->callback([&] { activeCommand = "synopsis"; });
    }
    {
        auto* sub = app.add_subcommand("compress", "saliency-aware panorama compression");
        opt_s(sub, "--pano", "pano", "panorama image", true);
        opt_s(sub, "--map", "map", "saliency map", true);
        opt_i(sub, "--down", "down_factor", "per-dimension downsampling factor");
        opt_d(sub, "--top", "top_percent", "retained salient fraction, %");
        opt_d(sub, "--feather", "feather_deg", "blend feather, deg");
        opt_i(sub, "--face-res", "face_res", "cube face resolution (default width/4)");
        add_out(sub);
        sub->callback([&] { activeCommand = "compress"; });
    }

    std::string rerunConfig;
    {
        auto* sub = app.add_subcommand("rerun", "reproduce a run from its echoed config");
        sub->add_option("--config", rerunConfig, "config.json from a previous run")->required();
        sub->add_option("--out", outDir, "output directory")->required();
        sub->callback([&] { activeCommand = "rerun"; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (activeCommand == "rerun") {
            const json cfg = vrsal::read_json(rerunConfig);
            run_command(cfg.at("command").get<std::string>(), cfg.at("params"), outDir);
        } else {
            run_command(activeCommand, params, outDir);
        }
    } catch (const vrsal::Error& e) {
        std::cerr << "vrsal: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "vrsal: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
