#include "vrsal/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>

namespace vrsal {

std::string condition_name(Condition c) {
    switch (c) {
        case Condition::VR: return "VR";
        case Condition::VRSeated: return "VR-seated";
        case Condition::Desktop: return "desktop";
    }
    throw Error("condition_name: bad condition");
}

Condition parse_condition(const std::string& tag) {
    if (tag == "VR") return Condition::VR;
    if (tag == "VR-seated") return Condition::VRSeated;
    if (tag == "desktop") return Condition::Desktop;
    throw Error("unknown condition tag '" + tag + "'");
}

// --- gaze composition ----------------------------------------------------------

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

Vec3 mat_apply(const Mat3& m, const Vec3& v) {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

Mat3 rot_x(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}
Mat3 rot_y(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
Mat3 rot_z(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

Mat3 head_rotation(double headLonDeg, double headLatDeg, double headRollDeg) {
    // yaw about +Z, pitch toward +lat, roll about the view axis (applied first)
    return mat_mul(rot_z(deg2rad(headLonDeg)),
                   mat_mul(rot_y(-deg2rad(headLatDeg)), rot_x(deg2rad(headRollDeg))));
}

}  // namespace

SphericalDir compose_gaze(double headLonDeg, double headLatDeg, double headRollDeg,
                          double eyeLonDeg, double eyeLatDeg) {
    const Mat3 r = head_rotation(headLonDeg, headLatDeg, headRollDeg);
    return to_spherical(mat_apply(r, to_unit(SphericalDir(eyeLatDeg, eyeLonDeg))));
}

// --- log format -----------------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        // trim
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

double parse_num(const std::string& s, int row, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error("trajectory row " + std::to_string(row) + ": bad " + what + " value '" + s + "'");
    }
}

}  // namespace

Trajectory load_trajectory(std::istream& in) {
    Trajectory t;
    std::string line;
    int lineNo = 0;
    bool headerSeen = false;
    std::vector<std::string> cols;
    int idxT = -1, idxHLon = -1, idxHLat = -1, idxHRoll = -1;
    int idxGLon = -1, idxGLat = -1, idxELon = -1, idxELat = -1;
    int row = 0;

    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = line.substr(1, colon - 1);
            std::string val = line.substr(colon + 1);
            auto trim = [](std::string& s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
            };
            trim(key);
            trim(val);
            if (key == "scene") t.sceneId = val;
            else if (key == "user") t.userId = val;
            else if (key == "condition") t.condition = parse_condition(val);
            else if (key == "start_lon") t.startLonDeg = wrap_lon(std::stod(val));
            else if (key == "rate_hz") t.sampleRateHz = std::stod(val);
            continue;
        }
        if (!headerSeen) {
            cols = split_csv(line);
            for (int i = 0; i < int(cols.size()); ++i) {
                if (cols[i] == "t_ms") idxT = i;
                else if (cols[i] == "head_lon") idxHLon = i;
                else if (cols[i] == "head_lat") idxHLat = i;
                else if (cols[i] == "head_roll") idxHRoll = i;
                else if (cols[i] == "gaze_lon") idxGLon = i;
                else if (cols[i] == "gaze_lat") idxGLat = i;
                else if (cols[i] == "eye_lon") idxELon = i;
                else if (cols[i] == "eye_lat") idxELat = i;
            }
            if (idxT < 0 || idxHLon < 0 || idxHLat < 0 || idxHRoll < 0)
                throw Error("trajectory header: missing mandatory columns (t_ms, head_lon, head_lat, head_roll)");
            if ((idxGLon < 0 || idxGLat < 0) && (idxELon < 0 || idxELat < 0))
                throw Error("trajectory header: need gaze_lon/gaze_lat or eye_lon/eye_lat columns");
            headerSeen = true;
            continue;
        }
        ++row;
        const auto cells = split_csv(line);
        if (cells.size() != cols.size())
            throw Error("trajectory row " + std::to_string(row) + ": expected " +
                        std::to_string(cols.size()) + " columns, got " + std::to_string(cells.size()));
        Sample s;
        s.tMs = parse_num(cells[idxT], row, "t_ms");
        s.headLonDeg = wrap_lon(parse_num(cells[idxHLon], row, "head_lon"));
        s.headLatDeg = parse_num(cells[idxHLat], row, "head_lat");
        s.headRollDeg = parse_num(cells[idxHRoll], row, "head_roll");
        if (idxELon >= 0 && idxELat >= 0) {
            s.eyeLonDeg = wrap_lon(parse_num(cells[idxELon], row, "eye_lon"));
            s.eyeLatDeg = parse_num(cells[idxELat], row, "eye_lat");
        }
        if (idxGLon >= 0 && idxGLat >= 0) {
            s.gazeLonDeg = wrap_lon(parse_num(cells[idxGLon], row, "gaze_lon"));
            s.gazeLatDeg = parse_num(cells[idxGLat], row, "gaze_lat");
        } else {
            const SphericalDir g =
                compose_gaze(s.headLonDeg, s.headLatDeg, s.headRollDeg, *s.eyeLonDeg, *s.eyeLatDeg);
            s.gazeLonDeg = g.lon;
            s.gazeLatDeg = g.lat;
        }
        if (!t.samples.empty() && s.tMs <= t.samples.back().tMs)
            throw Error("trajectory row " + std::to_string(row) +
                        ": non-monotone timestamp " + std::to_string(s.tMs) + " ms");
        t.samples.push_back(s);
    }
    if (t.samples.size() < 2) throw Error("trajectory: needs at least 2 samples");
    return t;
}

Trajectory load_trajectory_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_trajectory: cannot open " + path);
    try {
        return load_trajectory(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

void save_trajectory(std::ostream& out, const Trajectory& t) {
    out << "# scene: " << t.sceneId << "\n# user: " << t.userId
        << "\n# condition: " << condition_name(t.condition) << "\n# start_lon: " << t.startLonDeg
        << "\n# rate_hz: " << t.sampleRateHz << "\n";
    const bool eye = !t.samples.empty() && t.samples.front().eyeLonDeg.has_value();
    out << "t_ms,head_lon,head_lat,head_roll,gaze_lon,gaze_lat";
    if (eye) out << ",eye_lon,eye_lat";
    out << "\n";
    out.precision(17);
    for (const Sample& s : t.samples) {
        out << s.tMs << ',' << s.headLonDeg << ',' << s.headLatDeg << ',' << s.headRollDeg << ','
            << s.gazeLonDeg << ',' << s.gazeLatDeg;
        if (eye) out << ',' << s.eyeLonDeg.value_or(0) << ',' << s.eyeLatDeg.value_or(0);
        out << "\n";
    }
}

void save_trajectory_file(const std::string& path, const Trajectory& t) {
    std::ofstream out(path);
    if (!out) throw Error("save_trajectory: cannot open " + path);
    save_trajectory(out, t);
}

// --- fixation detection -------------------------------------------------------------

namespace {

SphericalDir window_centroid(std::span<const Vec3> dirs, std::size_t i, std::size_t j) {
    Vec3 sum{};
    for (std::size_t k = i; k <= j; ++k) sum = sum + dirs[k];
    if (norm(sum) == 0) throw Error("detect_fixations: degenerate window (zero mean vector)");
    return to_spherical(sum);
}

bool window_ok(std::span<const Vec3> dirs, std::size_t i, std::size_t j, double maxDispDeg) {
    const Vec3 c = to_unit(window_centroid(dirs, i, j));
    for (std::size_t k = i; k <= j; ++k)
        if (angular_distance(dirs[k], c) > maxDispDeg) return false;
    return true;
}

}  // namespace

std::vector<Fixation> detect_fixations(const Trajectory& traj, const FixationParams& p) {
    if (p.minDurMs <= 0 || p.maxDispDeg <= 0) throw Error("detect_fixations: bad thresholds");
    const auto& s = traj.samples;
    std::vector<Fixation> out;
    if (traj.span_ms() < p.minDurMs) return out;  // too short; caller may warn

    const double maxGap = (p.maxGapMs > 0) ? p.maxGapMs : 2.0 * 1000.0 / traj.sampleRateHz;
    std::vector<Vec3> dirs(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) dirs[k] = to_unit(traj.gaze_dir(k));

    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && s[j + 1].tMs - s[j].tMs <= maxGap && window_ok(dirs, i, j + 1, p.maxDispDeg))
            ++j;
        if (s[j].tMs - s[i].tMs >= p.minDurMs) {
            out.push_back({s[i].tMs, s[j].tMs - s[i].tMs, window_centroid(dirs, i, j)});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

Trajectory smooth_desktop(const Trajectory& traj, int window) {
    if (traj.condition != Condition::Desktop)
        throw Error("smooth_desktop: trajectory condition is not desktop");
    if (window < 1) throw Error("smooth_desktop: window must be >= 1");
    Trajectory out = traj;
    std::vector<Vec3> dirs(traj.samples.size());
    for (std::size_t k = 0; k < dirs.size(); ++k) dirs[k] = to_unit(traj.gaze_dir(k));
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        Vec3 sum{};
        const std::size_t lo = (k + 1 >= std::size_t(window)) ? k + 1 - window : 0;
        for (std::size_t m = lo; m <= k; ++m) sum = sum + dirs[m];
        const SphericalDir d = to_spherical(sum);
        out.samples[k].gazeLonDeg = d.lon;
        out.samples[k].gazeLatDeg = d.lat;
    }
    return out;
}

// --- kinematics ---------------------------------------------------------------------

namespace {

std::vector<double> signal_series(const Trajectory& traj, AngularSignal sig) {
    std::vector<double> v(traj.samples.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const Sample& s = traj.samples[k];
        switch (sig) {
            case AngularSignal::HeadLon: v[k] = s.headLonDeg; break;
            case AngularSignal::HeadLat: v[k] = s.headLatDeg; break;
            case AngularSignal::GazeLon: v[k] = s.gazeLonDeg; break;
            case AngularSignal::GazeLat: v[k] = s.gazeLatDeg; break;
            case AngularSignal::GazeRelHead: v[k] = lon_diff(s.gazeLonDeg, s.headLonDeg); break;
        }
    }
    return v;
}

bool is_wrapped(AngularSignal sig) {
    return sig == AngularSignal::HeadLon || sig == AngularSignal::GazeLon ||
           sig == AngularSignal::GazeRelHead;
}

std::vector<double> central_diff(const std::vector<double>& v, const std::vector<double>& tMs,
                                 bool wrapped) {
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    auto delta = [&](double a, double b) { return wrapped ? lon_diff(a, b) : a - b; };
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = (k == 0) ? 0 : k - 1;
        const std::size_t b = (k + 1 == n) ? n - 1 : k + 1;
        const double dt = (tMs[b] - tMs[a]) / 1000.0;
        // wrapped differences accumulated stepwise so spans > 180 deg stay correct
        double dv = 0;
        for (std::size_t m = a; m < b; ++m) dv += delta(v[m + 1], v[m]);
        d[k] = dv / dt;
    }
    return d;
}

std::vector<double> times_ms(const Trajectory& traj) {
    std::vector<double> t(traj.samples.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = traj.samples[k].tMs;
    return t;
}

}  // namespace

std::vector<double> angular_velocity(const Trajectory& traj, AngularSignal signal) {
    if (traj.samples.size() < 2) throw Error("angular_velocity: needs at least 2 samples");
    return central_diff(signal_series(traj, signal), times_ms(traj), is_wrapped(signal));
}

double head_gaze_delay_ms(const Trajectory& traj, double maxLagMs) {
    if (traj.span_ms() < 1000) throw Error("head_gaze_delay: needs at least 1 s of data");
    const auto t = times_ms(traj);
    const auto headVel = central_diff(signal_series(traj, AngularSignal::HeadLon), t, true);
    const auto gazeVel = central_diff(signal_series(traj, AngularSignal::GazeLon), t, true);
    const auto headAcc = central_diff(headVel, t, false);
    const auto gazeAcc = central_diff(gazeVel, t, false);

    const double dtMs = traj.span_ms() / double(traj.samples.size() - 1);
    const int maxLag = std::max(1, int(std::lround(maxLagMs / dtMs)));
    const int n = int(headAcc.size());

    double bestCorr = -2;
    int bestLag = 0;
    for (int lag = -maxLag; lag <= maxLag; ++lag) {
        // head[i] vs gaze[i - lag]; positive lag = head follows gaze
        const int lo = std::max(0, lag);
        const int hi = std::min(n, n + lag);
        const int m = hi - lo;
        if (m < 8) continue;
        double sh = 0, sg = 0, shh = 0, sgg = 0, shg = 0;
        for (int i = lo; i < hi; ++i) {
            const double h = headAcc[i], g = gazeAcc[i - lag];
            sh += h;
            sg += g;
            shh += h * h;
            sgg += g * g;
            shg += h * g;
        }
        const double varH = shh - sh * sh / m;
        const double varG = sgg - sg * sg / m;
        if (varH <= 0 || varG <= 0)
            throw Error("head_gaze_delay: degenerate (constant) acceleration series");
        const double corr = (shg - sh * sg / m) / std::sqrt(varH * varG);
        if (corr > bestCorr) {
            bestCorr = corr;
            bestLag = lag;
        }
    }
    return bestLag * dtMs;
}

double vor_slope(const Trajectory& traj, const std::vector<Fixation>& fixations) {
    const auto t = times_ms(traj);
    const auto headVel = central_diff(signal_series(traj, AngularSignal::HeadLon), t, true);
    const auto relVel = central_diff(signal_series(traj, AngularSignal::GazeRelHead), t, true);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    std::size_t fi = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        while (fi < fixations.size() && t[k] > fixations[fi].tStartMs + fixations[fi].durationMs) ++fi;
        if (fi >= fixations.size()) break;
        if (t[k] < fixations[fi].tStartMs) continue;
        sx += headVel[k];
        sy += relVel[k];
        sxx += headVel[k] * headVel[k];
        sxy += headVel[k] * relVel[k];
        ++m;
    }
    if (m < 10) throw Error("vor_slope: fewer than 10 fixation samples");
    const double denom = sxx - sx * sx / m;
    if (denom <= 1e-12) throw Error("vor_slope: head velocity is constant within fixations");
    return (sxy - sx * sy / m) / denom;
}

std::vector<Fixation> filter_start_vicinity(const std::vector<Fixation>& fixations,
                                            double startLonDeg, double vicinityDeg) {
    std::size_t first = fixations.size();
    for (std::size_t k = 0; k < fixations.size(); ++k) {
        if (std::fabs(lon_diff(fixations[k].centroid.lon, startLonDeg)) > vicinityDeg) {
            first = k;
            break;
        }
    }
    return {fixations.begin() + first, fixations.end()};
}

}  // namespace vrsal
