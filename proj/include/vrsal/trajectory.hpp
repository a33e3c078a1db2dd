// Head/gaze trajectory ingestion, spherical I-DT fixation detection, and the
// kinematic statistics derived from head-gaze interaction.
#pragma once

#include "vrsal/sphere.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vrsal {

enum class Condition { VR, VRSeated, Desktop };
std::string condition_name(Condition c);
Condition parse_condition(const std::string& tag);

struct Sample {
    double tMs = 0;
    double headLonDeg = 0, headLatDeg = 0, headRollDeg = 0;
    double gazeLonDeg = 0, gazeLatDeg = 0;  // world frame
    std::optional<double> eyeLonDeg, eyeLatDeg;  // gaze relative to the head, if recorded
};

struct Trajectory {
    std::vector<Sample> samples;
    Condition condition = Condition::VR;
    std::string sceneId = "unknown";
    std::string userId = "unknown";
    double startLonDeg = 0;
    double sampleRateHz = 120;

    double span_ms() const {
        return samples.size() < 2 ? 0 : samples.back().tMs - samples.front().tMs;
    }
    SphericalDir gaze_dir(std::size_t i) const {
        return SphericalDir(samples[i].gazeLatDeg, samples[i].gazeLonDeg);
    }
    SphericalDir head_dir(std::size_t i) const {
        return SphericalDir(samples[i].headLatDeg, samples[i].headLonDeg);
    }
};

struct Fixation {
    double tStartMs = 0;
    double durationMs = 0;
    SphericalDir centroid;
};

// World gaze = head rotation (yaw = lon about +Z, then pitch = lat, then roll
// about the view axis) applied to the eye-in-head direction.
SphericalDir compose_gaze(double headLonDeg, double headLatDeg, double headRollDeg,
                          double eyeLonDeg, double eyeLatDeg);

// --- log format (see README: '#' metadata header, then CSV with named columns) --
Trajectory load_trajectory(std::istream& in);
Trajectory load_trajectory_file(const std::string& path);
void save_trajectory(std::ostream& out, const Trajectory& t);
void save_trajectory_file(const std::string& path, const Trajectory& t);

// --- fixation detection -------------------------------------------------------

struct FixationParams {
    double minDurMs = 150;
    double maxDispDeg = 1.0;
    // Tracker dropouts break any open window. 0 means 2x the nominal period.
    double maxGapMs = 0;
};

// Spherical I-DT: grow a sample window while the largest angular distance of
// any member from the running spherical centroid stays within maxDispDeg; emit
// when the window spans at least minDurMs. Windows are disjoint and ordered.
// A trajectory shorter than minDurMs yields an empty list.
std::vector<Fixation> detect_fixations(const Trajectory& traj, const FixationParams& p = {});

// Running average of `window` samples over gaze unit vectors, renormalized
// (the desktop pipeline then detects fixations at 2 degrees dispersion).
Trajectory smooth_desktop(const Trajectory& traj, int window = 2);

enum class AngularSignal { HeadLon, HeadLat, GazeLon, GazeLat, GazeRelHead };

// Per-sample angular velocity in deg/s: central differences with
// shortest-signed-angle wrap for longitudinal signals, one-sided at the ends.
std::vector<double> angular_velocity(const Trajectory& traj, AngularSignal signal);

// Lag (ms) maximizing the normalized cross-correlation of head vs gaze
// longitudinal acceleration; positive means the head lags the gaze.
double head_gaze_delay_ms(const Trajectory& traj, double maxLagMs = 500);

// Least-squares slope of gaze-relative-to-head velocity vs head velocity over
// samples inside fixation intervals (-1 = fully compensating VOR).
double vor_slope(const Trajectory& traj, const std::vector<Fixation>& fixations);

// Drops every fixation before the first one whose longitudinal offset from
// startLon exceeds vicinityDeg; everything after that is kept.
std::vector<Fixation> filter_start_vicinity(const std::vector<Fixation>& fixations,
                                            double startLonDeg, double vicinityDeg = 20);

}  // namespace vrsal
