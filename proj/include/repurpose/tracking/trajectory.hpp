#pragma once

#include "repurpose/tracking/model_target.hpp"
#include "repurpose/tracking/tracker.hpp"

#include <string>
#include <vector>

namespace repurpose::tracking {

struct Keyframe {
    double t = 0;
    geometry::Pose pose;
    double occlusion = 0;
};

/// Ground-truth motion of the physical object: linear in translation and
/// occlusion, slerp in rotation between keyframes.
class Trajectory {
public:
    /// Needs >= 2 keyframes with strictly increasing times and occlusion in [0, 1].
    explicit Trajectory(std::vector<Keyframe> keyframes);

    double start() const noexcept { return keys_.front().t; }
    double end() const noexcept { return keys_.back().t; }
    const std::vector<Keyframe>& keyframes() const noexcept { return keys_; }

    /// Clamped to [start, end].
    Observation sample(double t) const;

    /// Camera frame times start + k / fps that fall inside [start, end].
    std::vector<double> frame_times(double fps) const;

private:
    std::vector<Keyframe> keys_;
};

/// {"keyframes": [{"t", "pos": [x,y,z], "quat": [w,x,y,z], "occlusion"}]}
Trajectory parse_trajectory_json(std::string_view text);
std::string trajectory_to_json(const Trajectory& traj);

struct FrameRecord {
    double t = 0;
    geometry::Pose true_pose;
    TrackPhase phase = TrackPhase::Initializing;
    std::optional<geometry::Pose> output_pose;
    std::optional<geometry::Pose> anchor;
    std::optional<PoseError> error; ///< anchor vs ground-truth anchor
};

struct LossEpisode {
    double start = 0; ///< first Lost frame
    double end = 0;   ///< frame at which tracking resumed, or the last frame
    double duration = 0;
    bool resolved = false;
    /// First frame of the visible streak that ended the episode.
    std::optional<double> visible_again;
};

struct TrackLog {
    std::vector<FrameRecord> frames;
    std::vector<LossEpisode> episodes;

    PoseError max_error() const noexcept;
};

/// Drives the tracker at the camera cadence along `traj` and records the
/// anchored pose of the virtual mesh for every frame.
TrackLog run_trajectory(const Trajectory& traj, const ModelTarget& target, const TrackerConfig& cfg);

/// Columns t, phase, err_t_m, err_r_deg; errors are empty without output.
std::string track_log_csv(const TrackLog& log);
std::string episodes_json(const TrackLog& log);

} // namespace repurpose::tracking
