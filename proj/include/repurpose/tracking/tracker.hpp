#pragma once

#include "repurpose/geometry/pose.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace repurpose::tracking {

enum class TrackPhase { Initializing, Tracking, Lost };

std::string_view to_string(TrackPhase p) noexcept;

struct TrackerConfig {
    double camera_fps = 15.0;
    double noise_sigma_t = 0.0;   ///< meters, per axis
    double noise_sigma_r = 0.0;   ///< degrees, about a random axis
    double occlusion_threshold = 0.4;
    double max_linear_speed = 1.5;    ///< m/s
    double max_angular_speed = 180.0; ///< deg/s
    int reacquire_frames = 3;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct Observation {
    double t = 0;
    geometry::Pose true_pose;
    double occlusion_fraction = 0;
};

struct TrackerState {
    TrackPhase phase = TrackPhase::Initializing;
    /// Published pose; absent until the first acquisition, frozen while Lost.
    std::optional<geometry::Pose> output_pose;
    /// Time of the most recent visible observation.
    std::optional<double> last_true_seen;
    int consecutive_visible = 0;
    std::optional<Observation> previous;
    bool last_visible = false;
};

/// Whether the tracker can see the object in `obs`: occlusion at or below the
/// threshold and inter-frame motion within the speed limits.
bool is_visible(const std::optional<Observation>& previous, const Observation& obs, const TrackerConfig& cfg);

/// Advances the tracking state machine by one camera frame. Throws
/// TimeWentBackwards when `obs.t` does not increase.
TrackerState tracker_step(const TrackerState& state, const Observation& obs, const TrackerConfig& cfg,
                          std::mt19937_64& rng);

struct PoseError {
    double translation_m = 0;
    double rotation_deg = 0;
};

PoseError pose_error(const geometry::Pose& estimated, const geometry::Pose& truth);

} // namespace repurpose::tracking
