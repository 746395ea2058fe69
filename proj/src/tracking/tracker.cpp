#include "repurpose/tracking/tracker.hpp"

#include "repurpose/error.hpp"

#include <cmath>
#include <numbers>

namespace repurpose::tracking {

using geometry::Pose;

std::string_view to_string(TrackPhase p) noexcept
{
    switch (p) {
    case TrackPhase::Initializing: return "Initializing";
    case TrackPhase::Tracking: return "Tracking";
    case TrackPhase::Lost: return "Lost";
    }
    return "Initializing";
}

void TrackerConfig::validate() const
{
    if (!(camera_fps > 0))
        throw Error(ErrorKind::InvalidInput, "camera_fps must be positive");
    if (!(occlusion_threshold > 0 && occlusion_threshold <= 1))
        throw Error(ErrorKind::InvalidInput, "occlusion_threshold must be in (0, 1]");
    if (!(max_linear_speed > 0) || !(max_angular_speed > 0))
        throw Error(ErrorKind::InvalidInput, "speed limits must be positive");
    if (!(noise_sigma_t >= 0) || !(noise_sigma_r >= 0))
        throw Error(ErrorKind::InvalidInput, "noise sigmas must be non-negative");
    if (reacquire_frames < 1)
        throw Error(ErrorKind::InvalidInput, "reacquire_frames must be at least 1");
}

bool is_visible(const std::optional<Observation>& previous, const Observation& obs, const TrackerConfig& cfg)
{
    if (obs.occlusion_fraction > cfg.occlusion_threshold)
        return false;
    if (!previous)
        return true;
    const double dt = obs.t - previous->t;
    const double linear = (obs.true_pose.translation - previous->true_pose.translation).norm() / dt;
    const double angular = geometry::rotation_angle_deg(previous->true_pose.rotation, obs.true_pose.rotation) / dt;
    return linear <= cfg.max_linear_speed && angular <= cfg.max_angular_speed;
}

namespace {

Pose perturb(const Pose& truth, const TrackerConfig& cfg, std::mt19937_64& rng)
{
    Pose out = truth;
    if (cfg.noise_sigma_t > 0) {
        std::normal_distribution<double> n(0.0, cfg.noise_sigma_t);
        for (int a = 0; a < 3; ++a)
            out.translation[a] += n(rng);
    }
    if (cfg.noise_sigma_r > 0) {
        std::normal_distribution<double> unit(0.0, 1.0);
        geometry::Vec3 axis(unit(rng), unit(rng), unit(rng));
        if (axis.norm() == 0)
            axis = geometry::Vec3::UnitZ();
        axis.normalize();
        std::normal_distribution<double> angle(0.0, cfg.noise_sigma_r * std::numbers::pi / 180.0);
        const geometry::Quat noise(Eigen::AngleAxisd(angle(rng), axis));
        out.rotation = (noise * truth.rotation).normalized();
    }
    return out;
}

} // namespace

TrackerState tracker_step(const TrackerState& state, const Observation& obs, const TrackerConfig& cfg,
                          std::mt19937_64& rng)
{
    if (state.previous && !(obs.t > state.previous->t))
        throw Error(ErrorKind::TimeWentBackwards, "observation at t=" + std::to_string(obs.t) +
                                                      " does not follow t=" + std::to_string(state.previous->t));

    TrackerState next = state;
    const bool visible = is_visible(state.previous, obs, cfg);
    next.previous = obs;
    next.last_visible = visible;
    if (visible)
        next.last_true_seen = obs.t;

    switch (state.phase) {
    case TrackPhase::Tracking:
        if (visible) {
            next.output_pose = perturb(obs.true_pose, cfg, rng);
        } else {
            next.phase = TrackPhase::Lost;
            next.consecutive_visible = 0;
        }
        break;
    case TrackPhase::Lost:
    case TrackPhase::Initializing:
        if (visible) {
            ++next.consecutive_visible;
            if (next.consecutive_visible >= cfg.reacquire_frames) {
                next.phase = TrackPhase::Tracking;
                next.consecutive_visible = 0;
                next.output_pose = perturb(obs.true_pose, cfg, rng);
            }
        } else {
            next.consecutive_visible = 0;
        }
        break;
    }
    return next;
}

PoseError pose_error(const Pose& estimated, const Pose& truth)
{
    return {(estimated.translation - truth.translation).norm(),
            geometry::rotation_angle_deg(estimated.rotation, truth.rotation)};
}

} // namespace repurpose::tracking
