#pragma once

// Independent reference implementations used by unit tests and the
// acceptance runner. Header-only and free of test-framework dependencies.

#include "repurpose/tracking/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using repurpose::geometry::Pose;
using repurpose::geometry::Quat;
using repurpose::tracking::Observation;
using repurpose::tracking::TrackerConfig;
using repurpose::tracking::TrackPhase;

/// Per-group Likert ratings of the recorded study prompts, one entry per
/// prompt, listed in ascending order.
inline const std::vector<int> kGroupA{3, 4, 4, 4, 4, 5, 5, 5, 5, 5, 6, 7, 7};
inline const std::vector<int> kGroupB{2, 2, 3, 3, 5, 5, 6, 7};
inline const std::vector<int> kGroupC{3, 4, 5, 6, 6, 7};

inline double quat_angle_deg(const Quat& a, const Quat& b)
{
    const double d = std::abs(a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z());
    return 2.0 * std::acos(std::min(1.0, d)) * 180.0 / std::numbers::pi;
}

inline bool visible(const Observation* prev, const Observation& o, const TrackerConfig& cfg)
{
    if (o.occlusion_fraction > cfg.occlusion_threshold)
        return false;
    if (!prev)
        return true;
    const double dt = o.t - prev->t;
    const auto d = o.true_pose.translation - prev->true_pose.translation;
    const double lin = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z()) / dt;
    const double ang = quat_angle_deg(prev->true_pose.rotation, o.true_pose.rotation) / dt;
    return lin <= cfg.max_linear_speed && ang <= cfg.max_angular_speed;
}

/// Expected phase per frame and the index of the observation whose pose is
/// published (-1 when nothing is published). Assumes zero noise.
struct Expected {
    TrackPhase phase;
    int source;
};

inline std::vector<Expected> enumerate(const std::vector<Observation>& obs, const TrackerConfig& cfg)
{
    std::vector<Expected> out;
    TrackPhase phase = TrackPhase::Initializing;
    int streak = 0;
    int source = -1;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const bool v = visible(i ? &obs[i - 1] : nullptr, obs[i], cfg);
        if (phase == TrackPhase::Tracking) {
            if (v) {
                source = static_cast<int>(i);
            } else {
                phase = TrackPhase::Lost;
                streak = 0;
            }
        } else if (v) {
            if (++streak == cfg.reacquire_frames) {
                phase = TrackPhase::Tracking;
                streak = 0;
                source = static_cast<int>(i);
            }
        } else {
            streak = 0;
        }
        out.push_back({phase, source});
    }
    return out;
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0, 1);
    Eigen::Vector3d v(n(rng), n(rng), n(rng));
    return v.norm() > 0 ? v.normalized() : Eigen::Vector3d::UnitX();
}

inline Quat random_quat(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0, 1);
    Quat q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized();
}

/// Random observation sequence. Each inter-frame step is either clearly within
/// or clearly beyond the default-ish speed limits so visibility is never a
/// floating-point tie.
inline std::vector<Observation> random_sequence(std::mt19937_64& rng, const TrackerConfig& cfg, int length)
{
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Observation> seq;
    Observation o;
    o.t = u(rng);
    o.true_pose.translation = {u(rng), u(rng), u(rng)};
    o.true_pose.rotation = random_quat(rng);
    for (int i = 0; i < length; ++i) {
        if (i > 0) {
            const double dt = 0.02 + 0.1 * u(rng);
            o.t += dt;
            const double r = u(rng);
            // Slow, too fast linearly, or too fast angularly.
            const double lin = r < 0.8 ? 0.5 * cfg.max_linear_speed * u(rng) : (r < 0.9 ? 1.5 : 0.0) * cfg.max_linear_speed;
            const double ang = r < 0.8 ? 0.5 * cfg.max_angular_speed * u(rng) : (r >= 0.9 ? 1.5 : 0.0) * cfg.max_angular_speed;
            const Eigen::Vector3d dir = random_unit(rng);
            o.true_pose.translation += dir * lin * dt;
            const Eigen::Vector3d axis = random_unit(rng);
            const double rad = std::min(ang * dt, 170.0) * std::numbers::pi / 180.0;
            o.true_pose.rotation = (Quat(Eigen::AngleAxisd(rad, axis)) * o.true_pose.rotation).normalized();
        }
        const double occ = u(rng);
        // Occlusion clustered on both sides of the threshold without touching it.
        o.occlusion_fraction = occ < 0.7 ? cfg.occlusion_threshold * 0.9 * u(rng)
                                         : std::min(1.0, cfg.occlusion_threshold * (1.1 + u(rng)));
        seq.push_back(o);
    }
    return seq;
}

/// Two-second trajectory with slow motion and full occlusion over
/// [occl_start, occl_end].
inline repurpose::tracking::Trajectory scripted_occlusion(double occl_start = 0.5, double occl_end = 1.0)
{
    using repurpose::tracking::Keyframe;
    const auto pose_at = [](double t) {
        Pose p;
        p.translation = {0.1 * t, 0.05 * t, 0.5};
        p.rotation = Quat(Eigen::AngleAxisd(t * 20.0 * std::numbers::pi / 180.0, Eigen::Vector3d::UnitY()));
        return p;
    };
    const double eps = 0.001;
    std::vector<Keyframe> k{{0.0, pose_at(0.0), 0.0},
                            {occl_start - eps, pose_at(occl_start - eps), 0.0},
                            {occl_start, pose_at(occl_start), 1.0},
                            {occl_end, pose_at(occl_end), 1.0},
                            {occl_end + eps, pose_at(occl_end + eps), 0.0},
                            {2.0, pose_at(2.0), 0.0}};
    return repurpose::tracking::Trajectory(std::move(k));
}

} // namespace oracle
