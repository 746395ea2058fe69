#include "repurpose/tracking/trajectory.hpp"

#include "repurpose/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace repurpose::tracking {

using geometry::Pose;
using nlohmann::json;

Trajectory::Trajectory(std::vector<Keyframe> keyframes) : keys_(std::move(keyframes))
{
    if (keys_.size() < 2)
        throw Error(ErrorKind::InvalidInput, "trajectory needs at least two keyframes");
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        const auto& k = keys_[i];
        if (!std::isfinite(k.t) || (i > 0 && !(k.t > keys_[i - 1].t)))
            throw Error(ErrorKind::InvalidInput, "keyframe times must be finite and strictly increasing");
        if (!(k.occlusion >= 0 && k.occlusion <= 1))
            throw Error(ErrorKind::InvalidInput, "keyframe occlusion must be in [0, 1]");
        if (!k.pose.translation.allFinite())
            throw Error(ErrorKind::InvalidInput, "keyframe translation must be finite");
    }
}

Observation Trajectory::sample(double t) const
{
    t = std::clamp(t, start(), end());
    auto it = std::upper_bound(keys_.begin(), keys_.end(), t, [](double v, const Keyframe& k) { return v < k.t; });
    if (it == keys_.end())
        --it;
    if (it == keys_.begin())
        ++it;
    const Keyframe& a = *(it - 1);
    const Keyframe& b = *it;
    const double s = (t - a.t) / (b.t - a.t);

    Observation o;
    o.t = t;
    o.true_pose.translation = a.pose.translation + s * (b.pose.translation - a.pose.translation);
    o.true_pose.rotation = a.pose.rotation.slerp(s, b.pose.rotation).normalized();
    o.occlusion_fraction = a.occlusion + s * (b.occlusion - a.occlusion);
    if (s == 0.0)
        o.true_pose = a.pose;
    else if (s == 1.0)
        o.true_pose = b.pose;
    return o;
}

std::vector<double> Trajectory::frame_times(double fps) const
{
    if (!(fps > 0))
        throw Error(ErrorKind::InvalidInput, "fps must be positive");
    std::vector<double> out;
    const double span = end() - start();
    // Tolerance absorbs k / fps landing a hair past the end.
    const auto count = static_cast<long>(std::floor(span * fps + 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k)
        out.push_back(start() + double(k) / fps);
    return out;
}

Trajectory parse_trajectory_json(std::string_view text)
{
    try {
        const auto j = json::parse(text);
        std::vector<Keyframe> keys;
        for (const auto& k : j.at("keyframes")) {
            Keyframe kf;
            kf.t = k.at("t").get<double>();
            const auto pos = k.at("pos").get<std::vector<double>>();
            const auto quat = k.at("quat").get<std::vector<double>>();
            if (pos.size() != 3 || quat.size() != 4)
                throw Error(ErrorKind::InvalidInput, "pos needs 3 and quat needs 4 components");
            kf.pose.translation = {pos[0], pos[1], pos[2]};
            kf.pose.rotation = geometry::unit_quaternion(quat[0], quat[1], quat[2], quat[3]);
            kf.occlusion = k.value("occlusion", 0.0);
            keys.push_back(kf);
        }
        return Trajectory(std::move(keys));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("trajectory JSON: ") + e.what());
    }
}

std::string trajectory_to_json(const Trajectory& traj)
{
    json keys = json::array();
    for (const auto& k : traj.keyframes()) {
        const auto& q = k.pose.rotation;
        const auto& p = k.pose.translation;
        keys.push_back({{"t", k.t},
                        {"pos", {p.x(), p.y(), p.z()}},
                        {"quat", {q.w(), q.x(), q.y(), q.z()}},
                        {"occlusion", k.occlusion}});
    }
    return json{{"keyframes", keys}}.dump();
}

PoseError TrackLog::max_error() const noexcept
{
    PoseError m;
    for (const auto& f : frames) {
        if (!f.error)
            continue;
        m.translation_m = std::max(m.translation_m, f.error->translation_m);
        m.rotation_deg = std::max(m.rotation_deg, f.error->rotation_deg);
    }
    return m;
}

TrackLog run_trajectory(const Trajectory& traj, const ModelTarget& target, const TrackerConfig& cfg)
{
    cfg.validate();
    std::mt19937_64 rng(cfg.rng_seed);
    TrackerState state;
    TrackLog log;
    std::optional<std::size_t> streak_start;

    for (double t : traj.frame_times(cfg.camera_fps)) {
        const Observation obs = traj.sample(t);
        const TrackPhase before = state.phase;
        state = tracker_step(state, obs, cfg, rng);

        if (state.last_visible) {
            if (!streak_start)
                streak_start = log.frames.size();
        } else {
            streak_start.reset();
        }

        FrameRecord rec;
        rec.t = obs.t;
        rec.true_pose = obs.true_pose;
        rec.phase = state.phase;
        rec.output_pose = state.output_pose;
        if (state.output_pose) {
            rec.anchor = anchor_pose(*state.output_pose, target);
            rec.error = pose_error(*rec.anchor, anchor_pose(obs.true_pose, target));
        }

        if (before == TrackPhase::Tracking && state.phase == TrackPhase::Lost) {
            log.episodes.push_back({obs.t, obs.t, 0.0, false, std::nullopt});
        } else if (before == TrackPhase::Lost && state.phase == TrackPhase::Tracking) {
            auto& ep = log.episodes.back();
            ep.end = obs.t;
            ep.duration = ep.end - ep.start;
            ep.resolved = true;
            if (streak_start)
                ep.visible_again = *streak_start < log.frames.size() ? log.frames[*streak_start].t : obs.t;
        }
        log.frames.push_back(std::move(rec));
    }

    if (!log.episodes.empty() && !log.episodes.back().resolved) {
        auto& ep = log.episodes.back();
        ep.end = log.frames.back().t;
        ep.duration = ep.end - ep.start;
    }
    return log;
}

std::string track_log_csv(const TrackLog& log)
{
    std::string out = "t,phase,err_t_m,err_r_deg\n";
    char buf[128];
    for (const auto& f : log.frames) {
        int n = 0;
        if (f.error)
            n = std::snprintf(buf, sizeof buf, "%.6f,%s,%.9g,%.9g\n", f.t, std::string(to_string(f.phase)).c_str(),
                              f.error->translation_m, f.error->rotation_deg);
        else
            n = std::snprintf(buf, sizeof buf, "%.6f,%s,,\n", f.t, std::string(to_string(f.phase)).c_str());
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

std::string episodes_json(const TrackLog& log)
{
    json eps = json::array();
    for (const auto& e : log.episodes) {
        json j{{"start", e.start}, {"end", e.end}, {"duration", e.duration}, {"resolved", e.resolved}};
        j["visible_again"] = e.visible_again ? json(*e.visible_again) : json(nullptr);
        eps.push_back(j);
    }
    return json{{"episodes", eps}, {"frames", log.frames.size()}}.dump(2);
}

} // namespace repurpose::tracking
