#include "repurpose/pipeline/session.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace repurpose::pipeline {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 9> kStageNames{{
    {Stage::Created, "Created"},
    {Stage::DepthPreprocessed, "DepthPreprocessed"},
    {Stage::ImageGenerated, "ImageGenerated"},
    {Stage::BackgroundRemoved, "BackgroundRemoved"},
    {Stage::MeshReconstructed, "MeshReconstructed"},
    {Stage::TargetBuilt, "TargetBuilt"},
    {Stage::Anchored, "Anchored"},
    {Stage::Failed, "Failed"},
    {Stage::Cancelled, "Cancelled"},
}};

ErrorKind parse_error_kind(std::string_view s)
{
    for (int k = 0; k <= static_cast<int>(ErrorKind::Internal); ++k)
        if (to_string(static_cast<ErrorKind>(k)) == s)
            return static_cast<ErrorKind>(k);
    throw Error(ErrorKind::ParseError, "unknown error kind '" + std::string(s) + "'");
}

json point(const imaging::PixelPoint& p) { return json::array({p.x, p.y}); }
imaging::PixelPoint point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

} // namespace

std::string_view to_string(Stage s) noexcept
{
    for (const auto& [stage, name] : kStageNames)
        if (stage == s)
            return name;
    return "?";
}

Stage parse_stage(std::string_view s)
{
    for (const auto& [stage, name] : kStageNames)
        if (name == s)
            return stage;
    throw Error(ErrorKind::ParseError, "unknown stage '" + std::string(s) + "'");
}

bool is_terminal(Stage s) noexcept
{
    return s == Stage::Anchored || s == Stage::Failed || s == Stage::Cancelled;
}

Stage next_stage(Stage s)
{
    if (is_terminal(s))
        throw Error(ErrorKind::InvalidTransition, "session is " + std::string(to_string(s)));
    return static_cast<Stage>(static_cast<int>(s) + 1);
}

int stage_index(Stage s)
{
    if (s == Stage::Failed || s == Stage::Cancelled)
        throw Error(ErrorKind::InvalidInput, "stage has no position: " + std::string(to_string(s)));
    return static_cast<int>(s);
}

std::string_view artifact_kind(Stage s)
{
    switch (s) {
    case Stage::DepthPreprocessed: return "depth_gray";
    case Stage::ImageGenerated: return "generated";
    case Stage::BackgroundRemoved: return "cutout";
    case Stage::MeshReconstructed: return "mesh_obj";
    case Stage::TargetBuilt: return "target_ref";
    case Stage::Anchored: return "anchor";
    default: break;
    }
    throw Error(ErrorKind::InvalidInput, "stage produces no artifact: " + std::string(to_string(s)));
}

Stage Session::last_completed() const
{
    Stage last = Stage::Created;
    for (const auto& h : history)
        if (h.stage != Stage::Failed && h.stage != Stage::Cancelled)
            last = h.stage;
    return last;
}

json to_json(const imaging::MaskReport& r)
{
    return {
        {"total_area", r.total_area},
        {"largest_component_area", r.largest_component_area},
        {"residual_fraction", r.residual_fraction},
        {"full_centroid", point(r.full_centroid)},
        {"component_centroid", point(r.component_centroid)},
        {"centroid_shift", r.centroid_shift},
        {"passed", r.passed},
    };
}

imaging::MaskReport mask_report_from_json(const json& j)
{
    imaging::MaskReport r;
    r.total_area = j.at("total_area").get<std::size_t>();
    r.largest_component_area = j.at("largest_component_area").get<std::size_t>();
    r.residual_fraction = j.at("residual_fraction").get<double>();
    r.full_centroid = point_from(j.at("full_centroid"));
    r.component_centroid = point_from(j.at("component_centroid"));
    r.centroid_shift = j.at("centroid_shift").get<double>();
    r.passed = j.at("passed").get<bool>();
    return r;
}

json to_json(const genai::GenerationConfig& c)
{
    return {
        {"prompt", c.prompt},
        {"seed", c.seed},
        {"control_mode", std::string(genai::to_string(c.control_mode))},
        {"control_type", "depth"},
        {"checkpoint_id", c.checkpoint_id},
        {"use_native_depth_estimation", c.use_native_depth_estimation},
    };
}

genai::GenerationConfig generation_config_from_json(const json& j)
{
    genai::GenerationConfig c;
    c.prompt = j.at("prompt").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.control_mode = genai::parse_control_mode(j.at("control_mode").get<std::string>());
    c.checkpoint_id = j.at("checkpoint_id").get<std::string>();
    c.use_native_depth_estimation = j.at("use_native_depth_estimation").get<bool>();
    return c;
}

json to_json(const Session& s)
{
    json history = json::array();
    for (const auto& h : s.history)
        history.push_back({{"stage", to_string(h.stage)}, {"at", h.at}});
    json ratings = json::array();
    json groups = json::array();
    for (const auto& r : s.ratings) {
        ratings.push_back(r.value);
        groups.push_back(r.group ? json(std::string(analytics::to_string(*r.group))) : json(nullptr));
    }
    json j{
        {"id", s.id},
        {"prompt", s.prompt},
        {"created_at", s.created_at},
        {"stage", to_string(s.stage)},
        {"config", to_json(s.config)},
        {"capture", s.capture},
        {"artifacts", s.artifacts},
        {"history", history},
        {"error", nullptr},
        {"mask_report", nullptr},
        {"ratings", ratings},
        {"rating_groups", groups},
    };
    if (s.error)
        j["error"] = {{"stage", to_string(s.error->stage)},
                      {"kind", to_string(s.error->kind)},
                      {"reason", s.error->reason}};
    if (s.mask_report)
        j["mask_report"] = to_json(*s.mask_report);
    return j;
}

Session session_from_json(const json& j)
{
    try {
        Session s;
        s.id = j.at("id").get<std::string>();
        s.prompt = j.at("prompt").get<std::string>();
        s.created_at = j.at("created_at").get<std::string>();
        s.stage = parse_stage(j.at("stage").get<std::string>());
        s.config = generation_config_from_json(j.at("config"));
        s.capture = j.at("capture").get<std::map<std::string, std::string>>();
        s.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
        for (const auto& h : j.at("history"))
            s.history.push_back({parse_stage(h.at("stage").get<std::string>()), h.at("at").get<std::string>()});
        if (const auto& e = j.at("error"); !e.is_null())
            s.error = StageError{parse_stage(e.at("stage").get<std::string>()),
                                 parse_error_kind(e.at("kind").get<std::string>()), e.at("reason").get<std::string>()};
        if (const auto& m = j.at("mask_report"); !m.is_null())
            s.mask_report = mask_report_from_json(m);
        const auto& ratings = j.at("ratings");
        const auto& groups = j.at("rating_groups");
        for (std::size_t i = 0; i < ratings.size(); ++i) {
            Rating r{ratings.at(i).get<int>(), std::nullopt};
            if (i < groups.size() && !groups.at(i).is_null())
                r.group = analytics::parse_group(groups.at(i).get<std::string>());
            s.ratings.push_back(r);
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("session record: ") + e.what());
    }
}

json created_event(const Session& initial, const std::string& at)
{
    return {{"event", "created"}, {"at", at}, {"session", to_json(initial)}};
}

json stage_event(Stage stage, const std::string& artifact, const std::optional<imaging::MaskReport>& report,
                 const std::string& at)
{
    json e{{"event", "stage_completed"}, {"at", at}, {"stage", to_string(stage)}, {"artifact", artifact}};
    if (report)
        e["mask_report"] = to_json(*report);
    return e;
}

json failed_event(const StageError& err, const std::optional<imaging::MaskReport>& report, const std::string& at)
{
    json e{{"event", "failed"},
           {"at", at},
           {"stage", to_string(err.stage)},
           {"kind", to_string(err.kind)},
           {"reason", err.reason}};
    if (report)
        e["mask_report"] = to_json(*report);
    return e;
}

json cancelled_event(const std::string& at)
{
    return {{"event", "cancelled"}, {"at", at}};
}

json rating_event(const Rating& r, const std::string& at)
{
    json e{{"event", "rating"}, {"at", at}, {"rating", r.value}, {"group", nullptr}};
    if (r.group)
        e["group"] = std::string(analytics::to_string(*r.group));
    return e;
}

void apply_event(Session& s, const json& event)
{
    const std::string type = event.at("event").get<std::string>();
    const std::string at = event.at("at").get<std::string>();
    if (type == "created") {
        if (!s.id.empty())
            throw Error(ErrorKind::InvalidTransition, "session already created");
        s = session_from_json(event.at("session"));
        return;
    }
    if (s.id.empty())
        throw Error(ErrorKind::InvalidTransition, type + " event before created");
    if (type == "rating") {
        Rating r{event.at("rating").get<int>(), std::nullopt};
        if (const auto& g = event.at("group"); !g.is_null())
            r.group = analytics::parse_group(g.get<std::string>());
        s.ratings.push_back(r);
        return;
    }
    if (is_terminal(s.stage))
        throw Error(ErrorKind::InvalidTransition,
                    type + " event on " + std::string(to_string(s.stage)) + " session " + s.id);
    if (type == "stage_completed") {
        const Stage stage = parse_stage(event.at("stage").get<std::string>());
        if (stage != next_stage(s.stage))
            throw Error(ErrorKind::InvalidTransition, "stage " + std::string(to_string(stage)) + " does not follow " +
                                                          std::string(to_string(s.stage)));
        s.stage = stage;
        s.artifacts[std::string(artifact_kind(stage))] = event.at("artifact").get<std::string>();
        if (event.contains("mask_report"))
            s.mask_report = mask_report_from_json(event.at("mask_report"));
        s.history.push_back({stage, at});
    } else if (type == "failed") {
        const Stage stage = parse_stage(event.at("stage").get<std::string>());
        s.error = StageError{stage, parse_error_kind(event.at("kind").get<std::string>()),
                             event.at("reason").get<std::string>()};
        if (event.contains("mask_report"))
            s.mask_report = mask_report_from_json(event.at("mask_report"));
        s.stage = Stage::Failed;
        s.history.push_back({Stage::Failed, at});
    } else if (type == "cancelled") {
        s.stage = Stage::Cancelled;
        s.history.push_back({Stage::Cancelled, at});
    } else {
        throw Error(ErrorKind::ParseError, "unknown event '" + type + "'");
    }
}

Session replay_events(std::string_view jsonl)
{
    Session s;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < jsonl.size()) {
        const std::size_t nl = jsonl.find('\n', pos);
        const bool last = nl == std::string_view::npos;
        const std::string_view line = jsonl.substr(pos, last ? std::string_view::npos : nl - pos);
        pos = last ? jsonl.size() : nl + 1;
        ++line_no;
        if (line.empty())
            continue;
        json event;
        try {
            event = json::parse(line);
        } catch (const json::parse_error& e) {
            // An append cut short leaves a partial line with no newline.
            if (last)
                break;
            throw Error(ErrorKind::ParseError, "event log line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            apply_event(s, event);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::ParseError, "event log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (s.id.empty())
        throw Error(ErrorKind::ParseError, "event log has no created event");
    return s;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    const std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
    return buf;
}

} // namespace repurpose::pipeline
