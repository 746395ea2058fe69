#pragma once

#include "repurpose/analytics/records.hpp"
#include "repurpose/error.hpp"
#include "repurpose/genai/config.hpp"
#include "repurpose/imaging/mask.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repurpose::pipeline {

enum class Stage {
    Created,
    DepthPreprocessed,
    ImageGenerated,
    BackgroundRemoved,
    MeshReconstructed,
    TargetBuilt,
    Anchored,
    Failed,
    Cancelled,
};

std::string_view to_string(Stage s) noexcept;
Stage parse_stage(std::string_view s);
/// Anchored, Failed and Cancelled.
bool is_terminal(Stage s) noexcept;
/// Stage following `s` on the happy path. Throws InvalidTransition for terminal stages.
Stage next_stage(Stage s);
/// Position on the happy path, Created = 0 .. Anchored = 6.
int stage_index(Stage s);
/// Artifact kind produced by a working stage ("depth_gray", ..., "anchor").
std::string_view artifact_kind(Stage s);

/// The working stages in execution order.
inline constexpr Stage kWorkingStages[] = {
    Stage::DepthPreprocessed, Stage::ImageGenerated,  Stage::BackgroundRemoved,
    Stage::MeshReconstructed, Stage::TargetBuilt,     Stage::Anchored,
};

struct StageError {
    Stage stage = Stage::Created;
    ErrorKind kind = ErrorKind::Internal;
    std::string reason;
};

struct HistoryEntry {
    Stage stage = Stage::Created;
    std::string at;
};

struct Rating {
    int value = 0;
    std::optional<analytics::Group> group;
};

struct Session {
    std::string id;
    std::string prompt;
    std::string created_at;
    Stage stage = Stage::Created;
    genai::GenerationConfig config;
    /// capture_rgb, capture_depth, capture_intrinsics and optionally capture_mask.
    std::map<std::string, std::string> capture;
    /// One entry per completed working stage, keyed by artifact kind.
    std::map<std::string, std::string> artifacts;
    std::vector<HistoryEntry> history;
    std::optional<StageError> error;
    std::optional<imaging::MaskReport> mask_report;
    std::vector<Rating> ratings;

    /// Last happy-path stage reached (the stage itself unless terminal by failure/cancel).
    Stage last_completed() const;
};

nlohmann::json to_json(const Session& s);
Session session_from_json(const nlohmann::json& j);

nlohmann::json to_json(const imaging::MaskReport& r);
imaging::MaskReport mask_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const genai::GenerationConfig& c);
genai::GenerationConfig generation_config_from_json(const nlohmann::json& j);

// Event log. Each line of {id}.events.jsonl is one event; folding them in
// order with apply_event rebuilds the session.

nlohmann::json created_event(const Session& initial, const std::string& at);
nlohmann::json stage_event(Stage stage, const std::string& artifact, const std::optional<imaging::MaskReport>& report,
                           const std::string& at);
nlohmann::json failed_event(const StageError& err, const std::optional<imaging::MaskReport>& report,
                            const std::string& at);
nlohmann::json cancelled_event(const std::string& at);
nlohmann::json rating_event(const Rating& r, const std::string& at);

/// Applies one event. Throws InvalidTransition when the event would move the
/// session backwards or out of a terminal stage.
void apply_event(Session& s, const nlohmann::json& event);

/// Folds a JSONL event log. A torn final line (from an interrupted append) is
/// ignored; a malformed line elsewhere throws ParseError.
Session replay_events(std::string_view jsonl);

/// UTC, millisecond precision, e.g. 2024-05-01T12:00:00.000Z.
std::string utc_timestamp();

} // namespace repurpose::pipeline
