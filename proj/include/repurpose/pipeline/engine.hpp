#pragma once

#include "repurpose/genai/backend.hpp"
#include "repurpose/imaging/colormap.hpp"
#include "repurpose/imaging/mask.hpp"
#include "repurpose/pipeline/artifact_store.hpp"
#include "repurpose/pipeline/capture.hpp"
#include "repurpose/pipeline/session.hpp"
#include "repurpose/tracking/model_target.hpp"
#include "repurpose/tracking/tracker.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace repurpose::pipeline {

enum class DepthRoute {
    Colormap, ///< depth -> camera colormap -> grayscale, as the headset delivers it
    Direct,   ///< depth -> grayscale
};

enum class ValidationMode { Fail, Warn };

struct EngineOptions {
    std::filesystem::path root = "repurpose-data";
    double near_m = 0.2;
    double far_m = 2.0;
    imaging::ColormapSpec colormap = imaging::ColormapSpec::blue_red();
    double colormap_tolerance = imaging::kDefaultColorTolerance;
    DepthRoute depth_route = DepthRoute::Colormap;
    imaging::ValidationThresholds thresholds;
    ValidationMode validation = ValidationMode::Fail;
    tracking::TrackerConfig tracker;
    /// Artifact handed to TargetBuilt as the tracking reference. Anything but
    /// "capture_rgb" fails the provenance check.
    std::string target_reference_kind = "capture_rgb";
    std::size_t worker_threads = 2;
};

nlohmann::json to_json(const tracking::TrackerConfig& cfg);
/// Missing fields keep the values of `defaults`.
tracking::TrackerConfig tracker_config_from_json(const nlohmann::json& j, const tracking::TrackerConfig& defaults = {});

/// Session orchestrator. Sessions advance one stage at a time; each session's
/// stages run strictly in order while different sessions run in parallel on a
/// worker pool. Reads (get, list) never wait for a running stage.
///
/// Layout under options.root: objects/ (ArtifactStore), sessions/{id}.json
/// snapshots and sessions/{id}.events.jsonl logs, analytics/records.csv.
class Engine {
public:
    /// Reloads every session found under the root by replaying its event log.
    Engine(EngineOptions options, genai::BackendSet backends);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    /// Stores the capture and persists a new session at Created. Throws
    /// InvalidCapture for an empty prompt or inconsistent capture.
    std::string create_session(const CaptureInput& capture, const std::string& prompt,
                               genai::GenerationConfig cfg = {});

    /// Runs exactly the next stage. A stage error leaves the session Failed
    /// (it is returned, not thrown). Throws InvalidTransition on a terminal session.
    Session advance(const std::string& id);
    Session run_to_completion(const std::string& id);
    /// Schedules run_to_completion on the worker pool.
    void start(const std::string& id);
    /// Cancels now when idle, otherwise at the next stage boundary.
    Session cancel(const std::string& id);
    void record_rating(const std::string& id, int rating, std::optional<analytics::Group> group = std::nullopt);

    Session get(const std::string& id) const;
    /// Ordered by creation time.
    std::vector<Session> list() const;
    /// Hash of a capture or stage artifact, if the session has it.
    std::optional<std::string> artifact_hash(const std::string& id, const std::string& kind) const;

    /// The registered target of an Anchored session.
    std::shared_ptr<const tracking::ModelTarget> model_target(const std::string& id) const;
    tracking::TrackerConfig tracker_config(const std::string& id) const;

    /// Every rating as an analytics record: participant = session id,
    /// attempt = rating order within the session.
    std::vector<analytics::PromptRecord> rating_records() const;

    const ArtifactStore& store() const noexcept;
    const EngineOptions& options() const noexcept;
    /// Blocks until every scheduled run has finished.
    void wait_idle();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Loads a model target from its target_ref artifact.
tracking::ModelTarget load_model_target(const ArtifactStore& store, const std::string& target_ref_hash);

} // namespace repurpose::pipeline
