#pragma once

#include "repurpose/genai/config.hpp"
#include "repurpose/genai/remote.hpp"
#include "repurpose/pipeline/engine.hpp"
#include "repurpose/tracking/tracker.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace repurpose::service {

enum class BackendMode { Stub, Remote };

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080; ///< 0 binds an ephemeral port
    std::filesystem::path root = "repurpose-data";
    BackendMode backend = BackendMode::Stub;
    genai::BackendEndpoint endpoint;
    genai::MeshFormat mesh_format = genai::MeshFormat::Obj;
    genai::StubConfig stub;
    tracking::TrackerConfig tracker;
    pipeline::ValidationMode validation = pipeline::ValidationMode::Fail;
    std::size_t worker_threads = 2;
    /// Origins allowed for cross-origin requests; "*" allows any.
    std::vector<std::string> cors_origins{"http://localhost:5173"};
    /// Multiplier on simulated time when pacing track streams; 0 streams
    /// without waiting.
    double stream_time_scale = 1.0;
    /// Include the recorded study prompts in the analytics endpoints.
    bool seed_study_fixture = false;

    /// Throws InvalidInput for a bad port, an unwritable root or bad knobs.
    void validate() const;
    /// True when remote mode lacks a backend URL.
    bool remote_unconfigured() const noexcept;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// Parses the JSON config document (all keys optional):
///   {"host", "port", "root", "backend": "stub"|"remote",
///    "endpoint": {"base_url", "auth_token", "timeout_s", "max_retries"},
///    "mesh_format": "obj"|"glb", "stub": {...}, "tracker": {...},
///    "validation": "fail"|"warn", "worker_threads", "cors_origins": [...],
///    "stream_time_scale", "seed_study_fixture"}
/// then applies REPURPOSE_PORT, REPURPOSE_ROOT, REPURPOSE_BACKEND_URL and
/// REPURPOSE_AUTH_TOKEN. Throws ParseError.
ServiceConfig parse_service_config(std::string_view json_text, const EnvLookup& env = process_env);
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path,
                                  const EnvLookup& env = process_env);

} // namespace repurpose::service
