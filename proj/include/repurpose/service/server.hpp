#pragma once

#include "repurpose/genai/backend.hpp"
#include "repurpose/pipeline/engine.hpp"
#include "repurpose/service/config.hpp"

#include <memory>
#include <optional>

namespace repurpose::service {

/// HTTP facade over a pipeline engine.
///
///   POST /sessions                      multipart rgb, depth, intrinsics, prompt, seed, control_mode
///   GET  /sessions, /sessions/{id}
///   GET  /sessions/{id}/artifacts/{kind}
///   POST /sessions/{id}/cancel
///   POST /sessions/{id}/trajectory      trajectory JSON
///   GET  /sessions/{id}/track           text/event-stream of tracking snapshots
///   POST /sessions/{id}/rating          {"rating": 1..7, "group"?: "A"|"B"|"C"}
///   GET  /analytics/records             ?format=csv for CSV
///   GET  /analytics/summary             ?group=A|B|C|all
///   GET  /health
class Server {
public:
    /// `backends` replaces the ones implied by the config (used for fakes).
    explicit Server(ServiceConfig config, std::optional<genai::BackendSet> backends = std::nullopt);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the configured host/port and returns the bound port.
    int bind();
    /// Serves until stop(). Requires bind().
    void run();
    void stop();

    pipeline::Engine& engine();
    const ServiceConfig& config() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace repurpose::service
