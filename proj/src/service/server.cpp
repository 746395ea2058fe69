#include "repurpose/service/server.hpp"

#include "repurpose/analytics/summary.hpp"
#include "repurpose/error.hpp"
#include "repurpose/genai/remote.hpp"
#include "repurpose/genai/stub.hpp"
#include "repurpose/tracking/trajectory.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace repurpose::service {

using nlohmann::json;

namespace {

class Unconfigured final : public genai::ImageGenerator, public genai::BackgroundRemover, public genai::MeshReconstructor {
public:
    imaging::RgbImage text_to_image(const imaging::GrayImage&, const genai::GenerationConfig&) override { fail(); }
    genai::Cutout remove_background(const imaging::RgbImage&) override { fail(); }
    geometry::TriMesh image_to_mesh(const imaging::RgbaImage&) override { fail(); }

private:
    [[noreturn]] static void fail() { throw Error(ErrorKind::BackendUnavailable, "no backend URL configured"); }
};

genai::BackendSet backends_for(const ServiceConfig& c)
{
    if (c.backend == BackendMode::Stub)
        return genai::make_stub_backends(c.stub);
    if (c.remote_unconfigured()) {
        auto u = std::make_shared<Unconfigured>();
        return {u, u, u};
    }
    return genai::make_remote_backends(c.endpoint, {}, c.mesh_format);
}

pipeline::EngineOptions engine_options(const ServiceConfig& c)
{
    pipeline::EngineOptions o;
    o.root = c.root;
    o.tracker = c.tracker;
    o.validation = c.validation;
    o.worker_threads = c.worker_threads;
    return o;
}

int status_for(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NotFound:
    case ErrorKind::EmptySelection: return 404;
    case ErrorKind::InvalidTransition: return 409;
    case ErrorKind::BackendUnavailable: return 503;
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidRange:
    case ErrorKind::InvalidCapture:
    case ErrorKind::InvalidRating:
    case ErrorKind::ParseError:
    case ErrorKind::ImageCodec:
    case ErrorKind::TimeWentBackwards: return 400;
    default: return 500;
    }
}

void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message)
{
    send_json(res, status, {{"error", kind}, {"message", message}});
}

json pose_json(const geometry::Pose& p)
{
    const auto& q = p.rotation;
    const auto& t = p.translation;
    return {{"translation", {t.x(), t.y(), t.z()}}, {"rotation", {q.w(), q.x(), q.y(), q.z()}}};
}

json snapshot_json(const std::string& id, const tracking::FrameRecord& f)
{
    json s{{"session", id},
           {"t", f.t},
           {"phase", tracking::to_string(f.phase)},
           {"anchor", f.anchor ? pose_json(*f.anchor) : json(nullptr)},
           {"error", nullptr}};
    if (f.error)
        s["error"] = {{"translation_m", f.error->translation_m}, {"rotation_deg", f.error->rotation_deg}};
    return s;
}

struct ArtifactKind {
    std::string_view name;
    std::string_view content_type;
};

constexpr ArtifactKind kArtifactKinds[] = {
    {"capture_rgb", "image/png"}, {"depth_gray", "image/png"},       {"generated", "image/png"},
    {"cutout", "image/png"},      {"mesh_obj", "model/obj"},         {"target_ref", "application/json"},
    {"anchor", "application/json"},
};

struct Simulation {
    tracking::TrackLog log;
    double camera_fps = 15;
};

thread_local std::chrono::steady_clock::time_point request_start;

} // namespace

struct Server::Impl {
    ServiceConfig cfg;
    std::unique_ptr<pipeline::Engine> engine;
    httplib::Server http;
    std::mutex sims_mu;
    std::map<std::string, std::shared_ptr<const Simulation>> sims;
    bool bound = false;

    Impl(ServiceConfig c, std::optional<genai::BackendSet> b) : cfg(std::move(c))
    {
        cfg.validate();
        engine = std::make_unique<pipeline::Engine>(engine_options(cfg), b ? std::move(*b) : backends_for(cfg));
        routes();
    }

    template <class Fn>
    httplib::Server::Handler guarded(Fn fn)
    {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send_error(res, status_for(e.kind()), to_string(e.kind()), e.detail());
            } catch (const json::exception& e) {
                send_error(res, 400, "ParseError", e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, "Internal", e.what());
            }
        };
    }

    std::vector<analytics::PromptRecord> records() const
    {
        std::vector<analytics::PromptRecord> out;
        if (cfg.seed_study_fixture)
            out = analytics::study_fixture();
        const auto rated = engine->rating_records();
        out.insert(out.end(), rated.begin(), rated.end());
        return out;
    }

    bool origin_allowed(const std::string& origin) const
    {
        return std::any_of(cfg.cors_origins.begin(), cfg.cors_origins.end(),
                           [&](const std::string& o) { return o == "*" || o == origin; });
    }

    void create_session(const httplib::Request& req, httplib::Response& res)
    {
        if (cfg.remote_unconfigured())
            return send_error(res, 503, "BackendUnavailable", "remote backend mode without a backend URL");
        if (!req.is_multipart_form_data())
            return send_error(res, 400, "InvalidInput", "expected multipart/form-data");
        const auto part = [&](const char* name) -> std::optional<std::string> {
            if (!req.has_file(name))
                return std::nullopt;
            return req.get_file_value(name).content;
        };
        for (const char* required : {"rgb", "depth", "intrinsics", "prompt"})
            if (!part(required))
                return send_error(res, 400, "InvalidInput", std::string("missing part '") + required + "'");

        genai::GenerationConfig gen;
        if (const auto seed = part("seed")) {
            const auto [ptr, ec] = std::from_chars(seed->data(), seed->data() + seed->size(), gen.seed);
            if (ec != std::errc{} || ptr != seed->data() + seed->size())
                return send_error(res, 400, "InvalidInput", "seed must be an unsigned integer");
        }
        if (const auto mode = part("control_mode"))
            gen.control_mode = genai::parse_control_mode(*mode);
        if (const auto ckpt = part("checkpoint_id"))
            gen.checkpoint_id = *ckpt;

        const auto as_bytes = [](const std::string& s) {
            return std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
        };
        const std::string rgb = *part("rgb");
        const std::string depth = *part("depth");
        const auto mask = part("mask");
        const auto capture = pipeline::capture_from_files(
            as_bytes(rgb), as_bytes(depth), *part("intrinsics"),
            mask ? std::optional(as_bytes(*mask)) : std::nullopt);
        const std::string id = engine->create_session(capture, *part("prompt"), gen);
        engine->start(id);
        send_json(res, 201, {{"id", id}});
    }

    void artifact(const httplib::Request& req, httplib::Response& res)
    {
        const std::string id = req.matches[1];
        const std::string kind = req.matches[2];
        const auto known = std::find_if(std::begin(kArtifactKinds), std::end(kArtifactKinds),
                                        [&](const ArtifactKind& k) { return k.name == kind; });
        if (known == std::end(kArtifactKinds))
            return send_error(res, 404, "NotFound", "unknown artifact kind '" + kind + "'");
        const auto hash = engine->artifact_hash(id, kind);
        if (!hash)
            return send_error(res, 404, "NotFound", "session has no " + kind + " yet");
        const auto bytes = engine->store().get(*hash);
        res.set_header("ETag", "\"" + *hash + "\"");
        res.set_header("X-Content-SHA256", *hash);
        res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), std::string(known->content_type));
    }

    void post_trajectory(const httplib::Request& req, httplib::Response& res)
    {
        const std::string id = req.matches[1];
        const auto session = engine->get(id);
        if (session.stage != pipeline::Stage::Anchored)
            return send_error(res, 409, "InvalidTransition",
                              "session is " + std::string(pipeline::to_string(session.stage)) + ", not Anchored");
        const auto traj = tracking::parse_trajectory_json(req.body);
        const auto tracker = engine->tracker_config(id);
        auto sim = std::make_shared<Simulation>();
        sim->log = tracking::run_trajectory(traj, *engine->model_target(id), tracker);
        sim->camera_fps = tracker.camera_fps;
        const auto frames = sim->log.frames.size();
        const json episodes = json::parse(tracking::episodes_json(sim->log));
        {
            std::lock_guard lock(sims_mu);
            sims[id] = std::move(sim);
        }
        send_json(res, 200,
                  {{"frames", frames},
                   {"start", traj.start()},
                   {"end", traj.end()},
                   {"camera_fps", tracker.camera_fps},
                   {"episodes", episodes}});
    }

    void track(const httplib::Request& req, httplib::Response& res)
    {
        const std::string id = req.matches[1];
        const auto session = engine->get(id);
        if (session.stage != pipeline::Stage::Anchored)
            return send_error(res, 409, "InvalidTransition",
                              "session is " + std::string(pipeline::to_string(session.stage)) + ", not Anchored");
        std::shared_ptr<const Simulation> sim;
        {
            std::lock_guard lock(sims_mu);
            if (const auto it = sims.find(id); it != sims.end())
                sim = it->second;
        }
        if (!sim)
            return send_error(res, 409, "InvalidTransition", "no trajectory posted for this session");
        const double scale = cfg.stream_time_scale;
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [sim, id, scale](std::size_t, httplib::DataSink& sink) {
            const auto start = std::chrono::steady_clock::now();
            const auto& frames = sim->log.frames;
            for (std::size_t i = 0; i < frames.size(); ++i) {
                if (scale > 0) {
                    const double offset = (frames[i].t - frames.front().t) * scale;
                    std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                              std::chrono::duration<double>(offset)));
                }
                if (!sink.is_writable())
                    return false;
                const std::string msg = "id: " + std::to_string(i) + "\nevent: snapshot\ndata: " +
                                        snapshot_json(id, frames[i]).dump() + "\n\n";
                if (!sink.write(msg.data(), msg.size()))
                    return false;
            }
            const std::string end = "event: end\ndata: " + json{{"frames", frames.size()}}.dump() + "\n\n";
            sink.write(end.data(), end.size());
            sink.done();
            return true;
        });
    }

    void rating(const httplib::Request& req, httplib::Response& res)
    {
        const std::string id = req.matches[1];
        const json body = json::parse(req.body);
        if (!body.is_object() || !body.contains("rating") || !body.at("rating").is_number_integer())
            return send_error(res, 400, "InvalidRating", "body must be {\"rating\": integer}");
        std::optional<analytics::Group> group;
        if (body.contains("group") && !body.at("group").is_null()) {
            group = analytics::parse_group(body.at("group").get<std::string>());
            if (!group)
                return send_error(res, 400, "InvalidInput", "group must be A, B or C");
        }
        engine->record_rating(id, body.at("rating").get<int>(), group);
        res.status = 204;
    }

    void summary(const httplib::Request& req, httplib::Response& res)
    {
        const std::string label = req.has_param("group") ? req.get_param_value("group") : "all";
        std::optional<analytics::Group> group;
        if (label != "all") {
            group = analytics::parse_group(label);
            if (!group)
                return send_error(res, 400, "InvalidInput", "group must be A, B, C or all");
        }
        const std::string conv = req.has_param("convention") ? req.get_param_value("convention") : "population";
        if (conv != "population" && conv != "sample")
            return send_error(res, 400, "InvalidInput", "convention must be population or sample");
        const auto recs = records();
        const auto s = analytics::summarize(recs, group,
                                            conv == "sample" ? analytics::StdDevConvention::Sample
                                                             : analytics::StdDevConvention::Population);
        send_json(res, 200, {{"group", label}, {"n", s.n}, {"mean", s.mean}, {"stddev", s.stddev}, {"convention", conv}});
    }

    void analytics_records(const httplib::Request& req, httplib::Response& res)
    {
        const auto recs = records();
        if (req.has_param("format") && req.get_param_value("format") == "csv")
            return res.set_content(analytics::records_to_csv(recs), "text/csv");
        json out = json::array();
        for (const auto& r : recs)
            out.push_back({{"participant", r.participant},
                           {"attempt", r.attempt},
                           {"prompt", r.prompt},
                           {"rating", r.rating},
                           {"group", r.group ? json(std::string(analytics::to_string(*r.group))) : json(nullptr)}});
        send_json(res, 200, out);
    }

    void routes()
    {
        const std::string sid = "/sessions/([0-9a-fA-F-]+)";
        http.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}});
        });
        http.Post("/sessions", guarded([this](const auto& req, auto& res) { create_session(req, res); }));
        http.Get("/sessions", guarded([this](const auto&, auto& res) {
            json out = json::array();
            for (const auto& s : engine->list())
                out.push_back(pipeline::to_json(s));
            send_json(res, 200, out);
        }));
        http.Get(sid, guarded([this](const auto& req, auto& res) {
            send_json(res, 200, pipeline::to_json(engine->get(req.matches[1])));
        }));
        http.Get(sid + "/artifacts/([a-z_]+)", guarded([this](const auto& req, auto& res) { artifact(req, res); }));
        http.Post(sid + "/cancel", guarded([this](const auto& req, auto& res) {
            send_json(res, 200, pipeline::to_json(engine->cancel(req.matches[1])));
        }));
        http.Post(sid + "/trajectory", guarded([this](const auto& req, auto& res) { post_trajectory(req, res); }));
        http.Get(sid + "/track", guarded([this](const auto& req, auto& res) { track(req, res); }));
        http.Post(sid + "/rating", guarded([this](const auto& req, auto& res) { rating(req, res); }));
        http.Get("/analytics/records", guarded([this](const auto& req, auto& res) { analytics_records(req, res); }));
        http.Get("/analytics/summary", guarded([this](const auto& req, auto& res) { summary(req, res); }));
        http.Options(".*", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
            res.status = 204;
        });

        http.set_pre_routing_handler([](const httplib::Request&, httplib::Response&) {
            request_start = std::chrono::steady_clock::now();
            return httplib::Server::HandlerResponse::Unhandled;
        });
        http.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            const auto origin = req.get_header_value("Origin");
            if (!origin.empty() && origin_allowed(origin)) {
                res.set_header("Access-Control-Allow-Origin", origin);
                res.set_header("Vary", "Origin");
            }
        });
        http.set_logger([](const httplib::Request& req, const httplib::Response& res) {
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - request_start).count();
            const json line{{"ts", pipeline::utc_timestamp()},
                            {"method", req.method},
                            {"path", req.path},
                            {"status", res.status},
                            {"ms", std::round(ms * 1000) / 1000}};
            std::fprintf(stderr, "%s\n", line.dump().c_str());
        });
    }
};

Server::Server(ServiceConfig config, std::optional<genai::BackendSet> backends)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(backends)))
{
}

Server::~Server()
{
    stop();
}

int Server::bind()
{
    auto& c = impl_->cfg;
    if (c.port == 0) {
        const int port = impl_->http.bind_to_any_port(c.host);
        if (port <= 0)
            throw Error(ErrorKind::Internal, "cannot bind " + c.host);
        c.port = port;
    } else if (!impl_->http.bind_to_port(c.host, c.port)) {
        throw Error(ErrorKind::Internal, "cannot bind " + c.host + ":" + std::to_string(c.port));
    }
    impl_->bound = true;
    return c.port;
}

void Server::run()
{
    if (!impl_->bound)
        throw Error(ErrorKind::Internal, "run() before bind()");
    impl_->http.listen_after_bind();
}

void Server::stop()
{
    impl_->http.stop();
}

pipeline::Engine& Server::engine()
{
    return *impl_->engine;
}

const ServiceConfig& Server::config() const noexcept
{
    return impl_->cfg;
}

} // namespace repurpose::service
