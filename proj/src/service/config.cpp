#include "repurpose/service/config.hpp"

#include "repurpose/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>

namespace repurpose::service {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<std::string> process_env(const std::string& name)
{
    if (const char* v = std::getenv(name.c_str()))
        return std::string(v);
    return std::nullopt;
}

void ServiceConfig::validate() const
{
    if (port < 0 || port > 65535)
        throw Error(ErrorKind::InvalidInput, "port " + std::to_string(port) + " is outside 0..65535");
    if (host.empty())
        throw Error(ErrorKind::InvalidInput, "host is empty");
    if (worker_threads == 0)
        throw Error(ErrorKind::InvalidInput, "worker_threads must be positive");
    if (!(stream_time_scale >= 0))
        throw Error(ErrorKind::InvalidInput, "stream_time_scale must be >= 0");
    stub.validate();
    tracker.validate();
    if (backend == BackendMode::Remote && !remote_unconfigured())
        endpoint.validate();

    std::error_code ec;
    fs::create_directories(root, ec);
    const fs::path probe = root / ".write-probe";
    {
        std::ofstream out(probe);
        if (!out)
            throw Error(ErrorKind::InvalidInput, "root " + root.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

bool ServiceConfig::remote_unconfigured() const noexcept
{
    return backend == BackendMode::Remote && endpoint.base_url.empty();
}

namespace {

int parse_port(const std::string& s)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorKind::ParseError, "REPURPOSE_PORT is not an integer: '" + s + "'");
    return v;
}

} // namespace

ServiceConfig parse_service_config(std::string_view json_text, const EnvLookup& env)
{
    ServiceConfig c;
    try {
        const json j = json_text.empty() ? json::object() : json::parse(json_text);
        if (!j.is_object())
            throw Error(ErrorKind::ParseError, "config must be a JSON object");
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        c.root = j.value("root", c.root.string());
        const std::string backend = j.value("backend", std::string("stub"));
        if (backend == "stub")
            c.backend = BackendMode::Stub;
        else if (backend == "remote")
            c.backend = BackendMode::Remote;
        else
            throw Error(ErrorKind::ParseError, "backend must be stub or remote, got '" + backend + "'");
        if (j.contains("endpoint")) {
            const auto& e = j.at("endpoint");
            c.endpoint.base_url = e.value("base_url", c.endpoint.base_url);
            if (e.contains("auth_token") && !e.at("auth_token").is_null())
                c.endpoint.auth_token = e.at("auth_token").get<std::string>();
            c.endpoint.request_timeout_s = e.value("timeout_s", c.endpoint.request_timeout_s);
            c.endpoint.max_retries = e.value("max_retries", c.endpoint.max_retries);
        }
        const std::string format = j.value("mesh_format", std::string("obj"));
        if (format == "obj")
            c.mesh_format = genai::MeshFormat::Obj;
        else if (format == "glb")
            c.mesh_format = genai::MeshFormat::Glb;
        else
            throw Error(ErrorKind::ParseError, "mesh_format must be obj or glb, got '" + format + "'");
        if (j.contains("stub")) {
            const auto& s = j.at("stub");
            c.stub.inject_residual = s.value("inject_residual", c.stub.inject_residual);
            c.stub.residual_area_fraction = s.value("residual_area_fraction", c.stub.residual_area_fraction);
            c.stub.residual_offset_x = s.value("residual_offset_x", c.stub.residual_offset_x);
            c.stub.residual_offset_y = s.value("residual_offset_y", c.stub.residual_offset_y);
            c.stub.grid_cols = s.value("grid_cols", c.stub.grid_cols);
            c.stub.grid_rows = s.value("grid_rows", c.stub.grid_rows);
            c.stub.height_scale = s.value("height_scale", c.stub.height_scale);
        }
        if (j.contains("tracker"))
            c.tracker = pipeline::tracker_config_from_json(j.at("tracker"), c.tracker);
        const std::string validation = j.value("validation", std::string("fail"));
        if (validation == "fail")
            c.validation = pipeline::ValidationMode::Fail;
        else if (validation == "warn")
            c.validation = pipeline::ValidationMode::Warn;
        else
            throw Error(ErrorKind::ParseError, "validation must be fail or warn, got '" + validation + "'");
        c.worker_threads = j.value("worker_threads", c.worker_threads);
        if (j.contains("cors_origins"))
            c.cors_origins = j.at("cors_origins").get<std::vector<std::string>>();
        c.stream_time_scale = j.value("stream_time_scale", c.stream_time_scale);
        c.seed_study_fixture = j.value("seed_study_fixture", c.seed_study_fixture);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("service config: ") + e.what());
    }

    if (const auto v = env("REPURPOSE_PORT"))
        c.port = parse_port(*v);
    if (const auto v = env("REPURPOSE_ROOT"))
        c.root = *v;
    if (const auto v = env("REPURPOSE_BACKEND_URL"))
        c.endpoint.base_url = *v;
    if (const auto v = env("REPURPOSE_AUTH_TOKEN"))
        c.endpoint.auth_token = *v;
    return c;
}

ServiceConfig load_service_config(const std::optional<fs::path>& path, const EnvLookup& env)
{
    if (!path)
        return parse_service_config("", env);
    std::ifstream in(*path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::ParseError, "cannot read config " + path->string());
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_service_config(text, env);
}

} // namespace repurpose::service
