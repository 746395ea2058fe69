// pipeline: run, resume and inspect sessions against a local artifact root.

#include "repurpose/error.hpp"
#include "repurpose/fixtures/synthetic.hpp"
#include "repurpose/genai/remote.hpp"
#include "repurpose/genai/stub.hpp"
#include "repurpose/imaging/image_io.hpp"
#include "repurpose/pipeline/engine.hpp"
#include "repurpose/tracking/trajectory.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace repurpose;

namespace {

struct BackendArgs {
    std::string backend = "stub";
    std::string endpoint;
    std::string auth_token;
    std::string mesh_format = "obj";
    bool inject_residual = false;
    std::string validation = "fail";
};

void add_backend_options(CLI::App& cmd, BackendArgs& a)
{
    cmd.add_option("--backend", a.backend, "stub or remote")->check(CLI::IsMember({"stub", "remote"}));
    cmd.add_option("--endpoint", a.endpoint, "remote backend base URL");
    cmd.add_option("--auth-token", a.auth_token, "bearer token for the remote backend");
    cmd.add_option("--mesh-format", a.mesh_format, "obj or glb (remote)")->check(CLI::IsMember({"obj", "glb"}));
    cmd.add_flag("--inject-residual", a.inject_residual, "stub: paint a residual background patch");
    cmd.add_option("--validation", a.validation, "fail or warn on background validation")
        ->check(CLI::IsMember({"fail", "warn"}));
}

std::unique_ptr<pipeline::Engine> make_engine(const fs::path& root, const BackendArgs& a)
{
    genai::BackendSet backends;
    if (a.backend == "stub") {
        genai::StubConfig stub;
        stub.inject_residual = a.inject_residual;
        backends = genai::make_stub_backends(stub);
    } else {
        if (a.endpoint.empty())
            throw Error(ErrorKind::BackendUnavailable, "--backend remote needs --endpoint");
        genai::BackendEndpoint ep;
        ep.base_url = a.endpoint;
        if (!a.auth_token.empty())
            ep.auth_token = a.auth_token;
        backends = genai::make_remote_backends(ep, {}, a.mesh_format == "glb" ? genai::MeshFormat::Glb
                                                                             : genai::MeshFormat::Obj);
    }
    pipeline::EngineOptions opt;
    opt.root = root;
    opt.validation = a.validation == "warn" ? pipeline::ValidationMode::Warn : pipeline::ValidationMode::Fail;
    return std::make_unique<pipeline::Engine>(opt, backends);
}

int exit_code(const pipeline::Session& s)
{
    switch (s.stage) {
    case pipeline::Stage::Anchored: return 0;
    case pipeline::Stage::Failed: return 2;
    case pipeline::Stage::Cancelled: return 3;
    default: return 1;
    }
}

int report(const pipeline::Session& s)
{
    std::cout << pipeline::to_json(s).dump(2) << "\n";
    if (s.error)
        std::cerr << "failed at " << pipeline::to_string(s.error->stage) << ": " << to_string(s.error->kind) << ": "
                  << s.error->reason << "\n";
    return exit_code(s);
}

std::string read_text(const fs::path& p)
{
    const auto bytes = imaging::read_file(p);
    return {bytes.begin(), bytes.end()};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stage-by-stage prop repurposing pipeline"};
    app.require_subcommand(1);

    fs::path out = "repurpose-data";
    BackendArgs backend;

    auto* run = app.add_subcommand("run", "create a session from a capture and run it to completion");
    fs::path rgb, depth, intrinsics, mask;
    std::string prompt, control_mode = "balanced", checkpoint;
    std::uint64_t seed = 0;
    run->add_option("--rgb", rgb, "RGB PNG of the object")->required()->check(CLI::ExistingFile);
    run->add_option("--depth", depth, "16-bit millimeter depth PNG")->required()->check(CLI::ExistingFile);
    run->add_option("--intrinsics", intrinsics, "intrinsics JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--mask", mask, "object mask PNG")->check(CLI::ExistingFile);
    run->add_option("--prompt", prompt, "text prompt")->required();
    run->add_option("--seed", seed, "generation seed");
    run->add_option("--control-mode", control_mode, "balanced, prompt_priority or control_priority");
    run->add_option("--checkpoint", checkpoint, "checkpoint id passed to the remote generator");
    run->add_option("--out", out, "artifact root");
    add_backend_options(*run, backend);

    auto* resume = app.add_subcommand("resume", "continue a stored session");
    std::string id;
    resume->add_option("--id", id, "session id")->required();
    resume->add_option("--out", out, "artifact root");
    add_backend_options(*resume, backend);

    auto* status = app.add_subcommand("status", "print a stored session");
    status->add_option("--id", id, "session id")->required();
    status->add_option("--out", out, "artifact root");

    auto* simulate = app.add_subcommand("simulate", "track an anchored session along a trajectory");
    fs::path trajectory;
    simulate->add_option("--id", id, "session id")->required();
    simulate->add_option("--out", out, "artifact root");
    simulate->add_option("--trajectory", trajectory, "trajectory JSON")->required()->check(CLI::ExistingFile);

    auto* make_capture = app.add_subcommand("make-capture", "write a synthetic RGB-D capture");
    fs::path capture_dir = "capture";
    make_capture->add_option("--out", capture_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto engine = make_engine(out, backend);
            const auto rgb_bytes = imaging::read_file(rgb);
            const auto depth_bytes = imaging::read_file(depth);
            const auto mask_bytes = mask.empty() ? std::vector<std::uint8_t>{} : imaging::read_file(mask);
            const auto capture = pipeline::capture_from_files(
                rgb_bytes, depth_bytes, read_text(intrinsics),
                mask.empty() ? std::nullopt : std::optional<std::span<const std::uint8_t>>(mask_bytes));
            genai::GenerationConfig cfg;
            cfg.seed = seed;
            cfg.control_mode = genai::parse_control_mode(control_mode);
            if (!checkpoint.empty())
                cfg.checkpoint_id = checkpoint;
            const std::string sid = engine->create_session(capture, prompt, cfg);
            std::cerr << "session " << sid << "\n";
            return report(engine->run_to_completion(sid));
        }
        if (*resume) {
            auto engine = make_engine(out, backend);
            return report(engine->run_to_completion(id));
        }
        if (*status) {
            auto engine = make_engine(out, backend);
            return report(engine->get(id));
        }
        if (*simulate) {
            auto engine = make_engine(out, backend);
            const auto traj = tracking::parse_trajectory_json(read_text(trajectory));
            const auto log = tracking::run_trajectory(traj, *engine->model_target(id), engine->tracker_config(id));
            std::cout << tracking::track_log_csv(log);
            std::cerr << tracking::episodes_json(log) << "\n";
            return 0;
        }
        if (*make_capture) {
            const auto c = fixtures::make_capture();
            fs::create_directories(capture_dir);
            imaging::write_file(capture_dir / "rgb.png", imaging::encode_png(c.rgb));
            imaging::write_file(capture_dir / "depth.png", imaging::encode_depth_png(c.depth));
            imaging::write_file(capture_dir / "mask.png", imaging::encode_mask_png(*c.mask));
            const std::string k = imaging::intrinsics_to_json({c.intrinsics, c.rgb.width(), c.rgb.height()});
            imaging::write_file(capture_dir / "intrinsics.json",
                                {reinterpret_cast<const std::uint8_t*>(k.data()), k.size()});
            std::cout << capture_dir.string() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
