#include "repurpose/pipeline/engine.hpp"

#include "repurpose/geometry/mesh.hpp"
#include "repurpose/imaging/extent.hpp"
#include "repurpose/imaging/image_io.hpp"

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>
#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <fcntl.h>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>
#include <unistd.h>

namespace repurpose::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const tracking::TrackerConfig& cfg)
{
    return {
        {"camera_fps", cfg.camera_fps},
        {"noise_sigma_t", cfg.noise_sigma_t},
        {"noise_sigma_r", cfg.noise_sigma_r},
        {"occlusion_threshold", cfg.occlusion_threshold},
        {"max_linear_speed", cfg.max_linear_speed},
        {"max_angular_speed", cfg.max_angular_speed},
        {"reacquire_frames", cfg.reacquire_frames},
        {"rng_seed", cfg.rng_seed},
    };
}

tracking::TrackerConfig tracker_config_from_json(const json& j, const tracking::TrackerConfig& defaults)
{
    tracking::TrackerConfig c = defaults;
    try {
        c.camera_fps = j.value("camera_fps", c.camera_fps);
        c.noise_sigma_t = j.value("noise_sigma_t", c.noise_sigma_t);
        c.noise_sigma_r = j.value("noise_sigma_r", c.noise_sigma_r);
        c.occlusion_threshold = j.value("occlusion_threshold", c.occlusion_threshold);
        c.max_linear_speed = j.value("max_linear_speed", c.max_linear_speed);
        c.max_angular_speed = j.value("max_angular_speed", c.max_angular_speed);
        c.reacquire_frames = j.value("reacquire_frames", c.reacquire_frames);
        c.rng_seed = j.value("rng_seed", c.rng_seed);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("tracker config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

json pose_json(const geometry::Pose& p)
{
    const auto& q = p.rotation;
    const auto& t = p.translation;
    return {{"translation", {t.x(), t.y(), t.z()}}, {"rotation", {q.w(), q.x(), q.y(), q.z()}}};
}

geometry::Pose pose_from_json(const json& j)
{
    const auto& t = j.at("translation");
    const auto& r = j.at("rotation");
    geometry::Pose p;
    p.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
    p.rotation = geometry::Quat(r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                                r.at(3).get<double>());
    return p;
}

void append_line(const fs::path& path, const std::string& line)
{
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0)
        throw Error(ErrorKind::Internal, "cannot open " + path.string());
    const std::string data = line + "\n";
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            ::close(fd);
            throw Error(ErrorKind::Internal, "append failed for " + path.string());
        }
        done += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Entry {
    std::mutex exec;
    std::mutex commit;
    mutable std::mutex state;
    Session snapshot;
    std::atomic<bool> cancel_requested{false};

    Session read() const
    {
        std::lock_guard lock(state);
        return snapshot;
    }
};

} // namespace

tracking::ModelTarget load_model_target(const ArtifactStore& store, const std::string& target_ref_hash)
{
    json j;
    try {
        j = json::parse(store.get_text(target_ref_hash));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("target_ref: ") + e.what());
    }
    tracking::ModelTarget t;
    t.reference_image = imaging::decode_rgb_png(store.get(j.at("reference_image").get<std::string>()));
    t.reference_provenance = tracking::parse_provenance(j.at("reference_provenance").get<std::string>());
    t.normalized_mesh = geometry::parse_obj(store.get_text(j.at("mesh").get<std::string>()));
    const auto& e = j.at("physical_extent");
    t.physical_extent = {e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()};
    t.alignment_offset = pose_from_json(j.at("alignment_offset"));
    return t;
}

struct Engine::Impl {
    EngineOptions opt;
    genai::BackendSet backends;
    ArtifactStore store;
    fs::path sessions_dir;
    fs::path analytics_dir;

    mutable std::shared_mutex map_mu;
    std::map<std::string, std::shared_ptr<Entry>> entries;

    mutable std::mutex targets_mu;
    mutable std::map<std::string, std::shared_ptr<const tracking::ModelTarget>> targets;

    std::mutex uuid_mu;
    boost::uuids::random_generator uuid_gen;

    std::mutex idle_mu;
    std::condition_variable idle_cv;
    std::size_t pending = 0;

    std::mutex export_mu;

    boost::asio::thread_pool pool;

    Impl(EngineOptions o, genai::BackendSet b)
        : opt(std::move(o)), backends(std::move(b)), store(opt.root), sessions_dir(opt.root / "sessions"),
          analytics_dir(opt.root / "analytics"), pool(std::max<std::size_t>(1, opt.worker_threads))
    {
        if (!backends.generator || !backends.remover || !backends.reconstructor)
            throw Error(ErrorKind::InvalidInput, "backend set is incomplete");
        if (!(opt.near_m > 0) || !(opt.far_m > opt.near_m))
            throw Error(ErrorKind::InvalidRange, "need 0 < near < far");
        opt.tracker.validate();
        fs::create_directories(sessions_dir);
        fs::create_directories(analytics_dir);
        load_sessions();
    }

    fs::path log_path(const std::string& id) const { return sessions_dir / (id + ".events.jsonl"); }
    fs::path snapshot_path(const std::string& id) const { return sessions_dir / (id + ".json"); }

    void load_sessions()
    {
        for (const auto& item : fs::directory_iterator(sessions_dir)) {
            const std::string name = item.path().filename().string();
            const std::string suffix = ".events.jsonl";
            if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
                continue;
            try {
                Session s = replay_events(read_text(item.path()));
                const std::string snap = to_json(s).dump(2);
                if (read_text(snapshot_path(s.id)) != snap)
                    atomic_write(snapshot_path(s.id), std::string_view(snap));
                auto e = std::make_shared<Entry>();
                e->snapshot = std::move(s);
                entries.emplace(e->snapshot.id, std::move(e));
            } catch (const Error& err) {
                std::cerr << "skipping " << item.path().string() << ": " << err.what() << "\n";
            }
        }
    }

    std::shared_ptr<Entry> entry(const std::string& id) const
    {
        std::shared_lock lock(map_mu);
        const auto it = entries.find(id);
        if (it == entries.end())
            throw Error(ErrorKind::NotFound, "no session '" + id + "'");
        return it->second;
    }

    void commit(Entry& e, const json& event)
    {
        std::lock_guard lock(e.commit);
        Session next = e.read();
        apply_event(next, event);
        append_line(log_path(next.id), event.dump());
        atomic_write(snapshot_path(next.id), std::string_view(to_json(next).dump(2)));
        std::lock_guard state(e.state);
        e.snapshot = std::move(next);
    }

    std::vector<std::uint8_t> blob(const std::map<std::string, std::string>& refs, const std::string& kind) const
    {
        const auto it = refs.find(kind);
        if (it == refs.end())
            throw Error(ErrorKind::Internal, "missing artifact " + kind);
        return store.get(it->second);
    }

    imaging::Extent3 measure_extent(const Session& s, const imaging::RgbaImage& cutout) const
    {
        const auto depth = imaging::decode_depth_png(blob(s.capture, "capture_depth"));
        const auto bytes = blob(s.capture, "capture_intrinsics");
        const auto k = imaging::parse_intrinsics_json({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
        const auto mask = s.capture.count("capture_mask") ? imaging::decode_mask_png(blob(s.capture, "capture_mask"))
                                                          : genai::cutout_from_rgba(cutout).mask;
        return imaging::object_extent(depth, mask, k.k);
    }

    std::string run_stage(const Session& s, Stage stage, std::optional<imaging::MaskReport>& report)
    {
        switch (stage) {
        case Stage::DepthPreprocessed: {
            const auto depth = imaging::decode_depth_png(blob(s.capture, "capture_depth"));
            const auto gray =
                opt.depth_route == DepthRoute::Colormap
                    ? imaging::depth_colormap_to_grayscale(
                          imaging::encode_depth_colormap(depth, opt.colormap, opt.near_m, opt.far_m), opt.colormap,
                          opt.near_m, opt.far_m, opt.colormap_tolerance)
                    : imaging::depth_to_grayscale(depth, opt.near_m, opt.far_m);
            return store.put(imaging::encode_png(gray), "depth_gray");
        }
        case Stage::ImageGenerated: {
            const auto gray = imaging::decode_gray_png(blob(s.artifacts, "depth_gray"));
            const auto image = backends.generator->text_to_image(gray, s.config);
            if (image.width() != gray.width() || image.height() != gray.height())
                throw Error(ErrorKind::InvalidInput, "generated image size differs from its conditioning");
            return store.put(imaging::encode_png(image), "generated");
        }
        case Stage::BackgroundRemoved: {
            const auto image = imaging::decode_rgb_png(blob(s.artifacts, "generated"));
            const auto cutout = backends.remover->remove_background(image);
            report = imaging::validate_background_removal(cutout.mask, opt.thresholds);
            if (!report->passed && opt.validation == ValidationMode::Fail) {
                char msg[256];
                std::snprintf(msg, sizeof msg,
                              "centroid shift %.3f px (limit %.3f), residual fraction %.4f (limit %.4f)",
                              report->centroid_shift, opt.thresholds.max_shift, report->residual_fraction,
                              opt.thresholds.max_residual);
                throw Error(ErrorKind::ValidationFailed, msg);
            }
            return store.put(imaging::encode_png(cutout.image), "cutout");
        }
        case Stage::MeshReconstructed: {
            const auto cutout = imaging::decode_rgba_png(blob(s.artifacts, "cutout"));
            const auto mesh = backends.reconstructor->image_to_mesh(cutout);
            const auto extent = measure_extent(s, cutout);
            return store.put(geometry::write_obj(geometry::normalize_mesh(mesh, extent.max())), "mesh_obj");
        }
        case Stage::TargetBuilt: {
            const std::string& kind = opt.target_reference_kind;
            const auto cap = s.capture.find(kind);
            const auto art = s.artifacts.find(kind);
            const std::optional<std::string> ref = cap != s.capture.end()     ? std::optional(cap->second)
                                                   : art != s.artifacts.end() ? std::optional(art->second)
                                                                              : std::nullopt;
            if (!ref)
                throw Error(ErrorKind::ProvenanceViolation, "no '" + kind + "' artifact to use as reference");
            if (store.type_of(*ref) != std::optional<std::string>("capture_rgb") ||
                *ref != s.capture.at("capture_rgb"))
                throw Error(ErrorKind::ProvenanceViolation,
                            "tracking reference must be the captured photograph, got '" + kind + "'");
            const auto reference = imaging::decode_rgb_png(store.get(*ref));
            const auto mesh = geometry::parse_obj(store.get_text(s.artifacts.at("mesh_obj")));
            const auto extent = measure_extent(s, imaging::decode_rgba_png(blob(s.artifacts, "cutout")));
            const auto target = tracking::build_model_target(reference, mesh, extent);
            const std::string mesh_hash = store.put(geometry::write_obj(target.normalized_mesh), "target_mesh");
            const json doc{
                {"reference_image", *ref},
                {"reference_provenance", std::string(tracking::to_string(target.reference_provenance))},
                {"mesh", mesh_hash},
                {"physical_extent", {extent.dx, extent.dy, extent.dz}},
                {"alignment_offset", pose_json(target.alignment_offset)},
            };
            return store.put(doc.dump(2), "target_ref");
        }
        case Stage::Anchored: {
            const std::string& ref = s.artifacts.at("target_ref");
            const auto target = load_model_target(store, ref);
            if (target.reference_provenance != tracking::Provenance::Original)
                throw Error(ErrorKind::ProvenanceViolation, "target reference is not an original capture");
            const json doc{
                {"target_ref", ref},
                {"tracker", to_json(opt.tracker)},
                {"alignment_offset", pose_json(target.alignment_offset)},
            };
            return store.put(doc.dump(2), "anchor");
        }
        default:
            throw Error(ErrorKind::InvalidTransition, "no work for stage " + std::string(to_string(stage)));
        }
    }

    void export_ratings(const std::vector<analytics::PromptRecord>& records)
    {
        std::lock_guard lock(export_mu);
        atomic_write(analytics_dir / "records.csv", std::string_view(analytics::records_to_csv(records)));
    }
};

Engine::Engine(EngineOptions options, genai::BackendSet backends)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(backends)))
{
}

Engine::~Engine()
{
    impl_->pool.join();
}

std::string Engine::create_session(const CaptureInput& capture, const std::string& prompt, genai::GenerationConfig cfg)
{
    if (prompt.find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(ErrorKind::InvalidCapture, "prompt is empty");
    capture.validate();
    cfg.prompt = prompt;
    cfg.validate();

    auto& store = impl_->store;
    Session s;
    s.capture["capture_rgb"] = store.put(imaging::encode_png(capture.rgb), "capture_rgb");
    s.capture["capture_depth"] = store.put(imaging::encode_depth_png(capture.depth), "capture_depth");
    s.capture["capture_intrinsics"] = store.put(
        imaging::intrinsics_to_json({capture.intrinsics, capture.rgb.width(), capture.rgb.height()}), "capture_intrinsics");
    if (capture.mask)
        s.capture["capture_mask"] = store.put(imaging::encode_mask_png(*capture.mask), "capture_mask");
    {
        std::lock_guard lock(impl_->uuid_mu);
        s.id = boost::uuids::to_string(impl_->uuid_gen());
    }
    s.prompt = prompt;
    s.created_at = utc_timestamp();
    s.config = cfg;
    s.history.push_back({Stage::Created, s.created_at});

    auto e = std::make_shared<Entry>();
    append_line(impl_->log_path(s.id), created_event(s, s.created_at).dump());
    atomic_write(impl_->snapshot_path(s.id), std::string_view(to_json(s).dump(2)));
    e->snapshot = s;
    std::unique_lock lock(impl_->map_mu);
    impl_->entries.emplace(s.id, std::move(e));
    return s.id;
}

Session Engine::advance(const std::string& id)
{
    const auto e = impl_->entry(id);
    std::lock_guard exec(e->exec);
    const Session s = e->read();
    if (is_terminal(s.stage))
        throw Error(ErrorKind::InvalidTransition, "session " + id + " is " + std::string(to_string(s.stage)));
    if (e->cancel_requested) {
        impl_->commit(*e, cancelled_event(utc_timestamp()));
        return e->read();
    }
    const Stage stage = next_stage(s.stage);
    std::optional<imaging::MaskReport> report;
    try {
        const std::string hash = impl_->run_stage(s, stage, report);
        impl_->commit(*e, stage_event(stage, hash, report, utc_timestamp()));
    } catch (const Error& err) {
        impl_->commit(*e, failed_event({stage, err.kind(), err.detail()}, report, utc_timestamp()));
    } catch (const std::exception& err) {
        impl_->commit(*e, failed_event({stage, ErrorKind::Internal, err.what()}, report, utc_timestamp()));
    }
    if (e->cancel_requested && !is_terminal(e->read().stage))
        impl_->commit(*e, cancelled_event(utc_timestamp()));
    return e->read();
}

Session Engine::run_to_completion(const std::string& id)
{
    for (;;) {
        const Session s = get(id);
        if (is_terminal(s.stage))
            return s;
        try {
            advance(id);
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::InvalidTransition)
                throw;
        }
    }
}

void Engine::start(const std::string& id)
{
    impl_->entry(id);
    {
        std::lock_guard lock(impl_->idle_mu);
        ++impl_->pending;
    }
    boost::asio::post(impl_->pool, [this, id] {
        try {
            run_to_completion(id);
        } catch (const std::exception& err) {
            std::cerr << "session " << id << ": " << err.what() << "\n";
        }
        std::lock_guard lock(impl_->idle_mu);
        --impl_->pending;
        impl_->idle_cv.notify_all();
    });
}

Session Engine::cancel(const std::string& id)
{
    const auto e = impl_->entry(id);
    const auto terminal = [&] {
        const Stage stage = e->read().stage;
        if (is_terminal(stage))
            throw Error(ErrorKind::InvalidTransition, "session " + id + " is " + std::string(to_string(stage)));
    };
    terminal();
    std::unique_lock exec(e->exec, std::try_to_lock);
    if (exec.owns_lock()) {
        terminal();
        impl_->commit(*e, cancelled_event(utc_timestamp()));
    } else {
        e->cancel_requested = true;
    }
    return e->read();
}

void Engine::record_rating(const std::string& id, int rating, std::optional<analytics::Group> group)
{
    if (rating < 1 || rating > 7)
        throw Error(ErrorKind::InvalidRating, "rating " + std::to_string(rating) + " is outside 1..7");
    const auto e = impl_->entry(id);
    impl_->commit(*e, rating_event({rating, group}, utc_timestamp()));
    impl_->export_ratings(rating_records());
}

Session Engine::get(const std::string& id) const
{
    return impl_->entry(id)->read();
}

std::vector<Session> Engine::list() const
{
    std::vector<Session> out;
    {
        std::shared_lock lock(impl_->map_mu);
        out.reserve(impl_->entries.size());
        for (const auto& [id, e] : impl_->entries)
            out.push_back(e->read());
    }
    std::sort(out.begin(), out.end(), [](const Session& a, const Session& b) {
        return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
    });
    return out;
}

std::optional<std::string> Engine::artifact_hash(const std::string& id, const std::string& kind) const
{
    const Session s = get(id);
    if (const auto it = s.capture.find(kind); it != s.capture.end())
        return it->second;
    if (const auto it = s.artifacts.find(kind); it != s.artifacts.end())
        return it->second;
    return std::nullopt;
}

std::shared_ptr<const tracking::ModelTarget> Engine::model_target(const std::string& id) const
{
    const Session s = get(id);
    if (s.stage != Stage::Anchored)
        throw Error(ErrorKind::InvalidTransition, "session " + id + " is not anchored");
    std::lock_guard lock(impl_->targets_mu);
    auto& slot = impl_->targets[id];
    if (!slot)
        slot = std::make_shared<const tracking::ModelTarget>(load_model_target(impl_->store, s.artifacts.at("target_ref")));
    return slot;
}

tracking::TrackerConfig Engine::tracker_config(const std::string& id) const
{
    const Session s = get(id);
    if (s.stage != Stage::Anchored)
        throw Error(ErrorKind::InvalidTransition, "session " + id + " is not anchored");
    const auto anchor = json::parse(impl_->store.get_text(s.artifacts.at("anchor")));
    return tracker_config_from_json(anchor.at("tracker"), impl_->opt.tracker);
}

std::vector<analytics::PromptRecord> Engine::rating_records() const
{
    std::vector<analytics::PromptRecord> out;
    for (const auto& s : list())
        for (std::size_t i = 0; i < s.ratings.size(); ++i)
            out.push_back({s.id, static_cast<int>(i + 1), s.prompt, s.ratings[i].value, s.ratings[i].group});
    return out;
}

const ArtifactStore& Engine::store() const noexcept
{
    return impl_->store;
}

const EngineOptions& Engine::options() const noexcept
{
    return impl_->opt;
}

void Engine::wait_idle()
{
    std::unique_lock lock(impl_->idle_mu);
    impl_->idle_cv.wait(lock, [&] { return impl_->pending == 0; });
}

} // namespace repurpose::pipeline
