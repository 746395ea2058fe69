// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Uses stub backends only.

#include "oracles.hpp"
#include "service_harness.hpp"

#include "repurpose/analytics/summary.hpp"
#include "repurpose/fixtures/synthetic.hpp"
#include "repurpose/genai/stub.hpp"
#include "repurpose/imaging/colormap.hpp"
#include "repurpose/imaging/image_io.hpp"
#include "repurpose/imaging/mask.hpp"
#include "repurpose/pipeline/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>

using namespace repurpose;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass)
                detail.clear();
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what)
    {
        if (pass)
            detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

class ScratchDir {
public:
    ScratchDir()
    {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("repurpose-acceptance-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~ScratchDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
};

class SlowGenerator final : public genai::ImageGenerator {
public:
    SlowGenerator(std::shared_ptr<genai::ImageGenerator> inner, std::chrono::milliseconds delay)
        : inner_(std::move(inner)), delay_(delay)
    {
    }
    imaging::RgbImage text_to_image(const imaging::GrayImage& g, const genai::GenerationConfig& c) override
    {
        started_ = true;
        std::this_thread::sleep_for(delay_);
        return inner_->text_to_image(g, c);
    }
    bool started() const noexcept { return started_; }

private:
    std::shared_ptr<genai::ImageGenerator> inner_;
    std::chrono::milliseconds delay_;
    std::atomic<bool> started_{false};
};

pipeline::EngineOptions engine_options(const fs::path& root)
{
    pipeline::EngineOptions o;
    o.root = root;
    return o;
}

genai::GenerationConfig seeded(std::uint64_t seed)
{
    genai::GenerationConfig c;
    c.seed = seed;
    return c;
}

std::map<std::string, std::string> hashes(const pipeline::Engine& e, const std::string& id)
{
    const auto s = e.get(id);
    std::map<std::string, std::string> out(s.capture.begin(), s.capture.end());
    out.insert(s.artifacts.begin(), s.artifacts.end());
    return out;
}

// 1. Group statistics of the recorded prompts.
Outcome study_group_statistics()
{
    Outcome o;
    const auto records = analytics::study_fixture();
    o.require(records.size() == 27, "fixture has " + std::to_string(records.size()) + " records");

    // Brute-force tally per group and rating against the independent multisets.
    const std::pair<analytics::Group, const std::vector<int>*> groups[] = {
        {analytics::Group::A, &oracle::kGroupA}, {analytics::Group::B, &oracle::kGroupB},
        {analytics::Group::C, &oracle::kGroupC}};
    for (const auto& [g, list] : groups) {
        for (int rating = 1; rating <= 7; ++rating) {
            const auto have = std::count_if(records.begin(), records.end(),
                                            [&](const auto& r) { return r.group == g && r.rating == rating; });
            const auto want = std::count(list->begin(), list->end(), rating);
            o.require(have == want, std::string("group ") + std::string(analytics::to_string(g)) + " rating " +
                                        std::to_string(rating) + " count mismatch");
        }
    }
    const int sums[3] = {64, 33, 31};
    for (int i = 0; i < 3; ++i) {
        int s = 0;
        for (const auto& r : records)
            if (r.group == groups[i].first)
                s += r.rating;
        o.require(s == sums[i], "group sum mismatch");
    }

    const auto a = analytics::summarize(records, analytics::Group::A);
    const auto b = analytics::summarize(records, analytics::Group::B);
    const auto c = analytics::summarize(records, analytics::Group::C);
    o.require(std::abs(a.mean - 4.9) <= 0.1, "A mean " + fmt("%.3f", a.mean));
    o.require(std::abs(b.mean - 4.1) <= 0.1, "B mean " + fmt("%.3f", b.mean));
    o.require(std::abs(c.mean - 5.2) <= 0.1, "C mean " + fmt("%.3f", c.mean));
    o.require(std::abs(b.stddev - 1.76) <= 0.02, "B sd " + fmt("%.4f", b.stddev));
    o.require(std::abs(a.stddev - 1.12) <= 0.15, "A sd " + fmt("%.3f", a.stddev));
    o.require(std::abs(c.stddev - 1.28) <= 0.15, "C sd " + fmt("%.3f", c.stddev));
    o.note("A " + fmt("%.3f", a.mean) + "/" + fmt("%.3f", a.stddev) + ", B " + fmt("%.3f", b.mean) + "/" +
           fmt("%.4f", b.stddev) + ", C " + fmt("%.3f", c.mean) + "/" + fmt("%.3f", c.stddev) +
           " (A, C sd differ from reported 1.12, 1.28 by " + fmt("%.3f", a.stddev - 1.12) + ", " +
           fmt("%.3f", c.stddev - 1.28) + ")");
    return o;
}

// 2. Colormap round trip versus direct grayscale.
Outcome depth_round_trip()
{
    Outcome o;
    const auto spec = imaging::ColormapSpec::blue_red();
    const double near = 0.2, far = 2.0;
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> dim(1, 40);
    std::uniform_real_distribution<double> depth(0.01, 3.0), u(0, 1);
    int worst = 0;
    std::size_t pixels = 0;
    for (int f = 0; f < 1000; ++f) {
        const int w = dim(rng), h = dim(rng);
        imaging::DepthFrame d(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double r = u(rng);
                if (r < 0.05)
                    d.invalidate(x, y);
                else
                    d.set(x, y, static_cast<float>(r < 0.1 ? (u(rng) < 0.5 ? near : far) : depth(rng)));
            }
        const auto via = imaging::depth_colormap_to_grayscale(imaging::encode_depth_colormap(d, spec, near, far), spec,
                                                              near, far);
        const auto direct = imaging::depth_to_grayscale(d, near, far);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                worst = std::max(worst, std::abs(int(*via.at(x, y)) - int(*direct.at(x, y))));
        pixels += static_cast<std::size_t>(w) * h;
    }
    o.require(worst <= 1, "max gray difference " + std::to_string(worst));
    o.note("1000 frames, " + std::to_string(pixels) + " pixels, max |diff| = " + std::to_string(worst));
    return o;
}

// 3. Centroid-shift validation.
Outcome background_validation()
{
    Outcome o;
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> canvas(60, 160);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    int flag_checks = 0;
    for (int g = 0; g < 100; ++g) {
        const int w = canvas(rng), h = canvas(rng);
        imaging::SegmentationMask m(w, h);
        // Elliptical object in the left half.
        const double rx = 4 + u(rng) * (w / 4.0 - 5), ry = 4 + u(rng) * (h / 2.0 - 5);
        const double cx = rx + 1 + u(rng) * (w / 2.0 - 2 * rx - 2), cy = ry + 1 + u(rng) * (h - 2 * ry - 2);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double dx = (x - cx) / rx, dy = (y - cy) / ry;
                if (dx * dx + dy * dy <= 1)
                    m.set(x, y);
            }
        double ox = 0, oy = 0, on = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (m.test(x, y))
                    ox += x, oy += y, on += 1;
        // Residual rectangle in the right half, smaller than the object.
        const int side = std::max(1, static_cast<int>(std::sqrt(on) * (0.05 + 0.6 * u(rng))));
        const int rw = std::min(side, w / 2 - 2), rh = std::min(side, h - 2);
        const int rx0 = w / 2 + 1 + static_cast<int>(u(rng) * (w - w / 2 - 1 - rw));
        const int ry0 = static_cast<int>(u(rng) * (h - rh));
        if (g % 10 != 0) // every tenth geometry has no residual
            m.fill_rect(rx0, ry0, rw, rh);

        double sx = 0, sy = 0, n = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (m.test(x, y))
                    sx += x, sy += y, n += 1;
        const double shift = std::hypot(sx / n - ox / on, sy / n - oy / on);
        const double residual = (n - on) / n;

        const auto rep = imaging::validate_background_removal(m);
        worst = std::max(worst, std::abs(rep.centroid_shift - shift));
        o.require(rep.total_area == static_cast<std::size_t>(n), "total area");
        o.require(std::abs(rep.residual_fraction - residual) <= 1e-12, "residual fraction");
        o.require(rep.passed == (rep.centroid_shift <= 5.0 && rep.residual_fraction <= 0.05), "default flag");

        // Thresholds set exactly at the measured values pass; one ulp below fails.
        const double s = rep.centroid_shift, r = rep.residual_fraction;
        o.require(imaging::validate_background_removal(m, s, r).passed, "flag at exact thresholds");
        if (s > 0) {
            o.require(!imaging::validate_background_removal(m, std::nextafter(s, 0.0), r).passed, "shift ulp");
            ++flag_checks;
        }
        if (r > 0) {
            o.require(!imaging::validate_background_removal(m, s, std::nextafter(r, 0.0)).passed, "residual ulp");
            ++flag_checks;
        }
    }
    o.require(worst <= 1e-6, "centroid shift error " + fmt("%.3g", worst));

    // Fault-injected stub pipeline.
    ScratchDir dir;
    genai::StubConfig stub;
    stub.inject_residual = true;
    pipeline::Engine e(engine_options(dir.path()), genai::make_stub_backends(stub));
    const auto s = e.run_to_completion(e.create_session(fixtures::make_capture(), "a cute transformer toy"));
    o.require(s.stage == pipeline::Stage::Failed, "fault-injected run ended " + std::string(pipeline::to_string(s.stage)));
    o.require(s.error && s.error->stage == pipeline::Stage::BackgroundRemoved &&
                  s.error->kind == ErrorKind::ValidationFailed,
              "failure not at BackgroundRemoved with ValidationFailed");
    o.require(s.mask_report.has_value() && !s.mask_report->passed, "mask report missing or passing");
    if (s.mask_report && s.artifacts.count("generated")) {
        const auto img = imaging::decode_rgb_png(e.store().get(s.artifacts.at("generated")));
        const auto expect = imaging::validate_background_removal(genai::StubBackgroundRemover().remove_background(img).mask);
        o.require(pipeline::to_json(expect) == pipeline::to_json(*s.mask_report), "attached report differs");
        o.note("fault run: shift " + fmt("%.3f", s.mask_report->centroid_shift) + " px, residual " +
               fmt("%.4f", s.mask_report->residual_fraction));
    }
    o.note("100 geometries, max |shift - oracle| = " + fmt("%.2g", worst) + ", " + std::to_string(flag_checks) +
           " ulp flag checks");
    return o;
}

geometry::TriMesh random_mesh(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> center(-5, 5), size(0.01, 3), unit(0, 1);
    std::uniform_int_distribution<int> count(3, 200);
    const geometry::Vec3 c{center(rng), center(rng), center(rng)};
    const geometry::Vec3 s{size(rng), size(rng), size(rng)};
    geometry::TriMesh m;
    const int nv = count(rng);
    for (int i = 0; i < nv; ++i)
        m.vertices.push_back(c + geometry::Vec3{s.x() * unit(rng), s.y() * unit(rng), s.z() * unit(rng)});
    std::uniform_int_distribution<std::uint32_t> idx(0, static_cast<std::uint32_t>(nv - 1));
    const int nt = count(rng);
    for (int i = 0; i < nt; ++i)
        m.triangles.push_back({idx(rng), idx(rng), idx(rng)});
    return m;
}

// 4. Mesh normalization and OBJ round trip.
Outcome mesh_normalization()
{
    Outcome o;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> target(0.05, 2.0);
    double center_err = 0, extent_err = 0, idem_err = 0, obj_err = 0;
    for (int i = 0; i < 100; ++i) {
        const auto m = random_mesh(rng);
        const double t = target(rng);
        const auto n = geometry::normalize_mesh(m, t);
        const auto box = geometry::mesh_aabb(n);
        center_err = std::max(center_err, ((box.min + box.max) / 2).norm());
        extent_err = std::max(extent_err, std::abs((box.max - box.min).maxCoeff() - t));
        const auto nn = geometry::normalize_mesh(n, t);
        for (std::size_t v = 0; v < n.vertices.size(); ++v)
            idem_err = std::max(idem_err, (nn.vertices[v] - n.vertices[v]).norm());
        const auto back = geometry::parse_obj(geometry::write_obj(n));
        o.require(back.triangles == n.triangles, "OBJ triangles changed");
        o.require(back.vertices.size() == n.vertices.size(), "OBJ vertex count changed");
        for (std::size_t v = 0; v < std::min(back.vertices.size(), n.vertices.size()); ++v)
            obj_err = std::max(obj_err, (back.vertices[v] - n.vertices[v]).cwiseAbs().maxCoeff());
    }
    o.require(center_err <= 1e-9, "center error " + fmt("%.3g", center_err));
    o.require(extent_err <= 1e-9, "extent error " + fmt("%.3g", extent_err));
    o.require(idem_err <= 1e-9, "idempotence error " + fmt("%.3g", idem_err));
    o.require(obj_err <= 1e-6, "OBJ coordinate error " + fmt("%.3g", obj_err));
    o.note("center " + fmt("%.2g", center_err) + ", extent " + fmt("%.2g", extent_err) + ", idempotence " +
           fmt("%.2g", idem_err) + ", OBJ " + fmt("%.2g", obj_err));
    return o;
}

tracking::ModelTarget box_target()
{
    geometry::TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.triangles = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    return tracking::build_model_target(imaging::RgbImage(2, 2, 50), m, {0.2, 0.15, 0.1});
}

// 5. Tracking and anchoring.
Outcome tracking_anchoring()
{
    Outcome o;
    using tracking::TrackPhase;
    const auto target = box_target();
    tracking::TrackerConfig cfg;

    // Zero noise, no occlusion.
    std::vector<tracking::Keyframe> keys;
    for (int i = 0; i <= 4; ++i) {
        const double t = 0.5 * i;
        geometry::Pose p;
        p.translation = {0.2 * t, -0.1 * t, 0.5};
        p.rotation = geometry::Quat(Eigen::AngleAxisd(0.4 * t, Eigen::Vector3d(1, 1, 0).normalized()));
        keys.push_back({t, p, 0.0});
    }
    const tracking::Trajectory clean(keys);
    const auto log = tracking::run_trajectory(clean, target, cfg);
    const auto err = log.max_error();
    o.require(err.translation_m <= 1e-9, "zero-noise translation error " + fmt("%.3g", err.translation_m));
    o.require(err.rotation_deg <= 1e-7, "zero-noise rotation error " + fmt("%.3g", err.rotation_deg));
    o.require(log.frames.size() <= 31, "2 s at 15 fps emitted " + std::to_string(log.frames.size()) + " frames");
    for (std::size_t i = 1; i < log.frames.size(); ++i)
        o.require(log.frames[i].t - log.frames[i - 1].t >= 1 / 15.0 - 1e-9, "cadence violated");

    // Scripted occlusion window.
    const auto occl = tracking::run_trajectory(oracle::scripted_occlusion(0.5, 1.0), target, cfg);
    o.require(occl.episodes.size() == 1, std::to_string(occl.episodes.size()) + " loss episodes");
    if (occl.episodes.size() == 1) {
        const auto& ep = occl.episodes[0];
        std::optional<geometry::Pose> frozen;
        bool constant = true;
        int lost_frames = 0;
        for (const auto& f : occl.frames) {
            if (f.phase != TrackPhase::Lost)
                continue;
            ++lost_frames;
            if (!frozen)
                frozen = f.anchor;
            constant = constant && f.anchor && geometry::bitwise_equal(*f.anchor, *frozen);
        }
        o.require(constant, "anchor moved while Lost");
        o.require(ep.resolved && ep.visible_again.has_value(), "episode not resolved");
        if (ep.visible_again) {
            // Frames from the first clear frame to reacquisition, inclusive.
            const long visible = std::lround((ep.end - *ep.visible_again) * 15.0) + 1;
            o.require(visible == 3, "reacquired after " + std::to_string(visible) + " visible frames");
            o.require(std::abs(ep.start - 0.5) <= 1 / 15.0 && std::abs(*ep.visible_again - 1.0) <= 1 / 15.0,
                      "episode bounds off the window");
        }
        o.note("occlusion: 1 episode " + fmt("%.3f", ep.start) + ".." + fmt("%.3f", ep.end) + " s, " +
               std::to_string(lost_frames) + " frozen frames");
    }

    // State machine against the enumeration oracle.
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(1, 60), frames(1, 5);
    int mismatches = 0, reacquisitions = 0;
    for (int seq = 0; seq < 10000; ++seq) {
        tracking::TrackerConfig c;
        c.reacquire_frames = seq % 3 == 0 ? 3 : frames(rng);
        const auto obs = oracle::random_sequence(rng, c, len(rng));
        const auto expected = oracle::enumerate(obs, c);
        std::mt19937_64 noise(0);
        tracking::TrackerState s;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const auto before = s.phase;
            s = tracking::tracker_step(s, obs[i], c, noise);
            const bool ok = s.phase == expected[i].phase &&
                            s.output_pose.has_value() == (expected[i].source >= 0) &&
                            (!s.output_pose || geometry::bitwise_equal(*s.output_pose, obs[expected[i].source].true_pose));
            if (!ok) {
                ++mismatches;
                break;
            }
            reacquisitions += before == TrackPhase::Lost && s.phase == TrackPhase::Tracking;
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " of 10000 sequences disagree with the oracle");
    o.note("zero-noise max error " + fmt("%.2g", err.translation_m) + " m / " + fmt("%.2g", err.rotation_deg) +
           " deg, " + std::to_string(log.frames.size()) + " frames in 2 s, 10000 sequences agree (" +
           std::to_string(reacquisitions) + " reacquisitions)");
    return o;
}

// 6. Determinism and crash safety.
Outcome pipeline_determinism()
{
    Outcome o;
    const auto capture = fixtures::make_capture();
    const std::string prompt = "Teddybear holding a rocket and spear weapon";
    std::map<std::string, std::string> first, second;
    {
        ScratchDir a, b;
        pipeline::Engine ea(engine_options(a.path()), genai::make_stub_backends());
        pipeline::Engine eb(engine_options(b.path()), genai::make_stub_backends());
        const auto ia = ea.create_session(capture, prompt, seeded(42));
        const auto ib = eb.create_session(capture, prompt, seeded(42));
        o.require(ea.run_to_completion(ia).stage == pipeline::Stage::Anchored, "first run not Anchored");
        o.require(eb.run_to_completion(ib).stage == pipeline::Stage::Anchored, "second run not Anchored");
        first = hashes(ea, ia);
        second = hashes(eb, ib);
        o.require(first == second, "artifact hashes differ between runs");
        o.require(first.size() == 10, std::to_string(first.size()) + " artifacts");
    }
    for (int stop = 0; stop <= 5; ++stop) {
        ScratchDir run;
        std::string id;
        {
            pipeline::Engine e(engine_options(run.path()), genai::make_stub_backends());
            id = e.create_session(capture, prompt, seeded(42));
            for (int k = 0; k < stop; ++k)
                e.advance(id);
        }
        std::ofstream(run.path() / "sessions" / (id + ".events.jsonl"), std::ios::app) << "{\"event\":\"stage_comp";
        pipeline::Engine e(engine_options(run.path()), genai::make_stub_backends());
        o.require(pipeline::stage_index(e.get(id).stage) == stop, "restart lost progress after stage " + std::to_string(stop));
        e.run_to_completion(id);
        o.require(hashes(e, id) == first, "hashes differ after restart following stage " + std::to_string(stop));
    }

    // Status read while a 1 s backend call is in flight.
    ScratchDir svc_root;
    auto backends = genai::make_stub_backends();
    auto slow = std::make_shared<SlowGenerator>(backends.generator, std::chrono::milliseconds(1000));
    backends.generator = slow;
    service::ServiceConfig cfg;
    cfg.root = svc_root.path();
    harness::RunningServer srv(cfg, backends);
    auto c = srv.client();
    const auto created = c->Post("/sessions", harness::capture_form(capture, prompt, "42"));
    o.require(created && created->status == 201, "create failed");
    if (created && created->status == 201) {
        const std::string id = nlohmann::json::parse(created->body).at("id");
        while (!slow->started())
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
        const auto t0 = Clock::now();
        const auto r = c->Get("/sessions/" + id);
        const double http_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        const auto t1 = Clock::now();
        srv.server().engine().get(id);
        const double direct_ms = std::chrono::duration<double, std::milli>(Clock::now() - t1).count();
        o.require(r && r->status == 200, "status read failed");
        o.require(http_ms < 50, "HTTP status read took " + fmt("%.1f", http_ms) + " ms");
        o.require(direct_ms < 50, "engine status read took " + fmt("%.1f", direct_ms) + " ms");
        o.require(r && nlohmann::json::parse(r->body).at("stage") == "DepthPreprocessed", "unexpected stage mid-call");
        o.note("2 runs + 6 restarts identical over " + std::to_string(first.size()) +
               " artifacts; status read during slow call " + fmt("%.2f", http_ms) + " ms");
        harness::wait_terminal(*c, id);
    }
    return o;
}

// 7. Tracking reference provenance.
Outcome provenance_contract()
{
    Outcome o;
    const auto capture = fixtures::make_capture();
    ScratchDir dir;
    auto opts = engine_options(dir.path());
    opts.target_reference_kind = "generated";
    pipeline::Engine bad(opts, genai::make_stub_backends());
    const auto s = bad.run_to_completion(bad.create_session(capture, "astronaut"));
    o.require(s.stage == pipeline::Stage::Failed, "generated-image run ended " + std::string(pipeline::to_string(s.stage)));
    o.require(s.error && s.error->stage == pipeline::Stage::TargetBuilt, "failure not at TargetBuilt");
    o.require(s.error && s.error->kind == ErrorKind::ProvenanceViolation, "failure kind not ProvenanceViolation");

    ScratchDir ok_dir;
    pipeline::Engine good(engine_options(ok_dir.path()), genai::make_stub_backends());
    const auto id = good.create_session(capture, "astronaut");
    o.require(good.run_to_completion(id).stage == pipeline::Stage::Anchored, "capture-image run not Anchored");
    const auto target = good.model_target(id);
    o.require(target->reference_image == capture.rgb, "reference image is not the capture");
    o.require(target->reference_provenance == tracking::Provenance::Original, "reference not tagged original");
    if (s.error)
        o.note("rejected: " + s.error->reason);
    return o;
}

// 8. HTTP happy path.
Outcome service_conformance()
{
    Outcome o;
    const auto t0 = Clock::now();
    ScratchDir dir;
    service::ServiceConfig cfg;
    cfg.root = dir.path();
    harness::RunningServer srv(cfg);
    auto c = srv.client();

    const auto created = c->Post("/sessions", harness::capture_form(fixtures::make_capture(), "a blue Smurfs wearing hats", "3"));
    o.require(created && created->status == 201, "create");
    if (!o.pass)
        return o;
    const std::string id = nlohmann::json::parse(created->body).at("id");
    const auto s = harness::wait_terminal(*c, id, std::chrono::seconds(8));
    o.require(s.value("stage", "") == "Anchored", "poll did not reach Anchored");

    for (const char* kind : {"capture_rgb", "depth_gray", "generated", "cutout", "mesh_obj", "target_ref", "anchor"}) {
        const auto r = c->Get("/sessions/" + id + "/artifacts/" + kind);
        o.require(r && r->status == 200 && r->get_header_value("X-Content-SHA256") == pipeline::sha256_hex(r->body),
                  std::string("artifact ") + kind);
    }
    const auto traj = c->Post("/sessions/" + id + "/trajectory", harness::occlusion_trajectory_json(), "application/json");
    o.require(traj && traj->status == 200, "trajectory");
    const auto stream = c->Get("/sessions/" + id + "/track");
    o.require(stream && stream->status == 200, "stream");
    std::size_t snapshots = 0;
    bool frozen_ok = true;
    nlohmann::json frozen;
    if (stream) {
        for (const auto& ev : harness::parse_sse(stream->body)) {
            if (ev.event != "snapshot")
                continue;
            ++snapshots;
            const auto snap = nlohmann::json::parse(ev.data);
            if (snap.at("phase") == "Lost") {
                if (frozen.is_null())
                    frozen = snap.at("anchor");
                frozen_ok = frozen_ok && snap.at("anchor") == frozen;
            }
        }
    }
    o.require(snapshots > 0 && snapshots <= 31, std::to_string(snapshots) + " snapshots");
    o.require(!frozen.is_null() && frozen_ok, "Lost snapshots not frozen");
    const auto rated = c->Post("/sessions/" + id + "/rating", R"({"rating": 5, "group": "A"})", "application/json");
    o.require(rated && rated->status == 204, "rating");
    const auto summary = c->Get("/analytics/summary?group=A");
    o.require(summary && summary->status == 200, "summary");
    if (summary && summary->status == 200) {
        const auto j = nlohmann::json::parse(summary->body);
        o.require(j.at("n") == 1 && j.at("mean") == 5.0, "summary does not reflect the rating");
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(secs < 10, "took " + fmt("%.2f", secs) + " s");
    o.note("create to summary in " + fmt("%.2f", secs) + " s, " + std::to_string(snapshots) + " snapshots streamed");
    return o;
}

} // namespace

int main()
{
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"study group statistics", study_group_statistics},
        {"depth colormap round trip", depth_round_trip},
        {"background-removal validation", background_validation},
        {"mesh normalization", mesh_normalization},
        {"tracking and anchoring", tracking_anchoring},
        {"pipeline determinism and crash safety", pipeline_determinism},
        {"provenance contract", provenance_contract},
        {"service conformance", service_conformance},
    };
    int failed = 0;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        failed += !o.pass;
        std::printf("%s %zu %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed in %.2f s\n", static_cast<int>(std::size(criteria)) - failed,
                std::size(criteria), std::chrono::duration<double>(Clock::now() - start).count());
    return failed == 0 ? 0 : 1;
}
