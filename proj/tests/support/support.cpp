#include "support.hpp"

#include "repurpose/genai/remote.hpp"
#include "repurpose/genai/stub.hpp"
#include "repurpose/imaging/image_io.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstring>

namespace testsupport {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace repurpose;

TempDir::TempDir()
{
    std::random_device rd;
    for (;;) {
        path_ = fs::temp_directory_path() / ("repurpose-test-" + std::to_string(rd()) + std::to_string(rd()));
        if (fs::create_directories(path_))
            break;
    }
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void pad_to_4(std::vector<std::uint8_t>& v, std::uint8_t fill)
{
    while (v.size() % 4)
        v.push_back(fill);
}

} // namespace

std::vector<std::uint8_t> write_glb(const geometry::TriMesh& mesh, int index_type, bool with_indices)
{
    std::vector<std::uint8_t> bin;
    for (const auto& v : mesh.vertices) {
        for (int a = 0; a < 3; ++a) {
            const float f = static_cast<float>(v[a]);
            std::uint8_t b[4];
            std::memcpy(b, &f, 4);
            bin.insert(bin.end(), b, b + 4);
        }
    }
    const std::size_t pos_bytes = bin.size();
    const std::size_t idx_offset = bin.size();
    const int idx_size = index_type == 5121 ? 1 : index_type == 5123 ? 2 : 4;
    if (with_indices) {
        for (const auto& t : mesh.triangles)
            for (auto i : t)
                for (int k = 0; k < idx_size; ++k)
                    bin.push_back(static_cast<std::uint8_t>(i >> (8 * k)));
    }
    const std::size_t idx_bytes = bin.size() - idx_offset;
    pad_to_4(bin, 0);

    json accessors = json::array();
    json views = json::array();
    views.push_back({{"buffer", 0}, {"byteOffset", 0}, {"byteLength", pos_bytes}});
    accessors.push_back({{"bufferView", 0}, {"componentType", 5126}, {"count", mesh.vertices.size()}, {"type", "VEC3"}});
    json primitive{{"attributes", {{"POSITION", 0}}}, {"mode", 4}};
    if (with_indices) {
        views.push_back({{"buffer", 0}, {"byteOffset", idx_offset}, {"byteLength", idx_bytes}});
        accessors.push_back({{"bufferView", 1},
                             {"componentType", index_type},
                             {"count", mesh.triangles.size() * 3},
                             {"type", "SCALAR"}});
        primitive["indices"] = 1;
    }
    const json doc{{"asset", {{"version", "2.0"}}},
                   {"buffers", {{{"byteLength", bin.size()}}}},
                   {"bufferViews", views},
                   {"accessors", accessors},
                   {"meshes", {{{"primitives", {primitive}}}}}};
    return glb_container(doc.dump(), std::move(bin));
}

std::vector<std::uint8_t> glb_container(const std::string& text, std::vector<std::uint8_t> bin)
{
    std::vector<std::uint8_t> js(text.begin(), text.end());
    pad_to_4(js, ' ');
    pad_to_4(bin, 0);

    std::vector<std::uint8_t> out;
    put_u32(out, 0x46546C67);
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(12 + 8 + js.size() + 8 + bin.size()));
    put_u32(out, static_cast<std::uint32_t>(js.size()));
    put_u32(out, 0x4E4F534A);
    out.insert(out.end(), js.begin(), js.end());
    put_u32(out, static_cast<std::uint32_t>(bin.size()));
    put_u32(out, 0x004E4942);
    out.insert(out.end(), bin.begin(), bin.end());
    return out;
}

geometry::TriMesh random_mesh(std::mt19937_64& rng, std::size_t nv, std::size_t nt)
{
    std::uniform_real_distribution<double> center(-5, 5);
    std::uniform_real_distribution<double> size(0.01, 3);
    std::uniform_real_distribution<double> unit(0, 1);
    const geometry::Vec3 c{center(rng), center(rng), center(rng)};
    const geometry::Vec3 s{size(rng), size(rng), size(rng)};
    geometry::TriMesh m;
    for (std::size_t i = 0; i < nv; ++i)
        m.vertices.push_back(c + geometry::Vec3{s.x() * unit(rng), s.y() * unit(rng), s.z() * unit(rng)});
    std::uniform_int_distribution<std::uint32_t> idx(0, static_cast<std::uint32_t>(nv - 1));
    for (std::size_t i = 0; i < nt; ++i)
        m.triangles.push_back({idx(rng), idx(rng), idx(rng)});
    return m;
}

FakeRemote::FakeRemote() : server_(std::make_unique<httplib::Server>())
{
    auto record = [this](const httplib::Request& req, httplib::Response& res) -> bool {
        ++requests_;
        {
            std::lock_guard l(mu_);
            auth_.push_back(req.get_header_value("Authorization"));
            paths_.push_back(req.path);
            bodies_.emplace_back(req.path, req.body);
        }
        if (fail_remaining_ > 0) {
            --fail_remaining_;
            res.status = fail_status_;
            res.set_content(json{{"error", "injected failure"}}.dump(), "application/json");
            return false;
        }
        return true;
    };
    auto bytes = [](const std::string& b64) { return genai::base64_decode(b64); };

    server_->Post("/v1/generate", [=, this](const httplib::Request& req, httplib::Response& res) {
        if (!record(req, res))
            return;
        const auto j = json::parse(req.body);
        genai::GenerationConfig cfg;
        cfg.prompt = j.at("prompt").get<std::string>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        const auto gray = imaging::decode_gray_png(bytes(j.at("depth_png_base64").get<std::string>()));
        const auto img = genai::StubImageGenerator().text_to_image(gray, cfg);
        res.set_content(json{{"image_png_base64", genai::base64_encode(imaging::encode_png(img))}}.dump(),
                        "application/json");
    });
    server_->Post("/v1/rembg", [=, this](const httplib::Request& req, httplib::Response& res) {
        if (!record(req, res))
            return;
        const auto j = json::parse(req.body);
        const auto img = imaging::decode_rgb_png(bytes(j.at("image_png_base64").get<std::string>()));
        const auto cut = genai::StubBackgroundRemover().remove_background(img);
        res.set_content(json{{"cutout_png_base64", genai::base64_encode(imaging::encode_png(cut.image))}}.dump(),
                        "application/json");
    });
    server_->Post("/v1/reconstruct", [=, this](const httplib::Request& req, httplib::Response& res) {
        if (!record(req, res))
            return;
        const auto j = json::parse(req.body);
        const auto cut = imaging::decode_rgba_png(bytes(j.at("cutout_png_base64").get<std::string>()));
        const auto mesh = genai::StubMeshReconstructor().image_to_mesh(cut);
        std::string format = j.at("format").get<std::string>();
        {
            std::lock_guard l(mu_);
            if (!format_override_.empty())
                format = format_override_;
        }
        std::vector<std::uint8_t> model;
        if (format == "glb") {
            model = write_glb(mesh);
        } else {
            const std::string obj = geometry::write_obj(mesh);
            model.assign(obj.begin(), obj.end());
        }
        res.set_content(json{{"model_base64", genai::base64_encode(model)}, {"format", format}}.dump(),
                        "application/json");
    });
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

FakeRemote::~FakeRemote()
{
    server_->stop();
    if (thread_.joinable())
        thread_.join();
}

std::string FakeRemote::base_url() const
{
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
}

void FakeRemote::fail_next(int n, int status)
{
    fail_status_ = status;
    fail_remaining_ = n;
}

std::vector<std::string> FakeRemote::auth_headers() const
{
    std::lock_guard l(mu_);
    return auth_;
}

std::vector<std::string> FakeRemote::paths() const
{
    std::lock_guard l(mu_);
    return paths_;
}

std::string FakeRemote::last_body(const std::string& path) const
{
    std::lock_guard l(mu_);
    for (auto it = bodies_.rbegin(); it != bodies_.rend(); ++it)
        if (it->first == path)
            return it->second;
    return {};
}

} // namespace testsupport
