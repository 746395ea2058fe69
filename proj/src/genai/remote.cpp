#include "repurpose/genai/remote.hpp"

#include "repurpose/imaging/image_io.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace repurpose::genai {

using nlohmann::json;

std::string base64_encode(std::span<const std::uint8_t> bytes)
{
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text)
{
    if (text.size() % 4 != 0)
        throw Error(ErrorKind::InvalidInput, "base64 length is not a multiple of 4");
    std::vector<std::uint8_t> out(3 * (text.size() / 4));
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0)
        throw Error(ErrorKind::InvalidInput, "invalid base64");
    std::size_t len = static_cast<std::size_t>(n);
    // EVP_DecodeBlock counts padding as zero bytes.
    if (!text.empty() && text.back() == '=')
        --len;
    if (text.size() > 1 && text[text.size() - 2] == '=')
        --len;
    out.resize(len);
    return out;
}

RemoteClient::RemoteClient(BackendEndpoint endpoint, RetryPolicy policy)
    : endpoint_(std::move(endpoint)), policy_(std::move(policy))
{
    endpoint_.validate();
    const auto scheme = endpoint_.base_url.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto path = endpoint_.base_url.find('/', host_start);
    host_ = endpoint_.base_url.substr(0, path);
    prefix_ = path == std::string::npos ? "" : endpoint_.base_url.substr(path);
    while (!prefix_.empty() && prefix_.back() == '/')
        prefix_.pop_back();
}

std::string RemoteClient::post_once(const std::string& path, const std::string& body) const
{
    httplib::Client cli(host_);
    const auto secs = std::chrono::duration<double>(endpoint_.request_timeout_s);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(secs);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    httplib::Headers headers;
    if (endpoint_.auth_token)
        headers.emplace("Authorization", "Bearer " + *endpoint_.auth_token);

    auto res = cli.Post(prefix_ + path, headers, body, "application/json");
    if (!res)
        throw Error(ErrorKind::BackendUnavailable, "POST " + path + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        std::string reason = res->body;
        try {
            reason = json::parse(res->body).at("error").get<std::string>();
        } catch (...) {
        }
        throw Error(ErrorKind::BackendUnavailable, "POST " + path + ": HTTP " + std::to_string(res->status) + " " + reason);
    }
    return res->body;
}

namespace {

std::string reply_field(const std::string& body, const char* key)
{
    try {
        return json::parse(body).at(key).get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BackendUnavailable, std::string("malformed reply, missing '") + key + "'");
    }
}

} // namespace

imaging::RgbImage RemoteImageGenerator::text_to_image(const imaging::GrayImage& conditioning,
                                                      const GenerationConfig& cfg)
{
    cfg.validate();
    if (conditioning.empty())
        throw Error(ErrorKind::InvalidInput, "conditioning image is empty");
    const json req{{"prompt", cfg.prompt},
                   {"seed", cfg.seed},
                   {"control_mode", to_string(cfg.control_mode)},
                   {"checkpoint_id", cfg.checkpoint_id},
                   {"use_native_depth_estimation", cfg.use_native_depth_estimation},
                   {"depth_png_base64", base64_encode(imaging::encode_png(conditioning))}};
    return client_->call("ImageGenerated", "/generate", req.dump(), [&](const std::string& body) {
        auto img = imaging::decode_rgb_png(base64_decode(reply_field(body, "image_png_base64")));
        if (img.width() != conditioning.width() || img.height() != conditioning.height())
            throw Error(ErrorKind::BackendUnavailable, "generated image size differs from conditioning");
        return img;
    });
}

Cutout RemoteBackgroundRemover::remove_background(const imaging::RgbImage& image)
{
    if (image.empty())
        throw Error(ErrorKind::InvalidInput, "image is empty");
    const json req{{"image_png_base64", base64_encode(imaging::encode_png(image))}};
    auto cut = client_->call("BackgroundRemoved", "/rembg", req.dump(), [&](const std::string& body) {
        return cutout_from_rgba(imaging::decode_rgba_png(base64_decode(reply_field(body, "cutout_png_base64"))));
    });
    if (cut.mask.empty())
        throw Error(ErrorKind::NothingSegmented, "remote background removal returned an empty cutout");
    return cut;
}

geometry::TriMesh RemoteMeshReconstructor::image_to_mesh(const imaging::RgbaImage& cutout)
{
    const std::string fmt = format_ == MeshFormat::Obj ? "obj" : "glb";
    bool any_opaque = false;
    for (int y = 0; y < cutout.height() && !any_opaque; ++y)
        for (int x = 0; x < cutout.width() && !any_opaque; ++x)
            any_opaque = cutout.at(x, y)[3] != 0;
    if (!any_opaque)
        throw Error(ErrorKind::NothingSegmented, "cutout is fully transparent");

    const json req{{"cutout_png_base64", base64_encode(imaging::encode_png(cutout))}, {"format", fmt}};
    return client_->call("MeshReconstructed", "/reconstruct", req.dump(), [&](const std::string& body) {
        const auto bytes = base64_decode(reply_field(body, "model_base64"));
        const auto reply_fmt = reply_field(body, "format");
        geometry::TriMesh mesh;
        if (reply_fmt == "obj")
            mesh = geometry::parse_obj({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
        else if (reply_fmt == "glb")
            mesh = geometry::parse_glb(bytes);
        else
            throw Error(ErrorKind::BackendUnavailable, "unknown model format '" + reply_fmt + "'");
        mesh.validate();
        return mesh;
    });
}

BackendSet make_remote_backends(const BackendEndpoint& endpoint, const RetryPolicy& policy, MeshFormat format)
{
    auto client = std::make_shared<const RemoteClient>(endpoint, policy);
    return {std::make_shared<RemoteImageGenerator>(client), std::make_shared<RemoteBackgroundRemover>(client),
            std::make_shared<RemoteMeshReconstructor>(client, format)};
}

} // namespace repurpose::genai
