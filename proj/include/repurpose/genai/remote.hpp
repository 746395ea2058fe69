#pragma once

#include "repurpose/genai/backend.hpp"
#include "repurpose/genai/retry.hpp"

#include <span>
#include <string>
#include <vector>

namespace repurpose::genai {

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// JSON-over-HTTP client for the remote stage servers:
///   POST {base}/generate    {prompt, seed, control_mode, checkpoint_id,
///                            use_native_depth_estimation, depth_png_base64}
///                         -> {image_png_base64}
///   POST {base}/rembg       {image_png_base64} -> {cutout_png_base64}
///   POST {base}/reconstruct {cutout_png_base64, format} -> {model_base64, format}
/// Non-2xx replies carry {error}.
class RemoteClient {
public:
    RemoteClient(BackendEndpoint endpoint, RetryPolicy policy = {});

    /// A single POST of a JSON body; throws on transport errors and non-2xx
    /// replies. Returns the reply body.
    std::string post_once(const std::string& path, const std::string& body) const;

    /// post_once plus `decode`, retried as a unit under the endpoint policy.
    template <typename Decode>
    auto call(const std::string& stage, const std::string& path, const std::string& body, Decode&& decode) const
    {
        return call_with_retries(endpoint_, stage, [&] { return decode(post_once(path, body)); }, policy_);
    }

    const BackendEndpoint& endpoint() const noexcept { return endpoint_; }

private:
    BackendEndpoint endpoint_;
    RetryPolicy policy_;
    std::string host_;    ///< scheme://host:port
    std::string prefix_;  ///< path prefix without trailing slash
};

class RemoteImageGenerator final : public ImageGenerator {
public:
    explicit RemoteImageGenerator(std::shared_ptr<const RemoteClient> client) : client_(std::move(client)) {}
    imaging::RgbImage text_to_image(const imaging::GrayImage& conditioning, const GenerationConfig& cfg) override;

private:
    std::shared_ptr<const RemoteClient> client_;
};

class RemoteBackgroundRemover final : public BackgroundRemover {
public:
    explicit RemoteBackgroundRemover(std::shared_ptr<const RemoteClient> client) : client_(std::move(client)) {}
    Cutout remove_background(const imaging::RgbImage& image) override;

private:
    std::shared_ptr<const RemoteClient> client_;
};

enum class MeshFormat { Obj, Glb };

class RemoteMeshReconstructor final : public MeshReconstructor {
public:
    RemoteMeshReconstructor(std::shared_ptr<const RemoteClient> client, MeshFormat format = MeshFormat::Obj)
        : client_(std::move(client)), format_(format)
    {
    }
    geometry::TriMesh image_to_mesh(const imaging::RgbaImage& cutout) override;

private:
    std::shared_ptr<const RemoteClient> client_;
    MeshFormat format_;
};

BackendSet make_remote_backends(const BackendEndpoint& endpoint, const RetryPolicy& policy = {},
                                MeshFormat format = MeshFormat::Obj);

} // namespace repurpose::genai
