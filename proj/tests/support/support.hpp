#pragma once

#include "repurpose/genai/backend.hpp"
#include "repurpose/geometry/mesh.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// Minimal glTF 2.0 binary: one mesh, one triangle primitive, float POSITION
/// and optional indices of the given component type (5121, 5123, 5125).
std::vector<std::uint8_t> write_glb(const repurpose::geometry::TriMesh& mesh, int index_component_type = 5125,
                                    bool with_indices = true);

/// GLB container around an arbitrary JSON chunk and binary chunk.
std::vector<std::uint8_t> glb_container(const std::string& json_chunk, std::vector<std::uint8_t> bin);

/// Random closed-ish mesh with vertices in a box of random center and size.
repurpose::geometry::TriMesh random_mesh(std::mt19937_64& rng, std::size_t vertices, std::size_t triangles);

/// HTTP server speaking the remote stage protocol, backed by the stubs.
/// Can be told to fail the next N requests.
class FakeRemote {
public:
    FakeRemote();
    ~FakeRemote();

    std::string base_url() const;
    void fail_next(int n, int status = 500);
    void set_mesh_format_override(std::string format) { std::lock_guard l(mu_); format_override_ = std::move(format); }
    int requests() const noexcept { return requests_; }
    std::vector<std::string> auth_headers() const;
    std::vector<std::string> paths() const;
    std::string last_body(const std::string& path) const;

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> requests_{0};
    std::atomic<int> fail_remaining_{0};
    std::atomic<int> fail_status_{500};
    mutable std::mutex mu_;
    std::vector<std::string> auth_;
    std::vector<std::string> paths_;
    std::vector<std::pair<std::string, std::string>> bodies_;
    std::string format_override_;
};

/// Wraps a generator and sleeps before delegating; counts calls.
class SlowGenerator final : public repurpose::genai::ImageGenerator {
public:
    SlowGenerator(std::shared_ptr<repurpose::genai::ImageGenerator> inner, std::chrono::milliseconds delay)
        : inner_(std::move(inner)), delay_(delay)
    {
    }
    repurpose::imaging::RgbImage text_to_image(const repurpose::imaging::GrayImage& g,
                                               const repurpose::genai::GenerationConfig& c) override
    {
        started_ = true;
        std::this_thread::sleep_for(delay_);
        ++calls_;
        return inner_->text_to_image(g, c);
    }
    bool started() const noexcept { return started_; }
    int calls() const noexcept { return calls_; }

private:
    std::shared_ptr<repurpose::genai::ImageGenerator> inner_;
    std::chrono::milliseconds delay_;
    std::atomic<bool> started_{false};
    std::atomic<int> calls_{0};
};

} // namespace testsupport
