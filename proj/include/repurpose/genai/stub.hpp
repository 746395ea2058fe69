#pragma once

#include "repurpose/genai/backend.hpp"

#include <span>

namespace repurpose::genai {

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

/// Hue in degrees: fnv1a64(prompt UTF-8 bytes followed by the seed as 8
/// little-endian bytes) mod 360.
int stub_hue(std::string_view prompt, std::uint64_t seed) noexcept;

/// h in degrees, s and v in [0, 1].
imaging::Rgb hsv_to_rgb(double h, double s, double v) noexcept;

inline constexpr double kStubSaturation = 0.6;
inline constexpr double kResidualValue = 0.5;
inline constexpr int kFloodTolerance = 12;

/// Colors every pixel with the prompt hue at brightness gray/255.
class StubImageGenerator final : public ImageGenerator {
public:
    explicit StubImageGenerator(StubConfig cfg = {});
    imaging::RgbImage text_to_image(const imaging::GrayImage& conditioning, const GenerationConfig& cfg) override;

    /// Pixel rectangle the residual is painted into for a w x h image
    /// (already clipped); empty when injection is off.
    struct Rect {
        int x = 0, y = 0, w = 0, h = 0;
    };
    Rect residual_rect(int width, int height) const noexcept;

private:
    StubConfig cfg_;
};

/// Flood-fills from the image border through pixels within kFloodTolerance
/// (Chebyshev) of the border's per-channel median color.
class StubBackgroundRemover final : public BackgroundRemover {
public:
    Cutout remove_background(const imaging::RgbImage& image) override;
};

/// Luminance heightfield over the opaque bounding box.
class StubMeshReconstructor final : public MeshReconstructor {
public:
    explicit StubMeshReconstructor(StubConfig cfg = {});
    geometry::TriMesh image_to_mesh(const imaging::RgbaImage& cutout) override;

private:
    StubConfig cfg_;
};

BackendSet make_stub_backends(const StubConfig& cfg = {});

} // namespace repurpose::genai
