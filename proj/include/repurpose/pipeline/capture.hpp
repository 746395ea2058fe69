#pragma once

#include "repurpose/imaging/image.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace repurpose::pipeline {

/// One RGB-D capture of the physical object.
struct CaptureInput {
    imaging::RgbImage rgb;
    imaging::DepthFrame depth;
    imaging::CameraIntrinsics intrinsics;
    std::optional<imaging::SegmentationMask> mask;

    /// Throws InvalidCapture on empty images or inconsistent dimensions.
    void validate() const;
};

/// Decodes an RGB PNG, a 16-bit millimeter depth PNG, an intrinsics JSON
/// document and an optional mask PNG. Throws InvalidCapture.
CaptureInput capture_from_files(std::span<const std::uint8_t> rgb_png, std::span<const std::uint8_t> depth_png,
                                std::string_view intrinsics_json,
                                std::optional<std::span<const std::uint8_t>> mask_png = std::nullopt);

} // namespace repurpose::pipeline
