#pragma once

#include "repurpose/imaging/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace repurpose::imaging {

// PNG codecs. Depth is 16-bit single channel in millimeters, 0 = invalid.
// Masks are 8-bit gray, 0 = background, anything else = foreground.

std::vector<std::uint8_t> encode_png(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const RgbaImage& img);
std::vector<std::uint8_t> encode_depth_png(const DepthFrame& depth);
std::vector<std::uint8_t> encode_mask_png(const SegmentationMask& mask);

GrayImage decode_gray_png(std::span<const std::uint8_t> bytes);
RgbImage decode_rgb_png(std::span<const std::uint8_t> bytes);
/// Decodes any PNG to RGBA; images without alpha come back fully opaque.
RgbaImage decode_rgba_png(std::span<const std::uint8_t> bytes);
DepthFrame decode_depth_png(std::span<const std::uint8_t> bytes);
SegmentationMask decode_mask_png(std::span<const std::uint8_t> bytes);

struct IntrinsicsFile {
    CameraIntrinsics k;
    int width = 0;
    int height = 0;
};

IntrinsicsFile parse_intrinsics_json(std::string_view text);
std::string intrinsics_to_json(const IntrinsicsFile& f);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace repurpose::imaging
