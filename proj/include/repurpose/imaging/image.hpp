#pragma once

#include "repurpose/error.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace repurpose::imaging {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Interleaved 8-bit raster, row-major, `Channels` bytes per pixel.
template <int Channels>
class Image8 {
public:
    static constexpr int channels = Channels;

    Image8() = default;

    Image8(int width, int height, std::uint8_t fill = 0)
        : width_(checked_dim(width)), height_(checked_dim(height)),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * Channels, fill)
    {
    }

    Image8(int width, int height, std::vector<std::uint8_t> data)
        : width_(checked_dim(width)), height_(checked_dim(height)), data_(std::move(data))
    {
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * Channels)
            throw Error(ErrorKind::InvalidInput, "image buffer length does not match dimensions");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }
    const std::vector<std::uint8_t>& buffer() const noexcept { return data_; }

    std::uint8_t* at(int x, int y) noexcept { return data_.data() + offset(x, y); }
    const std::uint8_t* at(int x, int y) const noexcept { return data_.data() + offset(x, y); }

    bool operator==(const Image8&) const = default;

private:
    static int checked_dim(int v)
    {
        if (v < 0)
            throw Error(ErrorKind::InvalidInput, "negative image dimension");
        return v;
    }

    std::size_t offset(int x, int y) const noexcept
    {
        return (static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)) * Channels;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

using GrayImage = Image8<1>;
using RgbImage = Image8<3>;
using RgbaImage = Image8<4>;

inline Rgb get_rgb(const RgbImage& img, int x, int y) noexcept
{
    const auto* p = img.at(x, y);
    return {p[0], p[1], p[2]};
}

inline void set_rgb(RgbImage& img, int x, int y, Rgb c) noexcept
{
    auto* p = img.at(x, y);
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
}

/// Metric depth in meters with an explicit validity mask. Valid samples are
/// always finite and inside (0, 100) m; invalid samples carry no meaning.
class DepthFrame {
public:
    static constexpr double kMaxDepth = 100.0;

    DepthFrame() = default;
    DepthFrame(int width, int height);
    /// Samples that are non-finite or outside (0, kMaxDepth) are marked invalid.
    static DepthFrame from_meters(int width, int height, std::vector<float> depth);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return depth_.size(); }

    bool valid(int x, int y) const noexcept { return valid_[index(x, y)] != 0; }
    float depth(int x, int y) const noexcept { return depth_[index(x, y)]; }

    void set(int x, int y, float meters);
    void invalidate(int x, int y) noexcept;

    DepthFrame scaled(double factor) const;

    bool operator==(const DepthFrame&) const = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> depth_;
    std::vector<std::uint8_t> valid_;
};

class SegmentationMask {
public:
    SegmentationMask() = default;
    SegmentationMask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool test(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool on = true) noexcept { bits_[index(x, y)] = on ? 1 : 0; }
    void fill_rect(int x0, int y0, int w, int h, bool on = true);

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    bool operator==(const SegmentationMask&) const = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct CameraIntrinsics {
    double fx = 0;
    double fy = 0;
    double cx = 0;
    double cy = 0;

    /// Throws InvalidInput unless focal lengths are positive and the principal
    /// point lies inside [0, width] x [0, height].
    void validate(int width, int height) const;
};

} // namespace repurpose::imaging
