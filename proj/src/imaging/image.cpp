#include "repurpose/imaging/image.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace repurpose::imaging {

namespace {

bool depth_ok(float d) noexcept
{
    return std::isfinite(d) && d > 0.0f && d < DepthFrame::kMaxDepth;
}

} // namespace

DepthFrame::DepthFrame(int width, int height)
{
    if (width < 0 || height < 0)
        throw Error(ErrorKind::InvalidInput, "negative depth frame dimension");
    width_ = width;
    height_ = height;
    depth_.assign(static_cast<std::size_t>(width) * height, 0.0f);
    valid_.assign(depth_.size(), 0);
}

DepthFrame DepthFrame::from_meters(int width, int height, std::vector<float> depth)
{
    DepthFrame f(width, height);
    if (depth.size() != f.depth_.size())
        throw Error(ErrorKind::InvalidInput, "depth buffer length does not match dimensions");
    for (std::size_t i = 0; i < depth.size(); ++i) {
        if (depth_ok(depth[i])) {
            f.depth_[i] = depth[i];
            f.valid_[i] = 1;
        }
    }
    return f;
}

void DepthFrame::set(int x, int y, float meters)
{
    if (!depth_ok(meters))
        throw Error(ErrorKind::InvalidInput, "depth sample must be finite and in (0, 100) m");
    depth_[index(x, y)] = meters;
    valid_[index(x, y)] = 1;
}

void DepthFrame::invalidate(int x, int y) noexcept
{
    depth_[index(x, y)] = 0.0f;
    valid_[index(x, y)] = 0;
}

DepthFrame DepthFrame::scaled(double factor) const
{
    DepthFrame out(width_, height_);
    for (std::size_t i = 0; i < depth_.size(); ++i) {
        if (!valid_[i])
            continue;
        const auto d = static_cast<float>(depth_[i] * factor);
        if (depth_ok(d)) {
            out.depth_[i] = d;
            out.valid_[i] = 1;
        }
    }
    return out;
}

SegmentationMask::SegmentationMask(int width, int height, bool fill)
{
    if (width < 0 || height < 0)
        throw Error(ErrorKind::InvalidInput, "negative mask dimension");
    width_ = width;
    height_ = height;
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

void SegmentationMask::fill_rect(int x0, int y0, int w, int h, bool on)
{
    const int x1 = std::min(width_, x0 + w);
    const int y1 = std::min(height_, y0 + h);
    for (int y = std::max(0, y0); y < y1; ++y)
        for (int x = std::max(0, x0); x < x1; ++x)
            set(x, y, on);
}

std::size_t SegmentationMask::count() const noexcept
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void CameraIntrinsics::validate(int width, int height) const
{
    if (!(fx > 0) || !(fy > 0) || !std::isfinite(fx) || !std::isfinite(fy))
        throw Error(ErrorKind::InvalidInput, "focal lengths must be positive");
    if (!(cx >= 0 && cx <= width) || !(cy >= 0 && cy <= height))
        throw Error(ErrorKind::InvalidInput,
                    "principal point (" + std::to_string(cx) + ", " + std::to_string(cy) + ") outside the image");
}

} // namespace repurpose::imaging
