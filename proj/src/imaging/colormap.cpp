#include "repurpose/imaging/colormap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace repurpose::imaging {

namespace {

void check_range(double near, double far)
{
    if (!(near > 0) || !(far > 0) || !(near < far) || !std::isfinite(far))
        throw Error(ErrorKind::InvalidRange,
                    "need 0 < near < far, got near=" + std::to_string(near) + " far=" + std::to_string(far));
}

std::array<double, 3> to_vec(Rgb c) noexcept
{
    return {double(c.r), double(c.g), double(c.b)};
}

double length(const std::array<double, 3>& v) noexcept
{
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

} // namespace

ColormapSpec::ColormapSpec(std::string name, std::vector<ColorStop> stops)
    : name_(std::move(name)), stops_(std::move(stops))
{
    if (stops_.size() < 2)
        throw Error(ErrorKind::InvalidInput, "colormap needs at least two stops");
    if (stops_.front().t != 0.0 || stops_.back().t != 1.0)
        throw Error(ErrorKind::InvalidInput, "colormap stops must start at t=0 and end at t=1");
    for (std::size_t i = 1; i < stops_.size(); ++i) {
        const double dt = stops_[i].t - stops_[i - 1].t;
        if (!(dt > 0))
            throw Error(ErrorKind::InvalidInput, "colormap stops must be strictly increasing in t");
        const auto a = to_vec(stops_[i - 1].color);
        const auto b = to_vec(stops_[i].color);
        const double span = length({b[0] - a[0], b[1] - a[1], b[2] - a[2]});
        if (span < 255.0 * dt)
            throw Error(ErrorKind::InvalidInput,
                        "colormap segment " + std::to_string(i - 1) + " is too flat to invert at 8-bit precision");
    }
}

ColormapSpec ColormapSpec::blue_red()
{
    return ColormapSpec("blue_red", {{0.0, {0, 0, 255}}, {1.0, {255, 0, 0}}});
}

ColormapSpec ColormapSpec::blue_green_red()
{
    return ColormapSpec("blue_green_red", {{0.0, {0, 0, 255}}, {0.5, {0, 255, 0}}, {1.0, {255, 0, 0}}});
}

std::array<double, 3> ColormapSpec::evaluate(double t) const noexcept
{
    t = std::clamp(t, 0.0, 1.0);
    std::size_t seg = 0;
    while (seg + 2 < stops_.size() && t > stops_[seg + 1].t)
        ++seg;
    const auto& a = stops_[seg];
    const auto& b = stops_[seg + 1];
    const double s = (t - a.t) / (b.t - a.t);
    const auto ca = to_vec(a.color);
    const auto cb = to_vec(b.color);
    return {ca[0] + s * (cb[0] - ca[0]), ca[1] + s * (cb[1] - ca[1]), ca[2] + s * (cb[2] - ca[2])};
}

Rgb ColormapSpec::sample(double t) const noexcept
{
    const auto c = evaluate(t);
    auto q = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); };
    return {q(c[0]), q(c[1]), q(c[2])};
}

ColormapSpec::Inversion ColormapSpec::invert(Rgb c) const noexcept
{
    const auto p = to_vec(c);
    Inversion best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i + 1 < stops_.size(); ++i) {
        const auto a = to_vec(stops_[i].color);
        const auto b = to_vec(stops_[i + 1].color);
        const std::array<double, 3> d{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const std::array<double, 3> ap{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
        const double dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        const double s = std::clamp((ap[0] * d[0] + ap[1] * d[1] + ap[2] * d[2]) / dd, 0.0, 1.0);
        const double dist = length({ap[0] - s * d[0], ap[1] - s * d[1], ap[2] - s * d[2]});
        if (dist < best.distance)
            best = {stops_[i].t + s * (stops_[i + 1].t - stops_[i].t), dist};
    }
    return best;
}

std::uint8_t gray_from_normalized_depth(double t) noexcept
{
    return static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::clamp(t, 0.0, 1.0))));
}

double normalized_depth(double depth, double near, double far) noexcept
{
    return std::clamp((depth - near) / (far - near), 0.0, 1.0);
}

RgbImage encode_depth_colormap(const DepthFrame& depth, const ColormapSpec& spec, double near, double far)
{
    check_range(near, far);
    RgbImage out(depth.width(), depth.height());
    const Rgb background = spec.sample(1.0);
    for (int y = 0; y < depth.height(); ++y) {
        for (int x = 0; x < depth.width(); ++x) {
            const Rgb c = depth.valid(x, y) ? spec.sample(normalized_depth(depth.depth(x, y), near, far)) : background;
            set_rgb(out, x, y, c);
        }
    }
    return out;
}

GrayImage depth_colormap_to_grayscale(const RgbImage& rgb, const ColormapSpec& spec, double near, double far,
                                      double tolerance)
{
    check_range(near, far);
    GrayImage out(rgb.width(), rgb.height());
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            const auto inv = spec.invert(get_rgb(rgb, x, y));
            if (inv.distance > tolerance)
                throw Error(ErrorKind::UnmappableColor, "pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                                                            ") is " + std::to_string(inv.distance) +
                                                            " away from colormap '" + spec.name() + "'");
            *out.at(x, y) = gray_from_normalized_depth(inv.t);
        }
    }
    return out;
}

GrayImage depth_to_grayscale(const DepthFrame& depth, double near, double far)
{
    check_range(near, far);
    GrayImage out(depth.width(), depth.height());
    for (int y = 0; y < depth.height(); ++y)
        for (int x = 0; x < depth.width(); ++x)
            *out.at(x, y) = depth.valid(x, y) ? gray_from_normalized_depth(normalized_depth(depth.depth(x, y), near, far)) : 0;
    return out;
}

} // namespace repurpose::imaging
