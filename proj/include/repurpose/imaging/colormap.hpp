#pragma once

#include "repurpose/imaging/image.hpp"

#include <string>
#include <vector>

namespace repurpose::imaging {

struct ColorStop {
    double t = 0;
    Rgb color;
};

/// Piecewise-linear depth colormap. Must be invertible: stops strictly
/// increasing from t=0 to t=1 and every segment moving through color space
/// at least one 8-bit level per 1/255 of t, so quantized colors still decode
/// to within a gray level.
class ColormapSpec {
public:
    ColormapSpec(std::string name, std::vector<ColorStop> stops);

    /// Linear blue (near) to red (far).
    static ColormapSpec blue_red();
    /// Blue, green, red at t = 0, 0.5, 1.
    static ColormapSpec blue_green_red();

    const std::string& name() const noexcept { return name_; }
    const std::vector<ColorStop>& stops() const noexcept { return stops_; }

    /// Unquantized color at t (clamped to [0, 1]).
    std::array<double, 3> evaluate(double t) const noexcept;
    /// Color at t rounded to 8 bits.
    Rgb sample(double t) const noexcept;

    struct Inversion {
        double t;
        double distance; ///< Euclidean distance in 8-bit units to the closest segment.
    };
    /// Projects `c` onto every segment and keeps the closest one.
    Inversion invert(Rgb c) const noexcept;

private:
    std::string name_;
    std::vector<ColorStop> stops_;
};

inline constexpr double kDefaultColorTolerance = 3.0;

/// Gray level for normalized depth t: nearer is brighter.
std::uint8_t gray_from_normalized_depth(double t) noexcept;

/// Normalized depth clamp((d - near) / (far - near), 0, 1).
double normalized_depth(double depth, double near, double far) noexcept;

RgbImage encode_depth_colormap(const DepthFrame& depth, const ColormapSpec& spec, double near, double far);

GrayImage depth_colormap_to_grayscale(const RgbImage& rgb, const ColormapSpec& spec, double near, double far,
                                      double tolerance = kDefaultColorTolerance);

GrayImage depth_to_grayscale(const DepthFrame& depth, double near, double far);

} // namespace repurpose::imaging
