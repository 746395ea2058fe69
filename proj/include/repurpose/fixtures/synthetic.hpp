#pragma once

#include "repurpose/pipeline/capture.hpp"

#include <cstdint>

namespace repurpose::fixtures {

/// A tabletop scene: an elliptical dome-shaped object in front of a flat
/// background, seen by a pinhole camera.
struct SyntheticScene {
    int width = 160;
    int height = 120;
    double fx = 150;
    double fy = 150;
    double object_cx = 80; ///< ellipse center, pixels
    double object_cy = 60;
    double radius_x = 30; ///< ellipse half axes, pixels
    double radius_y = 36;
    double object_depth_m = 0.6;
    double dome_height_m = 0.05; ///< center is this much closer than the rim
    double background_depth_m = 1.5;
    std::uint64_t seed = 7; ///< texture noise
};

pipeline::CaptureInput make_capture(const SyntheticScene& scene = {});

} // namespace repurpose::fixtures
