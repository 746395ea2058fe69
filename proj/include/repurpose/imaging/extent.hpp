#pragma once

#include "repurpose/imaging/image.hpp"

namespace repurpose::imaging {

struct Extent3 {
    double dx = 0;
    double dy = 0;
    double dz = 0;

    double max() const noexcept { return std::max(dx, std::max(dy, dz)); }
};

/// Axis-aligned extent (meters) of the pinhole back-projection of every valid
/// masked depth pixel. Throws DegenerateExtent below two such pixels.
Extent3 object_extent(const DepthFrame& depth, const SegmentationMask& mask, const CameraIntrinsics& k);

} // namespace repurpose::imaging
