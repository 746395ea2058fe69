#pragma once

#include "repurpose/imaging/image.hpp"

#include <vector>

namespace repurpose::imaging {

struct PixelPoint {
    double x = 0;
    double y = 0;
    bool operator==(const PixelPoint&) const = default;
};

/// Mean of the integer coordinates of all foreground pixels. Throws EmptyMask.
PixelPoint mask_centroid(const SegmentationMask& mask);

struct Component {
    std::size_t area = 0;
    int min_x = 0;
    int min_y = 0;
    int max_x = 0;
    int max_y = 0;
    PixelPoint centroid;
};

/// 4-connected components in discovery order (row-major scan of each
/// component's first pixel).
std::vector<Component> connected_components(const SegmentationMask& mask);

struct ValidationThresholds {
    double max_shift = 5.0;     ///< pixels
    double max_residual = 0.05; ///< fraction of foreground area
};

struct MaskReport {
    std::size_t total_area = 0;
    std::size_t largest_component_area = 0;
    double residual_fraction = 0;
    PixelPoint full_centroid;
    PixelPoint component_centroid;
    double centroid_shift = 0;
    bool passed = false;
};

/// Treats the largest component as the object (ties go to the component
/// whose bounding-box corner comes first in row-major order) and reports how
/// far everything else drags the foreground centroid.
MaskReport validate_background_removal(const SegmentationMask& mask, double max_shift, double max_residual);

inline MaskReport validate_background_removal(const SegmentationMask& mask, const ValidationThresholds& th = {})
{
    return validate_background_removal(mask, th.max_shift, th.max_residual);
}

} // namespace repurpose::imaging
