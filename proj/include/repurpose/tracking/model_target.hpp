#pragma once

#include "repurpose/geometry/mesh.hpp"
#include "repurpose/imaging/extent.hpp"
#include "repurpose/imaging/image.hpp"

#include <string_view>

namespace repurpose::tracking {

/// Where the tracking reference image came from. Only photographs of the
/// physical object are valid references; generated images are not.
enum class Provenance { Original, Generated };

std::string_view to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view s);

struct ModelTarget {
    imaging::RgbImage reference_image;
    Provenance reference_provenance = Provenance::Original;
    geometry::TriMesh normalized_mesh;
    imaging::Extent3 physical_extent;
    geometry::Pose alignment_offset;
};

/// Normalizes `mesh` to the largest physical extent and keeps the reference
/// image verbatim. The provenance tag is recorded, not enforced. Throws
/// DegenerateTarget for a degenerate mesh or a zero/negative extent.
ModelTarget build_model_target(imaging::RgbImage reference_image, const geometry::TriMesh& mesh,
                               const imaging::Extent3& physical_extent,
                               Provenance provenance = Provenance::Original);

/// Pose at which the virtual mesh is drawn for a tracked physical pose.
geometry::Pose anchor_pose(const geometry::Pose& tracked, const ModelTarget& target);

} // namespace repurpose::tracking
