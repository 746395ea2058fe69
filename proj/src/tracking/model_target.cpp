#include "repurpose/tracking/model_target.hpp"

#include "repurpose/error.hpp"

namespace repurpose::tracking {

std::string_view to_string(Provenance p) noexcept
{
    return p == Provenance::Original ? "original" : "generated";
}

Provenance parse_provenance(std::string_view s)
{
    if (s == "original")
        return Provenance::Original;
    if (s == "generated")
        return Provenance::Generated;
    throw Error(ErrorKind::InvalidInput, "unknown provenance '" + std::string(s) + "'");
}

ModelTarget build_model_target(imaging::RgbImage reference_image, const geometry::TriMesh& mesh,
                               const imaging::Extent3& physical_extent, Provenance provenance)
{
    const auto& e = physical_extent;
    if (!(e.dx >= 0 && e.dy >= 0 && e.dz >= 0) || !(e.max() > 0) || !std::isfinite(e.max()))
        throw Error(ErrorKind::DegenerateTarget, "physical extent must be non-negative with a positive maximum");

    ModelTarget target;
    try {
        mesh.validate();
        target.normalized_mesh = geometry::normalize_mesh(mesh, e.max());
    } catch (const Error& err) {
        throw Error(ErrorKind::DegenerateTarget, err.what());
    }
    target.reference_image = std::move(reference_image);
    target.reference_provenance = provenance;
    target.physical_extent = e;
    target.alignment_offset = geometry::Pose::identity();
    return target;
}

geometry::Pose anchor_pose(const geometry::Pose& tracked, const ModelTarget& target)
{
    return geometry::compose(tracked, target.alignment_offset);
}

} // namespace repurpose::tracking
