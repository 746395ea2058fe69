#include "repurpose/geometry/mesh.hpp"

#include "repurpose/error.hpp"

#include <limits>

namespace repurpose::geometry {

void TriMesh::validate() const
{
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (!vertices[i].allFinite())
            throw Error(ErrorKind::MalformedMesh, "vertex " + std::to_string(i) + " is not finite");
    for (std::size_t i = 0; i < triangles.size(); ++i)
        for (auto idx : triangles[i])
            if (idx >= vertices.size())
                throw Error(ErrorKind::MalformedMesh, "triangle " + std::to_string(i) + " references vertex " +
                                                          std::to_string(idx) + " of " + std::to_string(vertices.size()));
    if (!colors.empty() && colors.size() != vertices.size())
        throw Error(ErrorKind::MalformedMesh, "color count does not match vertex count");
}

Aabb mesh_aabb(const TriMesh& m)
{
    if (m.vertices.empty())
        throw Error(ErrorKind::EmptyMesh, "mesh has no vertices");
    Aabb box{m.vertices.front(), m.vertices.front()};
    for (const auto& v : m.vertices) {
        box.min = box.min.cwiseMin(v);
        box.max = box.max.cwiseMax(v);
    }
    return box;
}

TriMesh normalize_mesh(const TriMesh& m, double target_max_extent)
{
    if (!(target_max_extent > 0) || !std::isfinite(target_max_extent))
        throw Error(ErrorKind::InvalidInput, "target extent must be positive");
    const Aabb box = mesh_aabb(m);
    const double extent = box.max_extent();
    if (!(extent > 0))
        throw Error(ErrorKind::DegenerateMesh, "mesh has zero extent");

    const Vec3 center = box.center();
    const double scale = target_max_extent / extent;
    TriMesh out = m;
    for (auto& v : out.vertices)
        v = (v - center) * scale;
    return out;
}

} // namespace repurpose::geometry
