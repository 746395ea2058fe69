#pragma once

#include "repurpose/geometry/pose.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace repurpose::geometry {

struct VertexColor {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const VertexColor&) const = default;
};

using Triangle = std::array<std::uint32_t, 3>;

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    /// Empty, or one color per vertex.
    std::vector<VertexColor> colors;

    bool has_colors() const noexcept { return !colors.empty(); }

    /// Throws MalformedMesh on out-of-range indices, non-finite coordinates or
    /// a color list that does not match the vertex count.
    void validate() const;
};

struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    Vec3 center() const { return 0.5 * (min + max); }
    Vec3 extent() const { return max - min; }
    double max_extent() const { return extent().maxCoeff(); }
    bool contains(const Vec3& p, double tol = 0) const
    {
        return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
    }
};

Aabb mesh_aabb(const TriMesh& m);

/// Centers the bounding box on the origin and scales uniformly so its largest
/// side equals `target_max_extent`. Topology and colors are untouched.
TriMesh normalize_mesh(const TriMesh& m, double target_max_extent);

/// Wavefront OBJ subset: `v x y z [r g b]` (colors in [0, 1]) and `f` records
/// with 1-based or negative indices; polygons are fan-triangulated.
TriMesh parse_obj(std::string_view text);
std::string write_obj(const TriMesh& m);

/// Minimal binary glTF 2.0 reader: one mesh, triangle primitives, float VEC3
/// POSITION and optional unsigned indices. Everything else is ignored.
TriMesh parse_glb(std::span<const std::uint8_t> bytes);

} // namespace repurpose::geometry
