#pragma once

#include <Eigen/Geometry>

namespace repurpose::geometry {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Builds a unit quaternion from (w, x, y, z), normalizing; throws
/// InvalidInput for a zero or non-finite input.
Quat unit_quaternion(double w, double x, double y, double z);

/// Rigid transform p -> rotation * p + translation.
struct Pose {
    Quat rotation = Quat::Identity();
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// Applies b, then a.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);

/// Geodesic angle between two rotations in [0, 180] degrees; q and -q are the
/// same rotation.
double rotation_angle_deg(const Quat& a, const Quat& b);

/// Exact equality of all seven numbers.
bool bitwise_equal(const Pose& a, const Pose& b) noexcept;

} // namespace repurpose::geometry
