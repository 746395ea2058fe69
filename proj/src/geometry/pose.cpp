#include "repurpose/geometry/pose.hpp"

#include "repurpose/error.hpp"

#include <cmath>
#include <numbers>

namespace repurpose::geometry {

Quat unit_quaternion(double w, double x, double y, double z)
{
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0) || !std::isfinite(n))
        throw Error(ErrorKind::InvalidInput, "quaternion must be finite and non-zero");
    return Quat(w / n, x / n, y / n, z / n);
}

Pose compose(const Pose& a, const Pose& b)
{
    Pose out;
    out.rotation = (a.rotation * b.rotation).normalized();
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

Pose invert(const Pose& p)
{
    Pose out;
    out.rotation = p.rotation.conjugate();
    out.translation = -(out.rotation * p.translation);
    return out;
}

double rotation_angle_deg(const Quat& a, const Quat& b)
{
    // 2*acos(|a.b|) written via atan2 of the relative rotation, which keeps
    // full precision near zero.
    const Quat rel = a.conjugate() * b;
    const double half = std::atan2(rel.vec().norm(), std::abs(rel.w()));
    return 2.0 * half * 180.0 / std::numbers::pi;
}

bool bitwise_equal(const Pose& a, const Pose& b) noexcept
{
    return a.rotation.coeffs() == b.rotation.coeffs() && a.translation == b.translation;
}

} // namespace repurpose::geometry
