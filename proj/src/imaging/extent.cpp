#include "repurpose/imaging/extent.hpp"

#include <algorithm>
#include <limits>

namespace repurpose::imaging {

Extent3 object_extent(const DepthFrame& depth, const SegmentationMask& mask, const CameraIntrinsics& k)
{
    if (depth.width() != mask.width() || depth.height() != mask.height())
        throw Error(ErrorKind::InvalidInput, "mask and depth frame dimensions differ");

    constexpr double inf = std::numeric_limits<double>::infinity();
    double lo[3] = {inf, inf, inf};
    double hi[3] = {-inf, -inf, -inf};
    std::size_t n = 0;
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            if (!mask.test(u, v) || !depth.valid(u, v))
                continue;
            const double d = depth.depth(u, v);
            const double p[3] = {(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d};
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
            ++n;
        }
    }
    if (n < 2)
        throw Error(ErrorKind::DegenerateExtent, "need at least two valid masked depth pixels, found " + std::to_string(n));
    return {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
}

} // namespace repurpose::imaging
