#include "repurpose/fixtures/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace repurpose::fixtures {

pipeline::CaptureInput make_capture(const SyntheticScene& s)
{
    using namespace imaging;
    RgbImage rgb(s.width, s.height);
    DepthFrame depth(s.width, s.height);
    SegmentationMask mask(s.width, s.height);
    std::mt19937_64 rng(s.seed);
    std::uniform_int_distribution<int> noise(-6, 6);

    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const double ex = (x - s.object_cx) / s.radius_x;
            const double ey = (y - s.object_cy) / s.radius_y;
            const double r2 = ex * ex + ey * ey;
            const int n = noise(rng);
            const auto c = [n](int v) { return static_cast<std::uint8_t>(std::clamp(v + n, 0, 255)); };
            if (r2 <= 1.0) {
                mask.set(x, y, true);
                depth.set(x, y, static_cast<float>(s.object_depth_m - s.dome_height_m * (1.0 - r2)));
                set_rgb(rgb, x, y, {c(200), c(120), c(60)});
            } else {
                depth.set(x, y, static_cast<float>(s.background_depth_m));
                set_rgb(rgb, x, y, {c(90), c(95), c(100)});
            }
        }
    }
    CameraIntrinsics k{s.fx, s.fy, s.width / 2.0, s.height / 2.0};
    pipeline::CaptureInput capture{std::move(rgb), std::move(depth), k, std::move(mask)};
    capture.validate();
    return capture;
}

} // namespace repurpose::fixtures
