#include "repurpose/imaging/mask.hpp"

#include <cmath>
#include <utility>

namespace repurpose::imaging {

PixelPoint mask_centroid(const SegmentationMask& mask)
{
    double sx = 0, sy = 0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.test(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0)
        throw Error(ErrorKind::EmptyMask, "mask has no foreground pixels");
    return {sx / double(n), sy / double(n)};
}

std::vector<Component> connected_components(const SegmentationMask& mask)
{
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> stack;
    std::vector<Component> out;

    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const auto i0 = static_cast<std::size_t>(y0) * w + x0;
            if (!mask.test(x0, y0) || seen[i0])
                continue;
            Component c{0, x0, y0, x0, y0, {}};
            double sx = 0, sy = 0;
            seen[i0] = 1;
            stack.emplace_back(x0, y0);
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++c.area;
                sx += x;
                sy += y;
                c.min_x = std::min(c.min_x, x);
                c.min_y = std::min(c.min_y, y);
                c.max_x = std::max(c.max_x, x);
                c.max_y = std::max(c.max_y, y);
                constexpr int dx[] = {1, -1, 0, 0};
                constexpr int dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = x + dx[k];
                    const int ny = y + dy[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                        continue;
                    const auto ni = static_cast<std::size_t>(ny) * w + nx;
                    if (mask.test(nx, ny) && !seen[ni]) {
                        seen[ni] = 1;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            c.centroid = {sx / double(c.area), sy / double(c.area)};
            out.push_back(c);
        }
    }
    return out;
}

MaskReport validate_background_removal(const SegmentationMask& mask, double max_shift, double max_residual)
{
    const auto components = connected_components(mask);
    if (components.empty())
        throw Error(ErrorKind::EmptyMask, "mask has no foreground pixels");

    const Component* largest = &components.front();
    std::size_t total = 0;
    for (const auto& c : components) {
        total += c.area;
        if (c.area > largest->area ||
            (c.area == largest->area && std::pair(c.min_y, c.min_x) < std::pair(largest->min_y, largest->min_x)))
            largest = &c;
    }

    MaskReport r;
    r.total_area = total;
    r.largest_component_area = largest->area;
    r.residual_fraction = 1.0 - double(largest->area) / double(total);
    r.full_centroid = mask_centroid(mask);
    r.component_centroid = largest->centroid;
    r.centroid_shift = std::hypot(r.full_centroid.x - r.component_centroid.x, r.full_centroid.y - r.component_centroid.y);
    r.passed = r.centroid_shift <= max_shift && r.residual_fraction <= max_residual;
    return r;
}

} // namespace repurpose::imaging
