#include "repurpose/genai/stub.hpp"

#include "repurpose/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace repurpose::genai {

using imaging::GrayImage;
using imaging::Rgb;
using imaging::RgbaImage;
using imaging::RgbImage;
using imaging::SegmentationMask;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int stub_hue(std::string_view prompt, std::uint64_t seed) noexcept
{
    std::vector<std::uint8_t> bytes(prompt.begin(), prompt.end());
    for (int i = 0; i < 8; ++i)
        bytes.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
    return static_cast<int>(fnv1a64(bytes) % 360);
}

Rgb hsv_to_rgb(double h, double s, double v) noexcept
{
    h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0);
    const double c = v * s;
    const double x = c * (1.0 - std::abs(std::fmod(h / 60.0, 2.0) - 1.0));
    const double m = v - c;
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h / 60.0)) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
    }
    auto q = [](double u) { return static_cast<std::uint8_t>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0)); };
    return {q(r + m), q(g + m), q(b + m)};
}

Cutout cutout_from_rgba(RgbaImage image)
{
    SegmentationMask mask(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            mask.set(x, y, image.at(x, y)[3] != 0);
    return {std::move(image), std::move(mask)};
}

// -- text to image ---------------------------------------------------------

StubImageGenerator::StubImageGenerator(StubConfig cfg) : cfg_(cfg)
{
    cfg_.validate();
}

StubImageGenerator::Rect StubImageGenerator::residual_rect(int width, int height) const noexcept
{
    if (!cfg_.inject_residual || cfg_.residual_area_fraction <= 0)
        return {};
    const double area = cfg_.residual_area_fraction * double(width) * double(height);
    const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(area))));
    Rect r;
    r.x = std::clamp(cfg_.residual_offset_x, 0, width);
    r.y = std::clamp(cfg_.residual_offset_y, 0, height);
    r.w = std::min(side, width - r.x);
    r.h = std::min(side, height - r.y);
    return r;
}

RgbImage StubImageGenerator::text_to_image(const GrayImage& conditioning, const GenerationConfig& cfg)
{
    cfg.validate();
    if (conditioning.empty())
        throw Error(ErrorKind::InvalidInput, "conditioning image is empty");
    if (conditioning.pixel_count() > std::numeric_limits<std::size_t>::max() / 3)
        throw Error(ErrorKind::InvalidInput, "conditioning image too large");

    const double hue = stub_hue(cfg.prompt, cfg.seed);
    std::array<Rgb, 256> lut;
    for (int g = 0; g < 256; ++g)
        lut[g] = hsv_to_rgb(hue, kStubSaturation, g / 255.0);

    RgbImage out(conditioning.width(), conditioning.height());
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            imaging::set_rgb(out, x, y, lut[*conditioning.at(x, y)]);

    const auto r = residual_rect(out.width(), out.height());
    const Rgb residual = hsv_to_rgb(hue, kStubSaturation, kResidualValue);
    for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x)
            imaging::set_rgb(out, x, y, residual);
    return out;
}

// -- background removal ----------------------------------------------------

Cutout StubBackgroundRemover::remove_background(const RgbImage& image)
{
    const int w = image.width();
    const int h = image.height();
    if (image.empty())
        throw Error(ErrorKind::InvalidInput, "image is empty");

    std::array<std::vector<std::uint8_t>, 3> border;
    auto collect = [&](int x, int y) {
        const Rgb c = imaging::get_rgb(image, x, y);
        border[0].push_back(c.r);
        border[1].push_back(c.g);
        border[2].push_back(c.b);
    };
    for (int x = 0; x < w; ++x) {
        collect(x, 0);
        if (h > 1)
            collect(x, h - 1);
    }
    for (int y = 1; y + 1 < h; ++y) {
        collect(0, y);
        if (w > 1)
            collect(w - 1, y);
    }
    std::array<int, 3> median{};
    for (int c = 0; c < 3; ++c) {
        auto& v = border[c];
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        median[c] = v[v.size() / 2];
    }
    auto is_bg_color = [&](int x, int y) {
        const Rgb c = imaging::get_rgb(image, x, y);
        return std::abs(c.r - median[0]) <= kFloodTolerance && std::abs(c.g - median[1]) <= kFloodTolerance &&
               std::abs(c.b - median[2]) <= kFloodTolerance;
    };

    SegmentationMask background(w, h);
    std::vector<std::pair<int, int>> stack;
    auto seed = [&](int x, int y) {
        if (!background.test(x, y) && is_bg_color(x, y)) {
            background.set(x, y);
            stack.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        if (x > 0) seed(x - 1, y);
        if (x + 1 < w) seed(x + 1, y);
        if (y > 0) seed(x, y - 1);
        if (y + 1 < h) seed(x, y + 1);
    }

    Cutout out{RgbaImage(w, h), SegmentationMask(w, h)};
    std::size_t fg = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (background.test(x, y))
                continue;
            ++fg;
            out.mask.set(x, y);
            auto* p = out.image.at(x, y);
            const auto* s = image.at(x, y);
            p[0] = s[0];
            p[1] = s[1];
            p[2] = s[2];
            p[3] = 255;
        }
    }
    if (fg == 0)
        throw Error(ErrorKind::NothingSegmented, "no foreground left after background removal");
    return out;
}

// -- image to mesh ---------------------------------------------------------

StubMeshReconstructor::StubMeshReconstructor(StubConfig cfg) : cfg_(cfg)
{
    cfg_.validate();
}

geometry::TriMesh StubMeshReconstructor::image_to_mesh(const RgbaImage& cutout)
{
    const int w = cutout.width();
    const int h = cutout.height();
    int bx0 = w, by0 = h, bx1 = -1, by1 = -1;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (cutout.at(x, y)[3] == 0)
                continue;
            bx0 = std::min(bx0, x);
            by0 = std::min(by0, y);
            bx1 = std::max(bx1, x);
            by1 = std::max(by1, y);
        }
    }
    if (bx1 < 0)
        throw Error(ErrorKind::NothingSegmented, "cutout is fully transparent");

    // Never more cells than pixels along an axis.
    const int cols = std::min(cfg_.grid_cols, std::max(1, bx1 - bx0));
    const int rows = std::min(cfg_.grid_rows, std::max(1, by1 - by0));
    auto grid_u = [&](int i) { return static_cast<int>(std::lround(bx0 + double(i) * (bx1 - bx0) / cols)); };
    auto grid_v = [&](int j) { return static_cast<int>(std::lround(by0 + double(j) * (by1 - by0) / rows)); };
    auto opaque = [&](int x, int y) { return cutout.at(x, y)[3] != 0; };

    const double scale = 1.0 / std::max({bx1 - bx0, by1 - by0, 1});
    const double cu = 0.5 * (bx0 + bx1);
    const double cv = 0.5 * (by0 + by1);

    geometry::TriMesh mesh;
    std::vector<std::int64_t> vertex_of((cols + 1) * (rows + 1), -1);
    auto vertex = [&](int i, int j) -> std::uint32_t {
        auto& slot = vertex_of[j * (cols + 1) + i];
        if (slot < 0) {
            const int u = grid_u(i);
            const int v = grid_v(j);
            const auto* p = cutout.at(u, v);
            const double luminance = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
            slot = static_cast<std::int64_t>(mesh.vertices.size());
            mesh.vertices.emplace_back((u - cu) * scale, -(v - cv) * scale, luminance * cfg_.height_scale);
            mesh.colors.push_back({p[0], p[1], p[2]});
        }
        return static_cast<std::uint32_t>(slot);
    };

    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < cols; ++i) {
            const int u0 = grid_u(i), u1 = grid_u(i + 1);
            const int v0 = grid_v(j), v1 = grid_v(j + 1);
            bool inside = true;
            for (int y = v0; y <= v1 && inside; ++y)
                for (int x = u0; x <= u1 && inside; ++x)
                    inside = opaque(x, y);
            if (!inside)
                continue;
            const auto a = vertex(i, j), b = vertex(i + 1, j);
            const auto c = vertex(i + 1, j + 1), d = vertex(i, j + 1);
            mesh.triangles.push_back({a, d, c});
            mesh.triangles.push_back({a, c, b});
        }
    }
    if (mesh.triangles.empty())
        throw Error(ErrorKind::NothingSegmented, "no heightfield cell lies fully inside the cutout");
    return mesh;
}

BackendSet make_stub_backends(const StubConfig& cfg)
{
    return {std::make_shared<StubImageGenerator>(cfg), std::make_shared<StubBackgroundRemover>(),
            std::make_shared<StubMeshReconstructor>(cfg)};
}

} // namespace repurpose::genai
