#include "repurpose/pipeline/capture.hpp"

#include "repurpose/error.hpp"
#include "repurpose/imaging/image_io.hpp"

#include <string>

namespace repurpose::pipeline {

namespace {

std::string dims(int w, int h)
{
    return std::to_string(w) + "x" + std::to_string(h);
}

} // namespace

void CaptureInput::validate() const
{
    if (rgb.empty())
        throw Error(ErrorKind::InvalidCapture, "rgb image is empty");
    const int w = rgb.width();
    const int h = rgb.height();
    if (depth.width() != w || depth.height() != h)
        throw Error(ErrorKind::InvalidCapture,
                    "depth is " + dims(depth.width(), depth.height()) + ", rgb is " + dims(w, h));
    if (mask && (mask->width() != w || mask->height() != h))
        throw Error(ErrorKind::InvalidCapture,
                    "mask is " + dims(mask->width(), mask->height()) + ", rgb is " + dims(w, h));
    try {
        intrinsics.validate(w, h);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidCapture, e.detail());
    }
}

CaptureInput capture_from_files(std::span<const std::uint8_t> rgb_png, std::span<const std::uint8_t> depth_png,
                                std::string_view intrinsics_json,
                                std::optional<std::span<const std::uint8_t>> mask_png)
{
    try {
        const auto k = imaging::parse_intrinsics_json(intrinsics_json);
        CaptureInput c{imaging::decode_rgb_png(rgb_png), imaging::decode_depth_png(depth_png), k.k, std::nullopt};
        if (mask_png)
            c.mask = imaging::decode_mask_png(*mask_png);
        if (k.width != c.rgb.width() || k.height != c.rgb.height())
            throw Error(ErrorKind::InvalidCapture,
                        "intrinsics are for " + dims(k.width, k.height) + ", rgb is " + dims(c.rgb.width(), c.rgb.height()));
        c.validate();
        return c;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidCapture)
            throw;
        throw Error(ErrorKind::InvalidCapture, e.what());
    }
}

} // namespace repurpose::pipeline
