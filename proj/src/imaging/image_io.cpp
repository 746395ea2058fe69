#include "repurpose/imaging/image_io.hpp"

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <cmath>
#include <fstream>
#include <iterator>

namespace repurpose::imaging {

namespace {

std::vector<std::uint8_t> encode_mat(const cv::Mat& m)
{
    std::vector<std::uint8_t> out;
    // Fixed compression level keeps the encoding bit-stable across runs.
    const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6};
    if (!cv::imencode(".png", m, out, params))
        throw Error(ErrorKind::ImageCodec, "PNG encoding failed");
    return out;
}

cv::Mat decode_mat(std::span<const std::uint8_t> bytes, int flags)
{
    if (bytes.empty())
        throw Error(ErrorKind::ImageCodec, "empty PNG buffer");
    const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
    cv::Mat m = cv::imdecode(raw, flags);
    if (m.empty())
        throw Error(ErrorKind::ImageCodec, "could not decode PNG");
    return m;
}

cv::Mat to_8bit(cv::Mat m)
{
    if (m.depth() == CV_16U)
        m.convertTo(m, CV_8U, 1.0 / 257.0);
    return m;
}

} // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& img)
{
    const cv::Mat m(img.height(), img.width(), CV_8UC1, const_cast<std::uint8_t*>(img.data().data()));
    return encode_mat(m);
}

std::vector<std::uint8_t> encode_png(const RgbImage& img)
{
    const cv::Mat rgb(img.height(), img.width(), CV_8UC3, const_cast<std::uint8_t*>(img.data().data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    return encode_mat(bgr);
}

std::vector<std::uint8_t> encode_png(const RgbaImage& img)
{
    const cv::Mat rgba(img.height(), img.width(), CV_8UC4, const_cast<std::uint8_t*>(img.data().data()));
    cv::Mat bgra;
    cv::cvtColor(rgba, bgra, cv::COLOR_RGBA2BGRA);
    return encode_mat(bgra);
}

std::vector<std::uint8_t> encode_depth_png(const DepthFrame& depth)
{
    cv::Mat m(depth.height(), depth.width(), CV_16UC1, cv::Scalar(0));
    for (int y = 0; y < depth.height(); ++y) {
        auto* row = m.ptr<std::uint16_t>(y);
        for (int x = 0; x < depth.width(); ++x) {
            if (!depth.valid(x, y))
                continue;
            const long mm = std::lround(double(depth.depth(x, y)) * 1000.0);
            row[x] = static_cast<std::uint16_t>(std::clamp(mm, 1L, 65535L));
        }
    }
    return encode_mat(m);
}

std::vector<std::uint8_t> encode_mask_png(const SegmentationMask& mask)
{
    cv::Mat m(mask.height(), mask.width(), CV_8UC1, cv::Scalar(0));
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.test(x, y))
                m.at<std::uint8_t>(y, x) = 255;
    return encode_mat(m);
}

GrayImage decode_gray_png(std::span<const std::uint8_t> bytes)
{
    cv::Mat m = to_8bit(decode_mat(bytes, cv::IMREAD_GRAYSCALE));
    GrayImage out(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y)
        std::copy_n(m.ptr<std::uint8_t>(y), m.cols, out.at(0, y));
    return out;
}

RgbImage decode_rgb_png(std::span<const std::uint8_t> bytes)
{
    cv::Mat bgr = to_8bit(decode_mat(bytes, cv::IMREAD_COLOR));
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    RgbImage out(rgb.cols, rgb.rows);
    for (int y = 0; y < rgb.rows; ++y)
        std::copy_n(rgb.ptr<std::uint8_t>(y), rgb.cols * 3, out.at(0, y));
    return out;
}

RgbaImage decode_rgba_png(std::span<const std::uint8_t> bytes)
{
    cv::Mat m = to_8bit(decode_mat(bytes, cv::IMREAD_UNCHANGED));
    cv::Mat rgba;
    switch (m.channels()) {
    case 1: cv::cvtColor(m, rgba, cv::COLOR_GRAY2RGBA); break;
    case 3: cv::cvtColor(m, rgba, cv::COLOR_BGR2RGBA); break;
    case 4: cv::cvtColor(m, rgba, cv::COLOR_BGRA2RGBA); break;
    default: throw Error(ErrorKind::ImageCodec, "unsupported PNG channel count");
    }
    RgbaImage out(rgba.cols, rgba.rows);
    for (int y = 0; y < rgba.rows; ++y)
        std::copy_n(rgba.ptr<std::uint8_t>(y), rgba.cols * 4, out.at(0, y));
    return out;
}

DepthFrame decode_depth_png(std::span<const std::uint8_t> bytes)
{
    cv::Mat m = decode_mat(bytes, cv::IMREAD_UNCHANGED);
    if (m.type() != CV_16UC1)
        throw Error(ErrorKind::ImageCodec, "depth PNG must be 16-bit single channel");
    DepthFrame out(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<std::uint16_t>(y);
        for (int x = 0; x < m.cols; ++x)
            if (row[x] != 0)
                out.set(x, y, static_cast<float>(row[x] / 1000.0));
    }
    return out;
}

SegmentationMask decode_mask_png(std::span<const std::uint8_t> bytes)
{
    const GrayImage g = decode_gray_png(bytes);
    SegmentationMask out(g.width(), g.height());
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
            out.set(x, y, *g.at(x, y) != 0);
    return out;
}

IntrinsicsFile parse_intrinsics_json(std::string_view text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        IntrinsicsFile f;
        f.k.fx = j.at("fx").get<double>();
        f.k.fy = j.at("fy").get<double>();
        f.k.cx = j.at("cx").get<double>();
        f.k.cy = j.at("cy").get<double>();
        f.width = j.at("width").get<int>();
        f.height = j.at("height").get<int>();
        f.k.validate(f.width, f.height);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("intrinsics JSON: ") + e.what());
    }
}

std::string intrinsics_to_json(const IntrinsicsFile& f)
{
    const nlohmann::json j{{"fx", f.k.fx}, {"fy", f.k.fy}, {"cx", f.k.cx}, {"cy", f.k.cy},
                           {"width", f.width}, {"height", f.height}};
    return j.dump();
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::NotFound, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::NotFound, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace repurpose::imaging
