#include "repurpose/geometry/mesh.hpp"

#include "repurpose/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>

namespace repurpose::geometry {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what)
{
    throw Error(ErrorKind::MalformedMesh, "line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view tok, std::size_t line)
{
    double v = 0;
    const auto* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        malformed(line, "non-numeric value '" + std::string(tok) + "'");
    return v;
}

std::uint32_t resolve_index(std::string_view tok, std::size_t vertex_count, std::size_t line)
{
    tok = tok.substr(0, tok.find('/'));
    long long idx = 0;
    const auto* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, idx);
    if (ec != std::errc() || p != end || idx == 0)
        malformed(line, "bad face index '" + std::string(tok) + "'");
    const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
    if (resolved < 0 || resolved >= static_cast<long long>(vertex_count))
        malformed(line, "face index " + std::to_string(idx) + " out of range");
    return static_cast<std::uint32_t>(resolved);
}

} // namespace

TriMesh parse_obj(std::string_view text)
{
    TriMesh mesh;
    std::vector<std::optional<VertexColor>> colors;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto tok = split_ws(line);
        if (tok[0] == "v") {
            if (tok.size() != 4 && tok.size() != 7)
                malformed(line_no, "vertex needs 3 coordinates and optionally 3 color components");
            mesh.vertices.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                                       parse_double(tok[3], line_no));
            if (tok.size() == 7) {
                auto channel = [&](std::string_view t) {
                    const double c = std::clamp(parse_double(t, line_no), 0.0, 1.0);
                    return static_cast<std::uint8_t>(std::lround(c * 255.0));
                };
                colors.push_back(VertexColor{channel(tok[4]), channel(tok[5]), channel(tok[6])});
            } else {
                colors.push_back(std::nullopt);
            }
        } else if (tok[0] == "f") {
            if (tok.size() < 4)
                malformed(line_no, "face needs at least 3 vertices");
            std::vector<std::uint32_t> idx;
            for (std::size_t i = 1; i < tok.size(); ++i)
                idx.push_back(resolve_index(tok[i], mesh.vertices.size(), line_no));
            for (std::size_t i = 1; i + 1 < idx.size(); ++i)
                mesh.triangles.push_back({idx[0], idx[i], idx[i + 1]});
        }
        // vt, vn, o, g, s, usemtl, mtllib: not part of the subset
    }

    const bool all_colored = !colors.empty() && std::all_of(colors.begin(), colors.end(), [](auto& c) { return c.has_value(); });
    if (all_colored) {
        mesh.colors.reserve(colors.size());
        for (const auto& c : colors)
            mesh.colors.push_back(*c);
    }
    return mesh;
}

std::string write_obj(const TriMesh& m)
{
    m.validate();
    std::string out;
    out.reserve(m.vertices.size() * 64 + m.triangles.size() * 24);
    char buf[160];
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        const auto& v = m.vertices[i];
        int n = 0;
        if (m.has_colors()) {
            const auto& c = m.colors[i];
            n = std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g %.6f %.6f %.6f\n", v.x(), v.y(), v.z(),
                              c.r / 255.0, c.g / 255.0, c.b / 255.0);
        } else {
            n = std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        }
        out.append(buf, static_cast<std::size_t>(n));
    }
    for (const auto& t : m.triangles) {
        const int n = std::snprintf(buf, sizeof buf, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

} // namespace repurpose::geometry
