#include "repurpose/geometry/mesh.hpp"

#include "repurpose/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>

namespace repurpose::geometry {

namespace {

static_assert(std::endian::native == std::endian::little, "GLB reader assumes a little-endian host");

constexpr std::uint32_t kMagic = 0x46546C67;     // "glTF"
constexpr std::uint32_t kJsonChunk = 0x4E4F534A; // "JSON"
constexpr std::uint32_t kBinChunk = 0x004E4942;  // "BIN\0"

[[noreturn]] void unsupported(const std::string& what)
{
    throw Error(ErrorKind::UnsupportedGlb, what);
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at)
{
    if (at + 4 > b.size())
        unsupported("truncated buffer");
    std::uint32_t v;
    std::memcpy(&v, b.data() + at, 4);
    return v;
}

struct View {
    std::span<const std::uint8_t> bytes; ///< accessor data start .. end of buffer view
    std::size_t stride;
};

View accessor_view(const nlohmann::json& doc, const nlohmann::json& acc, std::span<const std::uint8_t> bin,
                   std::size_t element_size)
{
    const auto& views = doc.at("bufferViews");
    const auto& bv = views.at(acc.at("bufferView").get<std::size_t>());
    if (bv.value("buffer", 0) != 0)
        unsupported("only the embedded binary buffer is supported");
    const std::size_t view_off = bv.value("byteOffset", std::size_t{0});
    const std::size_t view_len = bv.at("byteLength").get<std::size_t>();
    const std::size_t stride = bv.value("byteStride", element_size);
    const std::size_t acc_off = acc.value("byteOffset", std::size_t{0});
    const std::size_t count = acc.at("count").get<std::size_t>();
    if (view_off + view_len > bin.size())
        unsupported("buffer view exceeds binary chunk");
    if (stride < element_size)
        unsupported("byte stride smaller than element");
    if (count > 0 && acc_off + (count - 1) * stride + element_size > view_len)
        unsupported("accessor exceeds buffer view");
    return {bin.subspan(view_off + acc_off, view_len - acc_off), stride};
}

} // namespace

TriMesh parse_glb(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 20)
        unsupported("truncated buffer");
    if (read_u32(bytes, 0) != kMagic)
        unsupported("not a binary glTF container");
    if (read_u32(bytes, 4) != 2)
        unsupported("only glTF 2.0 is supported");
    const std::size_t total = read_u32(bytes, 8);
    if (total > bytes.size())
        unsupported("truncated buffer");
    bytes = bytes.first(total);

    std::string_view json_text;
    std::span<const std::uint8_t> bin;
    for (std::size_t at = 12; at < bytes.size();) {
        const std::size_t len = read_u32(bytes, at);
        const std::uint32_t type = read_u32(bytes, at + 4);
        if (at + 8 + len > bytes.size())
            unsupported("truncated chunk");
        const auto body = bytes.subspan(at + 8, len);
        if (type == kJsonChunk && json_text.empty())
            json_text = {reinterpret_cast<const char*>(body.data()), body.size()};
        else if (type == kBinChunk && bin.empty())
            bin = body;
        at += 8 + len;
    }
    if (json_text.empty())
        unsupported("missing JSON chunk");

    TriMesh mesh;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        if (!doc.contains("meshes") || doc.at("meshes").size() != 1)
            unsupported("exactly one mesh is supported");
        const auto& accessors = doc.at("accessors");
        for (const auto& prim : doc.at("meshes")[0].at("primitives")) {
            if (prim.value("mode", 4) != 4)
                unsupported("only triangle primitives are supported");
            if (!prim.contains("attributes") || !prim.at("attributes").contains("POSITION"))
                unsupported("primitive has no POSITION attribute");

            const auto& pos = accessors.at(prim["attributes"]["POSITION"].get<std::size_t>());
            if (pos.at("componentType").get<int>() != 5126 || pos.at("type").get<std::string>() != "VEC3")
                unsupported("POSITION must be float VEC3");
            const std::size_t n = pos.at("count").get<std::size_t>();
            const auto pv = accessor_view(doc, pos, bin, 12);
            const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
            for (std::size_t i = 0; i < n; ++i) {
                float xyz[3];
                std::memcpy(xyz, pv.bytes.data() + i * pv.stride, 12);
                mesh.vertices.emplace_back(xyz[0], xyz[1], xyz[2]);
            }

            std::vector<std::uint32_t> idx;
            if (prim.contains("indices")) {
                const auto& ia = accessors.at(prim["indices"].get<std::size_t>());
                if (ia.at("type").get<std::string>() != "SCALAR")
                    unsupported("indices must be SCALAR");
                const int ct = ia.at("componentType").get<int>();
                const std::size_t esize = ct == 5121 ? 1 : ct == 5123 ? 2 : ct == 5125 ? 4 : 0;
                if (esize == 0)
                    unsupported("unsupported index component type");
                const std::size_t count = ia.at("count").get<std::size_t>();
                const auto iv = accessor_view(doc, ia, bin, esize);
                for (std::size_t i = 0; i < count; ++i) {
                    std::uint32_t v = 0;
                    std::memcpy(&v, iv.bytes.data() + i * iv.stride, esize);
                    idx.push_back(v);
                }
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    idx.push_back(static_cast<std::uint32_t>(i));
            }
            if (idx.size() % 3 != 0)
                unsupported("index count is not a multiple of 3");
            for (std::size_t i = 0; i < idx.size(); i += 3) {
                if (idx[i] >= n || idx[i + 1] >= n || idx[i + 2] >= n)
                    unsupported("index out of range");
                mesh.triangles.push_back({base + idx[i], base + idx[i + 1], base + idx[i + 2]});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        unsupported(std::string("invalid JSON chunk: ") + e.what());
    }
    if (mesh.vertices.empty())
        unsupported("mesh has no positions");
    return mesh;
}

} // namespace repurpose::geometry
