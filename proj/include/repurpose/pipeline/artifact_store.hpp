#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace repurpose::pipeline {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
inline std::string sha256_hex(std::string_view text)
{
    return sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// fsync and rename, so readers only ever see complete files.
void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void atomic_write(const std::filesystem::path& path, std::string_view text);

/// Append-only, content-addressed blob store under {root}/objects. Each blob
/// {hash} has a sidecar {hash}.type holding its type tag. Safe for concurrent
/// use: writes of the same content are idempotent.
class ArtifactStore {
public:
    explicit ArtifactStore(std::filesystem::path root);

    /// Stores the blob (if new) and returns its SHA-256 hex digest.
    std::string put(std::span<const std::uint8_t> bytes, const std::string& type_tag) const;
    std::string put(std::string_view text, const std::string& type_tag) const;

    bool contains(const std::string& hash) const;
    /// Throws NotFound for an unknown hash and IntegrityError when the stored
    /// bytes no longer match it.
    std::vector<std::uint8_t> get(const std::string& hash) const;
    std::string get_text(const std::string& hash) const;
    std::optional<std::string> type_of(const std::string& hash) const;
    bool verify(const std::string& hash) const;

    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path object_path(const std::string& hash) const;

    std::filesystem::path root_;
};

} // namespace repurpose::pipeline
