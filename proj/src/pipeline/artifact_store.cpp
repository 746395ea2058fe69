#include "repurpose/pipeline/artifact_store.hpp"

#include "repurpose/error.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <fcntl.h>
#include <fstream>
#include <iterator>
#include <random>
#include <unistd.h>

namespace repurpose::pipeline {

namespace fs = std::filesystem;

std::string sha256_hex(std::span<const std::uint8_t> bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Internal, "SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void atomic_write(const fs::path& path, std::span<const std::uint8_t> bytes)
{
    static std::atomic<std::uint64_t> counter{0};
    thread_local std::mt19937_64 rng{std::random_device{}()};
    const fs::path tmp = path.parent_path() /
                         ("." + path.filename().string() + ".tmp" + std::to_string(counter++) + "-" +
                          std::to_string(rng() & 0xffffff));
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0)
        throw Error(ErrorKind::Internal, "cannot create " + tmp.string());
    std::size_t done = 0;
    while (done < bytes.size()) {
        const auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            ::close(fd);
            fs::remove(tmp);
            throw Error(ErrorKind::Internal, "write failed for " + tmp.string());
        }
        done += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    fs::rename(tmp, path);
}

void atomic_write(const fs::path& path, std::string_view text)
{
    atomic_write(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root))
{
    fs::create_directories(root_ / "objects");
}

fs::path ArtifactStore::object_path(const std::string& hash) const
{
    if (hash.size() != 64 || hash.find_first_not_of("0123456789abcdef") != std::string::npos)
        throw Error(ErrorKind::NotFound, "not an artifact hash: '" + hash + "'");
    return root_ / "objects" / hash;
}

std::string ArtifactStore::put(std::span<const std::uint8_t> bytes, const std::string& type_tag) const
{
    const std::string hash = sha256_hex(bytes);
    const fs::path path = object_path(hash);
    if (!fs::exists(path))
        atomic_write(path, bytes);
    fs::path tag = path;
    tag += ".type";
    if (!fs::exists(tag))
        atomic_write(tag, std::string_view(type_tag));
    return hash;
}

std::string ArtifactStore::put(std::string_view text, const std::string& type_tag) const
{
    return put({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, type_tag);
}

bool ArtifactStore::contains(const std::string& hash) const
{
    return fs::exists(object_path(hash));
}

std::vector<std::uint8_t> ArtifactStore::get(const std::string& hash) const
{
    std::ifstream in(object_path(hash), std::ios::binary);
    if (!in)
        throw Error(ErrorKind::NotFound, "artifact " + hash + " not in store");
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (sha256_hex(bytes) != hash)
        throw Error(ErrorKind::IntegrityError, "artifact " + hash + " does not match its hash");
    return bytes;
}

std::string ArtifactStore::get_text(const std::string& hash) const
{
    const auto bytes = get(hash);
    return {bytes.begin(), bytes.end()};
}

std::optional<std::string> ArtifactStore::type_of(const std::string& hash) const
{
    fs::path tag = object_path(hash);
    tag += ".type";
    std::ifstream in(tag, std::ios::binary);
    if (!in)
        return std::nullopt;
    return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool ArtifactStore::verify(const std::string& hash) const
{
    try {
        get(hash);
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace repurpose::pipeline
