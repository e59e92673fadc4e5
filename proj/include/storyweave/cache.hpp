#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include "storyweave/error.hpp"

namespace storyweave {

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(Errc::store_error, "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

// Content-addressed artifact store: <root>/<stage>/<sha256(key)>.json.
// Writes go through a temp file and rename so readers never see partial data.
class ArtifactCache {
public:
    explicit ArtifactCache(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path path_for_hash(const std::string& stage, const std::string& hash) const {
        return root_ / stage / (hash + ".json");
    }

    std::filesystem::path path_for(const std::string& stage, const std::string& key) const {
        return path_for_hash(stage, sha256_hex(key));
    }

    std::optional<std::string> get_by_hash(const std::string& stage,
                                           const std::string& hash) const {
        std::ifstream in(path_for_hash(stage, hash), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    std::optional<std::string> get(const std::string& stage, const std::string& key) const {
        return get_by_hash(stage, sha256_hex(key));
    }

    void put(const std::string& stage, const std::string& key, const std::string& value) const {
        namespace fs = std::filesystem;
        fs::path target = path_for(stage, key);
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec)
            throw Error(Errc::store_error, "cannot create " + target.parent_path().string() +
                                               ": " + ec.message());
        fs::path tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << value;
            if (!out)
                throw Error(Errc::store_error, "cannot write " + tmp.string());
        }
        fs::rename(tmp, target, ec);
        if (ec) throw Error(Errc::store_error, "cannot commit " + target.string() + ": " + ec.message());
    }

private:
    std::filesystem::path root_;
};

// Advisory exclusive lock on <cache-root>/lock; concurrent pipeline runs over
// one cache directory are refused rather than serialized.
class CacheLock {
public:
    explicit CacheLock(const std::filesystem::path& cache_root) {
        std::error_code ec;
        std::filesystem::create_directories(cache_root, ec);
        if (ec)
            throw Error(Errc::store_error,
                        "cannot create " + cache_root.string() + ": " + ec.message());
        path_ = cache_root / "lock";
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0) throw Error(Errc::store_error, "cannot open " + path_.string());
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw Error(Errc::cache_locked,
                        "another pipeline run holds " + path_.string());
        }
    }

    CacheLock(const CacheLock&) = delete;
    CacheLock& operator=(const CacheLock&) = delete;

    ~CacheLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

} // namespace storyweave
