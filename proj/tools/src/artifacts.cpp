#include "artifacts.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

#include <openssl/evp.h>

namespace isingfin::cli {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

void ArtifactSet::add(std::string name, std::string content) {
    for (auto& [existing, body] : files_) {
        if (existing == name) {
            body = std::move(content);
            return;
        }
    }
    files_.emplace_back(std::move(name), std::move(content));
}

void ArtifactSet::commit(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
        for (const auto& [name, body] : files_) {
            const fs::path tmp = dir / ("." + name + ".tmp");
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(body.data(), static_cast<std::streamsize>(body.size()));
            out.close();
            if (!out) throw std::runtime_error("cannot write " + tmp.string());
            staged.emplace_back(tmp, dir / name);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& [tmp, _] : staged) fs::remove(tmp, ec);
        throw;
    }
    for (const auto& [tmp, dest] : staged) fs::rename(tmp, dest);
}

}  // namespace isingfin::cli
