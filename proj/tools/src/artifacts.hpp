#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isingfin::cli {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/**
 * Artifacts are held in memory until commit(), which writes every file to a
 * hidden temporary next to its destination and only then renames them into
 * place. A failed run therefore leaves the output directory untouched.
 */
class ArtifactSet {
public:
    void add(std::string name, std::string content);
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
    void commit(const std::filesystem::path& dir) const;

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace isingfin::cli
