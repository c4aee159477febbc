#pragma once

#include "json.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace scene_kge {

/// Hex SHA-256 of a file's bytes. Throws std::runtime_error if unreadable.
std::string sha256_file(const std::string& path);

/// Record of one successful CLI run.
struct RunManifest {
    std::string subcommand;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::string tool_version;
    double wall_seconds = 0.0;

    /// Digests every input; outputs are listed by path.
    nlohmann::ordered_json to_json() const;
};

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, std::string_view contents);
std::string read_text(const std::string& path);

}  // namespace scene_kge
