#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ale::cli {

/// Lowercase hex SHA-256 of a file's bytes. Throws ale::ParseError if the
/// file cannot be read.
std::string sha256_file(const std::string& path);

/// Provenance record written next to every run's artifacts. Wall-clock
/// values live here and nowhere else so that artifacts stay byte-identical
/// across reruns.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;
    nlohmann::ordered_json timing = nlohmann::ordered_json::object();
    std::string started_at;  // UTC, ISO 8601
    std::string tool_version;
};

std::string utc_timestamp();

nlohmann::ordered_json to_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace ale::cli
