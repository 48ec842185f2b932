#include "ale/cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include "ale/errors.hpp"

namespace ale::cli {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");

    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);

    std::string hex;
    hex.reserve(len * 2);
    char pair[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(pair, sizeof pair, "%02x", md[i]);
        hex += pair;
    }
    return hex;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::ordered_json to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["tool_version"] = m.tool_version;
    j["seed"] = m.seed;
    j["config"] = m.config;
    auto& inputs = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : m.inputs) inputs.push_back({{"path", path}, {"sha256", digest}});
    j["artifacts"] = m.artifacts;
    j["timing"] = m.timing;
    j["started_at"] = m.started_at;
    return j;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << to_json(m).dump(2) << '\n';
}

}  // namespace ale::cli
