// Run manifests: every command records what it ran, the digests of its
// inputs, the seed, and every artifact it wrote.
#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace spheroid {

inline constexpr const char* kToolVersion = "1.0.0";

// fnv-1a 64-bit
std::uint64_t fnv1a64(const std::string& text);
std::string fnv1a_hex(const std::string& text);
std::string file_digest(const std::string& path);

struct RunManifest {
    std::string command;
    std::string config_digest;  // digest of the effective configuration text
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;  // paths written by the command
    double wall_clock_seconds = 0.0;
    std::string tool_version = kToolVersion;
    nlohmann::json extra = nlohmann::json::object();

    void write(const std::string& path) const;
};

}  // namespace spheroid
