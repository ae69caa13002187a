#include "spheroid/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "spheroid/error.hpp"

namespace spheroid {

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return std::string(buf);
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "' for digesting");
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["config_digest"] = config_digest;
    j["seed"] = seed;
    j["artifacts"] = artifacts;
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["tool_version"] = tool_version;
    j["extra"] = extra;
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << j.dump(1) << '\n';
}

}  // namespace spheroid
