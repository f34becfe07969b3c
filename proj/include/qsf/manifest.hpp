#pragma once

// Reproducibility manifest: parameters, seeds, budgets, and a content hash
// of every emitted artifact.  The manifest alone is enough to re-run a
// pipeline bit-identically (wall-clock stats aside), so it carries no
// timing information.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "qsf/error.hpp"

namespace qsf {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::bad_format, "cannot hash missing file " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= uint8_t(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (got < std::streamsize(sizeof buf)) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)h);
    return std::string("fnv1a64:") + hex;
}

struct RunManifest {
    std::string mode;
    uint32_t q = 0, n = 0, t = 0, k = 0;
    std::string group;
    std::string poly;
    std::optional<uint64_t> order_seed;
    uint64_t limit = 0;
    uint64_t max_nodes = 0;
    double max_seconds = 0;
    uint64_t table_cap = 0;
    std::map<std::string, std::string> artifacts; // file name -> content hash

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = "qsf";
        j["version"] = kToolVersion;
        j["parameters"] = {{"q", q},         {"n", n},    {"t", t},
                           {"k", k},         {"group", group}, {"poly", poly},
                           {"mode", mode}};
        j["seeds"]["order_seed"] =
            order_seed ? nlohmann::json(*order_seed) : nlohmann::json(nullptr);
        j["budgets"] = {{"limit", limit}, {"max_nodes", max_nodes}, {"max_seconds", max_seconds}};
        j["table_cap"] = table_cap;
        j["artifacts"] = artifacts;
        return j;
    }
};

} // namespace qsf
