#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fwl {

/// Provenance record written next to every output file. Reruns with the same
/// manifest content (ignoring the timestamp) produce byte-identical data
/// outputs; all randomness is seeded from the manifest hash.
struct RunManifest {
    std::string subcommand;
    std::string config_hash;
    std::map<std::string, std::string> params;
    std::string code_version;
    std::string timestamp;
    std::vector<std::string> outputs;

    uint64_t seed() const;        // deterministic, timestamp excluded
    std::string hash() const;     // deterministic, timestamp excluded
    std::string to_json() const;
    void write(const std::string& path) const;
};

std::string fnv1a_hex(const std::string& data);
std::string file_hash(const std::string& path);

extern const char* kCodeVersion;

}  // namespace fwl
