#include "fwl/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fwl {

const char* kCodeVersion = "0.1.0";

std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot hash missing file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return fnv1a_hex(os.str());
}

std::string RunManifest::hash() const {
    std::ostringstream os;
    os << subcommand << '\n' << config_hash << '\n' << code_version << '\n';
    for (const auto& [k, v] : params) os << k << '=' << v << '\n';
    return fnv1a_hex(os.str());
}

uint64_t RunManifest::seed() const {
    return std::stoull(hash(), nullptr, 16);
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["config_hash"] = config_hash;
    j["params"] = params;
    j["code_version"] = code_version;
    j["timestamp"] = timestamp;
    j["outputs"] = outputs;
    j["manifest_hash"] = hash();
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest: " + path);
    f << to_json();
}

}  // namespace fwl
