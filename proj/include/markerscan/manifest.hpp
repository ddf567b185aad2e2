#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace markerscan {

uint64_t fnv1a64(std::string_view data);
uint64_t fnv1a64_file(const std::string& path);  // streamed; throws IoError
std::string hex64(uint64_t v);

// Reproducibility sidecar written next to every file a command produces:
// the resolved configuration plus digests of all inputs and outputs.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> inputs;   // path -> digest
    std::map<std::string, std::string> outputs;  // path -> digest

    std::string to_json() const;  // deterministic: sorted keys, fixed layout
    void write(const std::string& path) const;
};

// Sidecar path for an output file.
std::string manifest_path_for(const std::string& out_path);

}  // namespace markerscan
