#include "markerscan/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "markerscan/errors.hpp"

namespace markerscan {

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001b3ull;

uint64_t fnv_step(uint64_t h, const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= kFnvPrime;
    }
    return h;
}

void append_json_string(std::string& out, std::string_view s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
}

void append_map(std::string& out, const char* key,
                const std::map<std::string, std::string>& m) {
    append_json_string(out, key);
    out += ": {";
    bool first = true;
    for (const auto& [k, v] : m) {
        if (!first) out += ", ";
        first = false;
        append_json_string(out, k);
        out += ": ";
        append_json_string(out, v);
    }
    out += '}';
}

}  // namespace

uint64_t fnv1a64(std::string_view data) { return fnv_step(kFnvOffset, data.data(), data.size()); }

uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for digest: " + path);
    uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h = fnv_step(h, buf, static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) throw IoError("read failure while digesting: " + path);
    return h;
}

std::string hex64(uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string RunManifest::to_json() const {
    std::string out = "{\n  ";
    append_json_string(out, "command");
    out += ": ";
    append_json_string(out, command);
    out += ",\n  ";
    append_json_string(out, "version");
    out += ": ";
    append_json_string(out, tool_version);
    out += ",\n  ";
    append_map(out, "config", config);
    out += ",\n  ";
    append_map(out, "inputs", inputs);
    out += ",\n  ";
    append_map(out, "outputs", outputs);
    out += "\n}\n";
    return out;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create manifest: " + path);
    std::string json = to_json();
    out.write(json.data(), static_cast<std::streamsize>(json.size()));
    out.flush();
    if (!out) throw IoError("write failure on manifest: " + path);
}

std::string manifest_path_for(const std::string& out_path) {
    return out_path + ".manifest.json";
}

}  // namespace markerscan
