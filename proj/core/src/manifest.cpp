#include "iacvlab/manifest.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iacvlab {

std::uint64_t fnv1a_digest(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char byte : bytes) {
        hash ^= byte;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::uint64_t fnv1a_file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read input file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return fnv1a_digest(buffer.str());
}

std::string manifest_timestamp() {
    const char* stamp = std::getenv("IACVLAB_TIMESTAMP");
    return stamp != nullptr && *stamp != '\0' ? std::string(stamp) : std::string("-");
}

std::string digest_hex(std::uint64_t digest) {
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = hex[digest & 0xF];
        digest >>= 4;
    }
    return out;
}

std::string RunManifest::to_string() const {
    std::string line = "command=" + command + "|version=" + tool_version +
                       "|seed=" + std::to_string(seed) +
                       "|config=" + digest_hex(config_digest) + "|inputs=";
    for (std::size_t k = 0; k < input_digests.size(); ++k) {
        if (k > 0) {
            line += ',';
        }
        line += input_digests[k].first + ':' + digest_hex(input_digests[k].second);
    }
    line += "|timestamp=" + timestamp;
    return line;
}

std::vector<std::string> RunManifest::comment_lines() const {
    std::vector<std::string> lines;
    lines.push_back("# manifest command: " + command);
    lines.push_back("# manifest version: " + tool_version);
    lines.push_back("# manifest seed: " + std::to_string(seed));
    lines.push_back("# manifest config: " + digest_hex(config_digest));
    for (const auto& [path, digest] : input_digests) {
        lines.push_back("# manifest input: " + path + " " + digest_hex(digest));
    }
    lines.push_back("# manifest timestamp: " + timestamp);
    return lines;
}

} // namespace iacvlab
