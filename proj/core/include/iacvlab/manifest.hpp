#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iacvlab {

inline constexpr std::string_view kToolVersion = "iacvlab 1.0.0";

/// Provenance block embedded in every emitted report: what ran, on which
/// inputs (content digests), under which configuration and seed. Two runs
/// with identical manifests produce byte-identical reports. The timestamp
/// comes from the IACVLAB_TIMESTAMP environment variable so that
/// reproducing runs can pin it; it defaults to "-".
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::uint64_t>> input_digests;
    std::uint64_t config_digest = 0;
    std::uint64_t seed = 0;
    std::string tool_version = std::string(kToolVersion);
    std::string timestamp = "-";

    /// Canonical single-line form (stable field order).
    std::string to_string() const;

    /// The manifest as '#'-prefixed lines for embedding at the top of CSV
    /// and table output.
    std::vector<std::string> comment_lines() const;
};

/// 64-bit FNV-1a content digest.
std::uint64_t fnv1a_digest(std::string_view bytes);

/// Digest of a file's bytes. Throws std::runtime_error if unreadable.
std::uint64_t fnv1a_file_digest(const std::string& path);

/// Reads IACVLAB_TIMESTAMP, returning "-" when unset.
std::string manifest_timestamp();

/// 16-digit lowercase hex rendering used for digests.
std::string digest_hex(std::uint64_t digest);

} // namespace iacvlab
