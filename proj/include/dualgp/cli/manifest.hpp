#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dualgp/cli/config.hpp"

namespace dualgp::cli {

inline constexpr const char* kManifestName = "manifest.txt";

// Hex SHA-256 of a file's bytes. Throws IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

// Writes `<filename> <sha256>` lines for the given files (in order),
// followed by a `[config]` block holding the full configuration snapshot,
// the seed among it, and the software version.
void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::string>& files, const Config& config);

struct VerifyReport {
  bool ok = false;
  // One "<filename> <status>" line per manifest entry (ok/mismatch/missing).
  std::vector<std::string> lines;
};

// Recomputes every checksum recorded in dir/manifest.txt.
VerifyReport verify_manifest(const std::filesystem::path& dir);

}  // namespace dualgp::cli
