#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rdecusum {

struct ManifestOutput {
  std::string path;
  std::string digest;  // FNV-1a 64, hex
};

/// Provenance written beside every CLI output. `arguments` is the canonical
/// flag list of the run (every flag that affects outputs, defaults
/// included), so the run can be re-executed from the manifest alone.
struct RunManifest {
  std::string tool = "rdecusum";
  std::string version;
  std::string command;
  std::vector<std::pair<std::string, std::string>> arguments;
  std::string config_text;  // embedded recipe for evaluate/sweep
  std::uint64_t base_seed = 0;
  std::string config_hash;
  std::string started_at;
  std::string finished_at;
  std::vector<ManifestOutput> inputs;
  std::vector<ManifestOutput> outputs;

  /// Hash over command, arguments, config text and input digests.
  [[nodiscard]] std::string compute_config_hash() const;
};

std::string fnv1a64_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);
std::string utc_timestamp();

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace rdecusum
