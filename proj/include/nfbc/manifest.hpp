#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nfbc {

inline constexpr const char* kSolverVersion = "1.0.0";

// FNV-1a 64-bit content hash; used for the manifest's output checksums.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t v);

struct ManifestOutput {
  std::string name; // relative to the manifest's directory
  std::uint64_t bytes = 0;
  std::string fnv1a64_hex;
};

// Per-run provenance record: enough to reproduce the run (the canonical
// config text round-trips through the parser) and to verify the outputs
// (size + hash per file). Written as manifest.json next to the outputs;
// the manifest itself is excluded from the byte-identity contract since it
// contains the wall-clock time.
struct RunManifest {
  std::string solver_version = kSolverVersion;
  std::string kind;
  std::string scale;
  std::string config_text;
  std::size_t nx = 0, ny = 0, nz = 0;
  double mesh_step = 0;
  double dt = 0;
  std::size_t steps = 0;
  double wall_seconds = 0;
  std::string termination;
  int threads = 1;
  bool complete = true;
  std::string error; // set when complete == false
  std::vector<ManifestOutput> outputs;
};

std::string manifest_to_json(const RunManifest& m);

// Fills bytes/hash for each named file under dir and writes dir/manifest.json.
void write_manifest(RunManifest m, const std::string& dir,
                    const std::vector<std::string>& output_names);

} // namespace nfbc
