#include "nfbc/manifest.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "nfbc/errors.hpp"

namespace nfbc {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (got < static_cast<std::streamsize>(sizeof buf)) break;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["solver_version"] = m.solver_version;
  j["kind"] = m.kind;
  j["scale"] = m.scale;
  j["config"] = m.config_text;
  j["grid"] = {{"nx", m.nx}, {"ny", m.ny}, {"nz", m.nz},
               {"mesh_step", m.mesh_step}, {"dt", m.dt}};
  j["steps"] = m.steps;
  j["wall_seconds"] = m.wall_seconds;
  j["termination"] = m.termination;
  j["threads"] = m.threads;
  j["complete"] = m.complete;
  j["error"] = m.error;
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& f : m.outputs)
    j["outputs"].push_back(
        {{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64_hex}});
  return j.dump(2) + "\n";
}

void write_manifest(RunManifest m, const std::string& dir,
                    const std::vector<std::string>& output_names) {
  m.outputs.clear();
  for (const auto& name : output_names) {
    const std::string path = dir + "/" + name;
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("manifest: missing output file " + path);
    ManifestOutput mo;
    mo.name = name;
    mo.bytes = static_cast<std::uint64_t>(in.tellg());
    in.close();
    mo.fnv1a64_hex = to_hex(fnv1a64_file(path));
    m.outputs.push_back(std::move(mo));
  }
  const std::string path = dir + "/manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << manifest_to_json(m);
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

} // namespace nfbc
