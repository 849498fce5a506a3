#pragma once

#include <string>

#include "nfbc/scenario.hpp"

namespace nfbc {

// Parse the UTF-8 "[section]" / "key = value" configuration dialect:
//   - '#' starts a comment (full-line or trailing);
//   - keys are section-scoped; every key must belong to the schema of the
//     declared scenario kind, appear at most once, and parse as its type;
//   - lengths and times are plain SI numbers (scientific notation welcome),
//     booleans are true/false, lists are comma-separated.
// Unknown sections/keys, duplicates, or type mismatches throw ConfigError
// with the line number. The result is schema-checked but not yet validated
// against physics constraints (see validate()).
ScenarioConfig parse_config(const std::string& text);

// parse_config(read file). I/O failures throw IoError.
ScenarioConfig load_config(const std::string& path);

// Fixed-order, fully explicit rendering of a configuration (every key
// present, doubles at full precision). parse_config(canonical_config(c))
// reproduces c exactly; the text is embedded in run manifests.
std::string canonical_config(const ScenarioConfig& cfg);

} // namespace nfbc
