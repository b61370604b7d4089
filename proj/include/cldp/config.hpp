#pragma once

#include <string>
#include <string_view>

#include "cldp/ldp_harness.hpp"

namespace cldp {

/// Parses the flat key=value format. Entries are separated by newlines, ','
/// or ';'; '#' starts a comment. List values (T_grid, quantile_levels) are
/// whitespace separated. `seed` is mandatory. The result is validated; every
/// error is a ConfigError whose message starts with the offending key.
ExperimentConfig parse_config(std::string_view text);

/// Canonical form: every key, sorted, one per line, shortest round-trip
/// numbers. parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// FNV-1a digest of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace cldp
