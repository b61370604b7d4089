#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cldp/ldp_harness.hpp"

namespace cldp {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunRecord {
    std::string subcommand;
    std::string config_hash;
    std::string timestamp;  ///< UTC, ISO 8601
    std::string version = kArtifactVersion;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    bool ok = true;  ///< all requested checks passed
};

enum class CheckKind { remainder, assumption6, tails };
CheckKind parse_check_kind(std::string_view s);
std::string_view to_string(CheckKind k);

struct RunOptions {
    unsigned workers = 0;  ///< 0: resolve from the environment
    CheckKind check = CheckKind::remainder;
};

/// Executes one of simulate, measure, ldp, check. Human-readable lines go to
/// `out`; files go to out_dir (created if needed) via temp-file-and-rename,
/// and the record is appended to out_dir/runs.jsonl.
RunRecord run(std::string_view subcommand, const ExperimentConfig& config, const std::filesystem::path& out_dir,
              const RunOptions& options, std::ostream& out);

/// Deterministic ldp result row (no timing), as written to results.csv.
std::string ldp_result_row(const ExperimentConfig& config, const LdpResult& r);
inline constexpr const char* kLdpResultHeader =
    "config_hash,T,eta,k,event,estimate,stderr,limit_value,ratio,n_reps,seed";

}  // namespace cldp
