#pragma once

// Executes a validated RunConfig: one JSON report plus named CSV/binary
// artifacts, and the process exit status.

#include "glab/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace glab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitVerdict = 2;

struct Artifact {
    std::string name;     // file name inside the output directory
    std::string content;  // bytes
};

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::ordered_json report;
    std::vector<Artifact> artifacts;
};

/// Runs the subcommand. `progress` (optional) receives human-readable lines
/// while long batteries run.
[[nodiscard]] RunOutcome execute(const RunConfig& cfg, std::ostream* progress = nullptr);

/// Threads from the config, else GLAB_NUM_THREADS, else the runtime default.
/// Returns the count in effect.
int apply_thread_setting(int requested);

/// Validates, executes, prints the report to `out`, writes artifacts into
/// cfg.output (when set) and returns the exit status. Validation failures are
/// listed on `err` and give kExitValidation.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace glab
