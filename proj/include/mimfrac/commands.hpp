#pragma once

// Batch commands behind the `mimfrac` executable. Each command validates its
// inputs and checks that the output directory is writable before solving.
// Errors are reported as ValidationError / NumericalError / IoError, which
// run_cli maps to exit codes 1 / 2 / 3.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mimfrac/config.hpp"
#include "mimfrac/inversion.hpp"

namespace mimfrac {

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;  ///< overrides output_dir of the config
    std::optional<std::uint64_t> seed;         ///< overrides seed of the config
    bool quiet = false;
};

/// Writes solution.csv (x, t, u1, u2) and observation.csv (t, u1_at_x0);
/// prints min/max of both fields.
void cmd_forward(const CommandOptions& opts, std::ostream& log);

/// Writes reference.csv (x, t, u1_ref, u2_ref, est_rel_err, converged) for the
/// configured reference points. Non-converged points are flagged, not fatal.
void cmd_reference(const CommandOptions& opts, std::ostream& log);

/// Writes obs_clean.csv plus obs_delta_<delta>.csv per configured noise level,
/// each with a .json sidecar recording x0, noise level and seed. The i-th
/// noise level uses seed + i. Returns the written CSV paths.
std::vector<std::filesystem::path> cmd_make_obs(const CommandOptions& opts, std::ostream& log);

/// Inverts the observation file and writes inversion_report.json and
/// inversion_trace.csv. rel_error is reported only when the config carries
/// exact orders.
InversionResult cmd_invert(const CommandOptions& opts, const std::filesystem::path& observation_file,
                           std::ostream& log);

struct ExperimentOptions {
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    std::optional<Orders> z0;
    std::optional<std::size_t> m;
    std::optional<std::size_t> n;
    bool quiet = false;
};

struct ExperimentRow {
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::optional<ReplicateSummary> summary;  ///< empty if the cell threw
    std::string error;

    [[nodiscard]] bool failed() const { return !summary || summary->successes == 0; }
};

struct ExperimentReport {
    std::string id;
    ExperimentSpec spec;
    std::vector<ExperimentRow> rows;
};

/// Runs the replicate pipeline of a built-in example for every noise level and
/// writes experiment_<id>.md, experiment_<id>.csv and experiment_<id>.json.
ExperimentReport cmd_experiment(std::string_view id, const ExperimentOptions& opts, std::ostream& log);

/// Markdown table with columns delta, mean z_inv, mean Err, Err of mean z_inv,
/// mean iterations, failures.
std::string render_markdown(const ExperimentReport& report);

/// Creates `dir` if needed and probes it with a temporary file; throws IoError.
void ensure_writable(const std::filesystem::path& dir);

/// Reads a two-column (t, u1_at_x0) observation CSV; picks up noise level and
/// seed from a sibling .json sidecar when present.
ObservationSeries read_observation(const std::filesystem::path& path, double x0);

/// Parses argv and dispatches: forward | reference | make-obs | invert | experiment.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mimfrac
