#pragma once

// Experiment runner: phase-transition grids, IHT/FIHT timing, noise sweeps,
// the 3-D demo and single reconstructions, with CSV output.
//
// CSV layouts (header row first, one row per cell):
//   phase:        n,p,r,success_rate,mean_iters,mean_ms
//   timing:       n,r,m,algo,mean_iters,mean_rel_err,mean_ms
//   noise:        n,m,sigma,snr_db,mean_rel_err
//   nd_demo:      dims,r,m,success_rate,mean_rel_err,mean_iters,mean_ms
//   *_trials.csv: n,m,p,sigma,r,algo,trial,seed,success,rel_err,iterations,ms,reason
// In reproducible mode every wall-time field is left empty so repeated runs
// give identical bytes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hankelrec/common.hpp"
#include "hankelrec/sample_set.hpp"
#include "hankelrec/solvers.hpp"

namespace hankelrec::bench {

enum class ExperimentKind { phase, timing, noise, nd_demo, recover };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view text);

/// Relative error at or below which a phase trial counts as a success.
inline constexpr double phase_success_threshold = 1e-3;

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::phase;

    std::vector<Index> n_values{127};
    /// Sampling ratios (phase).  Ignored when m_values is nonempty.
    std::vector<double> p_values;
    /// Sample counts (timing, noise; phase when set).
    std::vector<Index> m_values;
    /// Explicit ranks.  Empty selects the scan r = 1, 2, ... up to the first
    /// all-fail row (phase) or the defaults of the experiment.
    std::vector<Index> r_values;
    /// Upper bound for the phase scan; 0 means min(n1, n2).
    Index r_max = 0;
    std::vector<double> sigmas;
    Index trials = 50;

    /// Minimum wrap-around frequency distance in units of 1/n; 0 disables.
    double min_separation_cells = 1.5;
    std::array<double, 2> damping_range{0.0, 0.0};
    SamplingMode sampling = SamplingMode::without_replacement;

    std::vector<Algorithm> algorithms{Algorithm::fiht};
    SolverConfig solver;

    std::vector<Index> nd_dims{15, 15, 63};
    double nd_fraction = 0.08;
    /// Success threshold for the 3-D demo.
    double nd_success_threshold = 1e-4;

    std::uint64_t seed = 1;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 1;
    std::filesystem::path out_dir = ".";
    /// Cross-check fast operators against dense references in every trial
    /// (small n only).
    bool check = false;
    bool reproducible = false;

    /// Fills empty grids with the defaults of `kind` and checks invariants.
    void finalize();
};

/// Defaults of each experiment kind (grids, trial counts, stopping rules).
ExperimentSpec default_spec(ExperimentKind kind);

/// Reads a JSON object whose keys mirror ExperimentSpec fields; unknown keys
/// raise IoError.  Fields absent from the file keep their values in `base`.
ExperimentSpec spec_from_json(const std::string& text, ExperimentSpec base = {});

struct TrialSpec {
    Index n = 0;
    Index m = 0;
    double p = 0.0;
    Index r = 0;
    double sigma = 0.0;
    Algorithm algo = Algorithm::fiht;
    Index trial = 0;
    std::uint64_t seed = 0;
};

struct TrialOutcome {
    bool success = false;
    double rel_err = 0.0;
    Index iterations = 0;
    double ms = 0.0;
    std::string reason;
};

using TrialRunner = std::function<TrialOutcome(const TrialSpec&, const ExperimentSpec&)>;

/// Generates a signal and sample set from the trial seed, adds noise when
/// sigma > 0 and runs the solver; solver errors become failed trials.
TrialOutcome run_trial(const TrialSpec& t, const ExperimentSpec& spec);

struct CellRecord {
    Index n = 0;
    Index m = 0;
    double p = 0.0;
    Index r = 0;
    double sigma = 0.0;
    Algorithm algo = Algorithm::fiht;
    std::vector<Index> dims; // grid shape of multi-dimensional cells, empty otherwise
    std::vector<TrialSpec> specs;
    std::vector<TrialOutcome> trials;

    Index success_count = 0;
    double success_rate = 0.0;
    double mean_rel_err = 0.0;
    double mean_iters = 0.0;
    double mean_ms = 0.0;

    void aggregate();
};

using Table = std::vector<CellRecord>;

/// Seed of trial `trial` in the cell with the given coordinates.  The
/// algorithm is not part of the key, so solvers compared in one run see the
/// same problems.
std::uint64_t trial_seed(std::uint64_t base, Index n, Index m, Index r, double sigma, Index trial);

/// Runs every trial of one cell on the worker pool.  Results are stored by
/// trial index, so the record does not depend on scheduling.
CellRecord run_cell(CellRecord cell, const ExperimentSpec& spec, const TrialRunner& runner);

Table run_phase(const ExperimentSpec& spec, const TrialRunner& runner = run_trial);
Table run_timing(const ExperimentSpec& spec, const TrialRunner& runner = run_trial);
Table run_noise(const ExperimentSpec& spec, const TrialRunner& runner = run_trial);
Table run_nd_demo(const ExperimentSpec& spec);

/// Summary CSV for `kind`.  Throws ArgumentError on an empty table and
/// writes atomically.
void emit_plotdata(const Table& table, ExperimentKind kind, const std::filesystem::path& path,
                   bool reproducible = false);
std::string plotdata_csv(const Table& table, ExperimentKind kind, bool reproducible = false);
void emit_trials(const Table& table, const std::filesystem::path& path, bool reproducible = false);

/// Loads a trials CSV, rebuilds the aggregates and, when a phase summary is
/// given, checks it row by row.  Throws IoError on any mismatch.
Table load_trials(const std::filesystem::path& trials_path,
                  const std::optional<std::filesystem::path>& phase_summary = std::nullopt);

/// Exit codes of a single reconstruction.
enum class RecoverStatus : int { converged = 0, bad_input = 1, max_iters = 2, diverged = 3 };

struct RecoverRequest {
    std::filesystem::path signal;
    std::filesystem::path samples;
    std::filesystem::path result;
    std::optional<std::filesystem::path> reconstruction;
    Algorithm algo = Algorithm::fiht;
    SolverConfig solver;
    bool check = false;
};

/// Reads the signal and sample files, solves, writes the result JSON and
/// the optional reconstructed signal.  Malformed input yields bad_input with
/// a message in `diagnostic`.
RecoverStatus run_recover(const RecoverRequest& req, std::string& diagnostic);

/// Largest relative discrepancy between fast and dense operators on z
/// (products with random vectors, adjoint of a random rank-one matrix,
/// H^dagger H z).
double oracle_discrepancy(const HankelOperator& op, const CVec& z, std::uint64_t seed);

} // namespace hankelrec::bench
