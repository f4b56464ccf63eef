#pragma once

// Iterative hard thresholding solvers for low-rank Hankel completion.
//
// Both solvers iterate
//     g_l     = P_Omega(x - x_l)
//     L_{l+1} = T_r(W_l)
//     x_{l+1} = H^dagger L_{l+1}
// with W_l = H(x_l + g_l / p) for IHT and its projection onto the tangent
// space at L_l for FIHT.
//
// `observed` is a full-length vector holding the sample values at the
// observed positions (anything elsewhere is ignored).  Repeated indices in a
// with-replacement sample set weight their entry by the multiplicity.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hankelrec/common.hpp"
#include "hankelrec/hankel_core.hpp"
#include "hankelrec/low_rank_factor.hpp"
#include "hankelrec/sample_set.hpp"
#include "hankelrec/structured_lowrank.hpp"

namespace hankelrec {

enum class InitKind { one_step, resampled };
enum class Algorithm { iht, fiht };

std::string_view to_string(InitKind kind);
std::string_view to_string(Algorithm algo);
InitKind init_kind_from_string(std::string_view text);
Algorithm algorithm_from_string(std::string_view text);

struct SolverConfig {
    Index r = 1;
    Index max_iters = 500;
    /// Relative observed residual threshold; 0 disables the rule.
    double tol_residual = 1e-4;
    /// Relative iterate change threshold; 0 disables the rule.
    double tol_step = 1e-5;
    InitKind init = InitKind::one_step;
    Index resample_rounds = 0;
    /// Incoherence cap for trimming (required by resampled init).
    std::optional<double> mu;
    /// Gradient step; defaults to n / m.
    std::optional<double> stepsize;
    std::uint64_t seed = 0;
    PartialSvdOptions svd;
    /// IHT uses a dense SVD when the signal length is at most this.
    Index dense_svd_max_n = 256;
    /// Observed residual above which the run is declared divergent.
    double divergence_threshold = 1e6;
    /// Ground truth, only used to fill the true-error telemetry column.
    std::optional<CVec> truth;

    void validate() const;
};

struct IterRecord {
    double residual = 0.0;
    double step = 0.0;
    std::optional<double> true_err;
    double ms = 0.0;
};

struct SolveResult {
    CVec x_rec;
    Index iterations = 0;
    std::vector<IterRecord> trace;
    bool converged = false;
    /// "residual", "step", "max_iters" or "divergence".
    std::string reason;
    /// sigma_r / sigma_{r+1} of the initial matrix, when the SVD provided it.
    std::optional<double> init_spectral_gap;
    LowRankFactor factor;
};

/// Iterate became non-finite or the residual exploded.  result() holds the
/// telemetry so far and the last finite iterate.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, SolveResult partial)
        : Error(what), partial_(std::move(partial)) {}
    const SolveResult& result() const { return partial_; }

private:
    SolveResult partial_;
};

/// ||P_Omega(x_l) - P_Omega(x)|| / ||P_Omega(x)||.
double observed_residual(const CVec& x_l, const CVec& observed, const SampleSet& omega);

/// L_0 = T_r((n/m) H(P_Omega x)).
LowRankFactor init_one_step(const HankelOperator& op, const CVec& observed, const SampleSet& omega, Index r,
                            const PartialSvdOptions& svd = {}, PartialSvdInfo* info = nullptr);

/// Caps every row norm of U and V at sqrt(mu c_s r / n).  The output factors
/// are in general no longer orthonormal.
LowRankFactor trim(const LowRankFactor& L, double mu, double c_s, Index n);
LowRankFactor trim(const LowRankFactor& L, double mu, const HankelShape& shape);

/// Splits the draw-ordered index list into `parts` consecutive groups; the
/// remainder goes to the last group.
std::vector<SampleSet> partition_samples(const SampleSet& omega, Index parts);

/// Resampled initialization with trimming.  `history`, when given, receives
/// the untrimmed estimates L~_0 .. L~_rounds.
LowRankFactor init_resampled(const HankelOperator& op, const CVec& observed, const SampleSet& omega, Index r,
                             Index rounds, double mu, const PartialSvdOptions& svd = {},
                             std::vector<LowRankFactor>* history = nullptr);

SolveResult iht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega, const SolverConfig& cfg);
SolveResult fiht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                       const SolverConfig& cfg);

/// Variants starting from a caller-supplied L_0.
SolveResult iht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega, const SolverConfig& cfg,
                      const LowRankFactor& initial);
SolveResult fiht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                       const SolverConfig& cfg, const LowRankFactor& initial);

SolveResult solve(Algorithm algo, const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                  const SolverConfig& cfg);

// 1-D conveniences.
SolveResult iht_solve(const CVec& observed, const SampleSet& omega, const HankelShape& shape,
                      const SolverConfig& cfg);
SolveResult fiht_solve(const CVec& observed, const SampleSet& omega, const HankelShape& shape,
                       const SolverConfig& cfg);

} // namespace hankelrec
