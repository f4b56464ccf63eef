#include "hankelrec/solvers.hpp"

#include <chrono>
#include <limits>
#include <cmath>
#include <string>

namespace hankelrec {

std::string_view to_string(InitKind kind) { return kind == InitKind::one_step ? "onestep" : "resampled"; }

std::string_view to_string(Algorithm algo) { return algo == Algorithm::iht ? "iht" : "fiht"; }

InitKind init_kind_from_string(std::string_view text) {
    if (text == "onestep" || text == "one_step") {
        return InitKind::one_step;
    }
    if (text == "resampled") {
        return InitKind::resampled;
    }
    throw ArgumentError("unknown init '" + std::string(text) + "'");
}

Algorithm algorithm_from_string(std::string_view text) {
    if (text == "iht") {
        return Algorithm::iht;
    }
    if (text == "fiht") {
        return Algorithm::fiht;
    }
    throw ArgumentError("unknown algorithm '" + std::string(text) + "'");
}

void SolverConfig::validate() const {
    if (r < 1) {
        throw ArgumentError("rank must be >= 1");
    }
    if (max_iters < 1) {
        throw ArgumentError("max_iters must be >= 1");
    }
    if (tol_residual < 0.0 || tol_step < 0.0) {
        throw ArgumentError("tolerances must be nonnegative");
    }
    if (tol_residual == 0.0 && tol_step == 0.0) {
        throw ArgumentError("at most one stopping tolerance may be disabled");
    }
    if (stepsize && !(*stepsize > 0.0)) {
        throw ArgumentError("stepsize must be positive");
    }
    if (init == InitKind::resampled) {
        if (!mu || !(*mu > 0.0)) {
            throw ArgumentError("resampled initialization needs a positive mu");
        }
        if (resample_rounds < 0) {
            throw ArgumentError("resample rounds must be >= 0");
        }
    }
}

double observed_residual(const CVec& x_l, const CVec& observed, const SampleSet& omega) {
    if (x_l.size() != omega.n || observed.size() != omega.n) {
        throw ArgumentError("observed_residual: length mismatch");
    }
    const CVec mult = omega.multiplicity().cast<cplx>();
    const double denom = (mult.array() * observed.array()).matrix().norm();
    if (!(denom > 0.0)) {
        throw UndefinedResidualError("observed residual undefined for a zero observed vector");
    }
    return (mult.array() * (x_l - observed).array()).matrix().norm() / denom;
}

LowRankFactor init_one_step(const HankelOperator& op, const CVec& observed, const SampleSet& omega, Index r,
                            const PartialSvdOptions& svd, PartialSvdInfo* info) {
    const Index n = op.signal_size();
    if (omega.n != n || observed.size() != n) {
        throw ArgumentError("init_one_step: length mismatch");
    }
    if (omega.size() == 0) {
        return LowRankFactor::zero(op.rows(), op.cols(), r);
    }
    const double pinv = static_cast<double>(n) / static_cast<double>(omega.size());
    const CVec z = pinv * (omega.multiplicity().cast<cplx>().array() * observed.array()).matrix();
    return partial_svd_hankel(op, z, r, svd, info);
}

LowRankFactor trim(const LowRankFactor& L, double mu, double c_s, Index n) {
    const double cap = std::sqrt(mu * c_s * static_cast<double>(L.rank()) / static_cast<double>(n));
    LowRankFactor out = L;
    auto cap_rows = [cap](CMat& M) {
        for (Index i = 0; i < M.rows(); ++i) {
            const double nrm = M.row(i).norm();
            if (nrm > cap) {
                M.row(i) *= cap / nrm;
            }
        }
    };
    cap_rows(out.U);
    cap_rows(out.V);
    return out;
}

LowRankFactor trim(const LowRankFactor& L, double mu, const HankelShape& shape) {
    return trim(L, mu, shape.c_s, shape.n);
}

std::vector<SampleSet> partition_samples(const SampleSet& omega, Index parts) {
    if (parts < 1 || omega.size() < parts) {
        throw ArgumentError("cannot partition " + std::to_string(omega.size()) + " samples into " +
                            std::to_string(parts) + " nonempty sets");
    }
    const Index chunk = omega.size() / parts;
    std::vector<SampleSet> out;
    out.reserve(static_cast<std::size_t>(parts));
    for (Index k = 0; k < parts; ++k) {
        SampleSet s;
        s.n = omega.n;
        s.mode = omega.mode;
        const auto begin = omega.indices.begin() + k * chunk;
        const auto end = k + 1 == parts ? omega.indices.end() : begin + chunk;
        s.indices.assign(begin, end);
        out.push_back(std::move(s));
    }
    return out;
}

LowRankFactor init_resampled(const HankelOperator& op, const CVec& observed, const SampleSet& omega, Index r,
                             Index rounds, double mu, const PartialSvdOptions& svd,
                             std::vector<LowRankFactor>* history) {
    const Index n = op.signal_size();
    if (omega.n != n || observed.size() != n) {
        throw ArgumentError("init_resampled: length mismatch");
    }
    if (rounds < 0) {
        throw ArgumentError("init_resampled: rounds must be >= 0");
    }
    const std::vector<SampleSet> parts = partition_samples(omega, rounds + 1);

    LowRankFactor current = init_one_step(op, observed, parts[0], r, svd);
    if (history != nullptr) {
        history->push_back(current);
    }
    for (Index l = 0; l < rounds; ++l) {
        const LowRankFactor trimmed = trim(current, mu, op.c_s(), n);
        const CVec xhat = op.pseudo_inverse(trimmed);
        const LowRankFactor basis = orthonormalize(trimmed);

        const SampleSet& fresh = parts[static_cast<std::size_t>(l + 1)];
        const double pinv = static_cast<double>(n) / static_cast<double>(fresh.size());
        const CVec mult = fresh.multiplicity().cast<cplx>();
        const CVec h = xhat + pinv * (mult.array() * (observed - xhat).array()).matrix();

        current = retract_rank_r(tangent_coeffs(op, h, basis.U, basis.V), basis.U, basis.V, r);
        if (history != nullptr) {
            history->push_back(current);
        }
    }
    return current;
}

namespace {

bool all_finite(const CVec& v) {
    return v.array().real().allFinite() && v.array().imag().allFinite();
}

SolveResult run_iterations(Algorithm algo, const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                           const SolverConfig& cfg, const LowRankFactor& initial) {
    cfg.validate();
    const Index n = op.signal_size();
    if (omega.n != n || observed.size() != n) {
        throw ArgumentError("solver: observed vector or sample set does not match operator size");
    }
    if (omega.size() < 1) {
        throw ArgumentError("solver: need at least one sample");
    }
    if (cfg.r > std::min(op.rows(), op.cols())) {
        throw ArgumentError("solver: rank exceeds min(n1, n2)");
    }
    omega.validate();
    if (initial.rows() != op.rows() || initial.cols() != op.cols()) {
        throw ArgumentError("solver: initial factor does not match operator");
    }

    const CVec mult = omega.multiplicity().cast<cplx>();
    const double pinv = cfg.stepsize.value_or(static_cast<double>(n) / static_cast<double>(omega.size()));
    const CVec obs = (mult.array() * observed.array()).matrix();
    const double obs_norm = obs.norm();
    if (!(obs_norm > 0.0)) {
        throw UndefinedResidualError("solver: observed entries are all zero");
    }
    const double truth_norm = cfg.truth ? cfg.truth->norm() : 0.0;

    SolveResult res;
    LowRankFactor L = initial;
    // FIHT reuses the transforms of its factor in the next tangent step.
    FactorSpectra spectra;
    if (algo == Algorithm::fiht) {
        spectra = op.spectra(L.U, L.V);
    }
    CVec x = algo == Algorithm::fiht ? op.pseudo_inverse(L, spectra) : op.pseudo_inverse(L);
    res.x_rec = x;
    res.factor = L;
    res.reason = "max_iters";

    for (Index l = 0; l < cfg.max_iters; ++l) {
        const auto t0 = std::chrono::steady_clock::now();
        const CVec g = (mult.array() * (observed - x).array()).matrix();
        const CVec h = x + pinv * g;
        LowRankFactor next;
        FactorSpectra next_spectra;
        CVec x_next;
        if (algo == Algorithm::fiht) {
            next = retract_rank_r(tangent_coeffs(op, h, L.U, L.V, &spectra), L.U, L.V, cfg.r);
            next_spectra = op.spectra(next.U, next.V);
            x_next = op.pseudo_inverse(next, next_spectra);
        } else {
            if (n <= cfg.dense_svd_max_n) {
                next = dense_hard_threshold(op.dense(h), cfg.r);
            } else {
                next = partial_svd_hankel(op, h, cfg.r, cfg.svd);
            }
            x_next = op.pseudo_inverse(next);
        }
        const auto t1 = std::chrono::steady_clock::now();

        IterRecord rec;
        rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rec.residual = ((mult.array() * x_next.array()).matrix() - obs).norm() / obs_norm;
        const double xn = x.norm();
        rec.step = xn > 0.0 ? (x_next - x).norm() / xn : std::numeric_limits<double>::infinity();
        if (cfg.truth && truth_norm > 0.0) {
            rec.true_err = (x_next - *cfg.truth).norm() / truth_norm;
        }

        if (!all_finite(x_next) || !std::isfinite(rec.residual) || rec.residual > cfg.divergence_threshold) {
            res.converged = false;
            res.reason = "divergence";
            throw DivergenceError("solver diverged at iteration " + std::to_string(l + 1), res);
        }

        res.trace.push_back(rec);
        res.iterations = l + 1;
        x = x_next;
        L = std::move(next);
        spectra = std::move(next_spectra);
        res.x_rec = x;
        res.factor = L;

        if (cfg.tol_residual > 0.0 && rec.residual < cfg.tol_residual) {
            res.converged = true;
            res.reason = "residual";
            break;
        }
        if (cfg.tol_step > 0.0 && rec.step < cfg.tol_step) {
            res.converged = true;
            res.reason = "step";
            break;
        }
    }
    return res;
}

LowRankFactor initial_factor(const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                             const SolverConfig& cfg, std::optional<double>& gap) {
    cfg.validate();
    if (cfg.init == InitKind::resampled) {
        return init_resampled(op, observed, omega, cfg.r, cfg.resample_rounds, *cfg.mu, cfg.svd);
    }
    PartialSvdInfo info;
    LowRankFactor L0 = init_one_step(op, observed, omega, cfg.r, cfg.svd, &info);
    if (info.next_sigma && *info.next_sigma > 0.0) {
        gap = L0.sigma[cfg.r - 1] / *info.next_sigma;
    }
    return L0;
}

} // namespace

SolveResult iht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega, const SolverConfig& cfg,
                      const LowRankFactor& initial) {
    return run_iterations(Algorithm::iht, op, observed, omega, cfg, initial);
}

SolveResult fiht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                       const SolverConfig& cfg, const LowRankFactor& initial) {
    return run_iterations(Algorithm::fiht, op, observed, omega, cfg, initial);
}

SolveResult solve(Algorithm algo, const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                  const SolverConfig& cfg) {
    if (omega.n != op.signal_size() || observed.size() != op.signal_size()) {
        throw ArgumentError("solver: observed vector or sample set does not match operator size");
    }
    std::optional<double> gap;
    const LowRankFactor L0 = initial_factor(op, observed, omega, cfg, gap);
    SolveResult res = run_iterations(algo, op, observed, omega, cfg, L0);
    res.init_spectral_gap = gap;
    return res;
}

SolveResult iht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                      const SolverConfig& cfg) {
    return solve(Algorithm::iht, op, observed, omega, cfg);
}

SolveResult fiht_solve(const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                       const SolverConfig& cfg) {
    return solve(Algorithm::fiht, op, observed, omega, cfg);
}

SolveResult iht_solve(const CVec& observed, const SampleSet& omega, const HankelShape& shape,
                      const SolverConfig& cfg) {
    return iht_solve(Hankel1d(shape), observed, omega, cfg);
}

SolveResult fiht_solve(const CVec& observed, const SampleSet& omega, const HankelShape& shape,
                       const SolverConfig& cfg) {
    return fiht_solve(Hankel1d(shape), observed, omega, cfg);
}

} // namespace hankelrec
