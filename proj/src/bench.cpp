#include "hankelrec/bench.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hankelrec/io.hpp"
#include "hankelrec/nd_hankel.hpp"
#include "hankelrec/spectral_signal.hpp"

namespace hankelrec::bench {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::phase:
        return "phase";
    case ExperimentKind::timing:
        return "timing";
    case ExperimentKind::noise:
        return "noise";
    case ExperimentKind::nd_demo:
        return "nd-demo";
    case ExperimentKind::recover:
        return "recover";
    }
    return "phase";
}

ExperimentKind experiment_kind_from_string(std::string_view text) {
    for (auto k : {ExperimentKind::phase, ExperimentKind::timing, ExperimentKind::noise, ExperimentKind::nd_demo,
                   ExperimentKind::recover}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    if (text == "nd_demo") {
        return ExperimentKind::nd_demo;
    }
    throw ArgumentError("unknown experiment kind '" + std::string(text) + "'");
}

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
    }
    return v;
}

std::vector<double> logspace(double lo_exp, double hi_exp, int count) {
    std::vector<double> v = linspace(lo_exp, hi_exp, count);
    for (auto& x : v) {
        x = std::pow(10.0, x);
    }
    return v;
}

} // namespace

ExperimentSpec default_spec(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    switch (kind) {
    case ExperimentKind::phase:
    case ExperimentKind::recover:
        s.n_values = {127};
        s.p_values = linspace(0.1, 0.95, 18);
        s.trials = 50;
        break;
    case ExperimentKind::timing:
        s.n_values = {3999, 7999};
        s.r_values = {15, 30};
        s.m_values = {800, 1200};
        s.trials = 10;
        s.algorithms = {Algorithm::iht, Algorithm::fiht};
        s.solver.tol_residual = 0.0;
        s.solver.tol_step = 1e-5;
        break;
    case ExperimentKind::noise:
        s.n_values = {511};
        s.r_values = {6};
        s.m_values = {128, 256};
        s.sigmas = logspace(-4.0, 0.0, 9);
        s.trials = 10;
        s.solver.tol_residual = 0.0;
        s.solver.tol_step = 1e-5;
        break;
    case ExperimentKind::nd_demo:
        s.nd_dims = {15, 15, 63};
        s.r_values = {5};
        s.nd_fraction = 0.08;
        s.trials = 50;
        s.solver.tol_residual = 1e-6;
        s.solver.tol_step = 1e-8;
        break;
    }
    return s;
}

void ExperimentSpec::finalize() {
    const ExperimentSpec d = default_spec(kind);
    if (n_values.empty()) {
        n_values = d.n_values;
    }
    if (kind == ExperimentKind::phase && p_values.empty() && m_values.empty()) {
        p_values = d.p_values;
    }
    if ((kind == ExperimentKind::timing || kind == ExperimentKind::noise) && m_values.empty()) {
        m_values = d.m_values;
    }
    if (kind != ExperimentKind::phase && r_values.empty()) {
        r_values = d.r_values;
    }
    if (kind == ExperimentKind::noise && sigmas.empty()) {
        sigmas = d.sigmas;
    }
    if (algorithms.empty()) {
        algorithms = d.algorithms;
    }
    if (trials < 1) {
        throw ArgumentError("trials must be >= 1");
    }
    for (Index n : n_values) {
        if (n < 2) {
            throw ArgumentError("signal length must be >= 2");
        }
    }
    for (double p : p_values) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw ArgumentError("sampling ratios must lie in (0, 1]");
        }
    }
    for (Index m : m_values) {
        if (m < 1) {
            throw ArgumentError("sample counts must be >= 1");
        }
    }
    for (Index r : r_values) {
        if (r < 1) {
            throw ArgumentError("ranks must be >= 1");
        }
    }
    for (double s : sigmas) {
        if (!(s >= 0.0)) {
            throw ArgumentError("noise levels must be >= 0");
        }
    }
    if (min_separation_cells < 0.0) {
        throw ArgumentError("minimum separation must be >= 0");
    }
    if (kind == ExperimentKind::phase && p_values.empty() && m_values.empty()) {
        throw ArgumentError("phase grid is empty");
    }
    if (kind == ExperimentKind::noise && sigmas.empty()) {
        throw ArgumentError("noise grid is empty");
    }
    if (kind == ExperimentKind::nd_demo && !(nd_fraction > 0.0 && nd_fraction <= 1.0)) {
        throw ArgumentError("3-D sampling fraction must lie in (0, 1]");
    }
}

ExperimentSpec spec_from_json(const std::string& text, ExperimentSpec base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("experiment config: ") + e.what());
    }
    if (!j.is_object()) {
        throw IoError("experiment config: expected a JSON object");
    }
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "kind") {
                base.kind = experiment_kind_from_string(v.get<std::string>());
            } else if (key == "n") {
                base.n_values = v.is_array() ? v.get<std::vector<Index>>() : std::vector<Index>{v.get<Index>()};
            } else if (key == "p") {
                base.p_values = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
            } else if (key == "m") {
                base.m_values = v.is_array() ? v.get<std::vector<Index>>() : std::vector<Index>{v.get<Index>()};
            } else if (key == "rank") {
                base.r_values = v.is_array() ? v.get<std::vector<Index>>() : std::vector<Index>{v.get<Index>()};
            } else if (key == "r_max") {
                base.r_max = v.get<Index>();
            } else if (key == "sigma_list") {
                base.sigmas = v.get<std::vector<double>>();
            } else if (key == "trials") {
                base.trials = v.get<Index>();
            } else if (key == "min_sep") {
                base.min_separation_cells = v.get<double>();
            } else if (key == "damping") {
                const auto range = v.get<std::vector<double>>();
                if (range.size() != 2) {
                    throw IoError("experiment config: damping must be [lo, hi]");
                }
                base.damping_range = {range[0], range[1]};
            } else if (key == "sampling") {
                base.sampling = sampling_mode_from_string(v.get<std::string>());
            } else if (key == "algo") {
                base.algorithms.clear();
                if (v.is_array()) {
                    for (const auto& a : v) {
                        base.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
                    }
                } else {
                    base.algorithms.push_back(algorithm_from_string(v.get<std::string>()));
                }
            } else if (key == "init") {
                base.solver.init = init_kind_from_string(v.get<std::string>());
            } else if (key == "resample_rounds") {
                base.solver.resample_rounds = v.get<Index>();
            } else if (key == "mu") {
                base.solver.mu = v.get<double>();
            } else if (key == "tol_res") {
                base.solver.tol_residual = v.get<double>();
            } else if (key == "tol_step") {
                base.solver.tol_step = v.get<double>();
            } else if (key == "max_iters") {
                base.solver.max_iters = v.get<Index>();
            } else if (key == "dims") {
                base.nd_dims = v.get<std::vector<Index>>();
            } else if (key == "fraction") {
                base.nd_fraction = v.get<double>();
            } else if (key == "seed") {
                base.seed = v.get<std::uint64_t>();
            } else if (key == "threads") {
                base.threads = v.get<unsigned>();
            } else if (key == "out") {
                base.out_dir = v.get<std::string>();
            } else if (key == "check") {
                base.check = v.get<bool>();
            } else if (key == "reproducible") {
                base.reproducible = v.get<bool>();
            } else {
                throw IoError("experiment config: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("experiment config: ") + e.what());
    } catch (const ArgumentError& e) {
        throw IoError(std::string("experiment config: ") + e.what());
    }
    return base;
}

double oracle_discrepancy(const HankelOperator& op, const CVec& z, std::uint64_t seed) {
    if (op.signal_size() > dense_oracle_max_n) {
        throw OracleScaleError("oracle cross-check limited to signals of at most " +
                               std::to_string(dense_oracle_max_n) + " entries");
    }
    Rng rng(seed);
    auto random = [&rng](Index len) {
        CVec v(len);
        for (auto& x : v) {
            x = rng.complex_normal();
        }
        return v;
    };
    const CVec u = random(op.rows());
    const CVec v = random(op.cols());
    const CMat H = op.dense(z);
    auto rel = [](const CVec& a, const CVec& b) {
        const double scale = std::max(b.norm(), std::numeric_limits<double>::min());
        return (a - b).norm() / scale;
    };
    double worst = 0.0;
    worst = std::max(worst, rel(op.apply(z, v), H * v));
    worst = std::max(worst, rel(op.apply_adjoint(z, u), H.adjoint() * u));
    worst = std::max(worst, rel(op.adjoint_lowrank(u, RVec::Ones(1), v), op.adjoint_dense(u * v.adjoint())));
    const CVec back = (op.adjoint_dense(H).array() / op.weights().array().cast<cplx>()).matrix();
    worst = std::max(worst, rel(back, z));
    return worst;
}

std::uint64_t trial_seed(std::uint64_t base, Index n, Index m, Index r, double sigma, Index trial) {
    std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(n));
    s = derive_seed(s, static_cast<std::uint64_t>(m));
    s = derive_seed(s, static_cast<std::uint64_t>(r));
    s = derive_seed(s, std::bit_cast<std::uint64_t>(sigma));
    return derive_seed(s, static_cast<std::uint64_t>(trial));
}

namespace {

// Oracle checks in trials are limited to this length to keep them cheap.
constexpr Index check_max_n = 1024;
constexpr double check_tol = 1e-10;

enum SeedKey : std::uint64_t { signal_key = 1, sample_key = 2, noise_key = 3 };

void add_noise(CVec& observed, const SampleSet& omega, double sigma, std::uint64_t seed) {
    if (sigma == 0.0) {
        return;
    }
    const RVec mult = omega.multiplicity();
    Rng rng(seed);
    CVec w = CVec::Zero(observed.size());
    double obs_norm2 = 0.0;
    for (Index a = 0; a < observed.size(); ++a) {
        if (mult[a] > 0.0) {
            w[a] = rng.complex_normal();
            obs_norm2 += std::norm(observed[a]);
        }
    }
    observed += (sigma * std::sqrt(obs_norm2) / w.norm()) * w;
}

TrialOutcome solve_and_score(const HankelOperator& op, const CVec& observed, const SampleSet& omega,
                             const CVec& truth, Algorithm algo, const SolverConfig& cfg, double threshold) {
    TrialOutcome out;
    const double truth_norm = truth.norm();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const SolveResult res = solve(algo, op, observed, omega, cfg);
        out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.rel_err = (res.x_rec - truth).norm() / truth_norm;
        out.iterations = res.iterations;
        out.reason = res.reason;
    } catch (const DivergenceError& e) {
        out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.rel_err = (e.result().x_rec - truth).norm() / truth_norm;
        out.iterations = e.result().iterations;
        out.reason = "divergence";
    } catch (const PartialSvdError&) {
        out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.rel_err = std::numeric_limits<double>::infinity();
        out.reason = "svd";
    }
    out.success = out.rel_err <= threshold;
    return out;
}

} // namespace

TrialOutcome run_trial(const TrialSpec& t, const ExperimentSpec& spec) {
    SignalGenConfig gen;
    gen.n = t.n;
    gen.r = t.r;
    gen.min_separation = spec.min_separation_cells / static_cast<double>(t.n);
    gen.damping_range = spec.damping_range;
    gen.seed = derive_seed(t.seed, signal_key);
    SpectralSignal sig;
    try {
        sig = generate_signal(gen);
    } catch (const GenerationError&) {
        TrialOutcome out;
        out.rel_err = std::numeric_limits<double>::infinity();
        out.reason = "generation";
        return out;
    }
    const SampleSet omega = sample_indices(t.n, t.m, spec.sampling, derive_seed(t.seed, sample_key));
    CVec observed = CVec::Zero(t.n);
    for (Index a : omega.indices) {
        observed[a] = sig.samples[a];
    }
    add_noise(observed, omega, t.sigma, derive_seed(t.seed, noise_key));

    const Hankel1d op(make_shape(t.n));
    if (spec.check && t.n <= check_max_n) {
        const double gap = oracle_discrepancy(op, sig.samples, t.seed);
        if (!(gap <= check_tol)) {
            throw Error("oracle cross-check failed: fast and dense operators differ by " + std::to_string(gap));
        }
    }
    SolverConfig cfg = spec.solver;
    cfg.r = t.r;
    cfg.seed = t.seed;
    if (cfg.init == InitKind::resampled && !cfg.mu) {
        cfg.mu = incoherence_estimate(sig, op.shape());
    }
    return solve_and_score(op, observed, omega, sig.samples, t.algo, cfg, phase_success_threshold);
}

void CellRecord::aggregate() {
    const auto count = static_cast<double>(trials.size());
    success_count = 0;
    double err = 0.0;
    double iters = 0.0;
    double ms = 0.0;
    for (const auto& t : trials) {
        success_count += t.success ? 1 : 0;
        err += t.rel_err;
        iters += static_cast<double>(t.iterations);
        ms += t.ms;
    }
    success_rate = count > 0 ? static_cast<double>(success_count) / count : 0.0;
    mean_rel_err = count > 0 ? err / count : 0.0;
    mean_iters = count > 0 ? iters / count : 0.0;
    mean_ms = count > 0 ? ms / count : 0.0;
}

namespace {

// Runs fn(0..count-1) on up to `threads` workers; the first exception is
// rethrown after all workers stop.
template <typename Fn>
void parallel_for(Index count, unsigned threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<Index>(threads, count));
    if (threads <= 1) {
        for (Index k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::atomic<Index> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const Index k = next.fetch_add(1);
                if (k >= count) {
                    return;
                }
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next.store(count);
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

CellRecord make_cell(Index n, Index m, double p, Index r, double sigma, Algorithm algo, const ExperimentSpec& spec) {
    CellRecord cell;
    cell.n = n;
    cell.m = m;
    cell.p = p;
    cell.r = r;
    cell.sigma = sigma;
    cell.algo = algo;
    for (Index k = 0; k < spec.trials; ++k) {
        TrialSpec t;
        t.n = n;
        t.m = m;
        t.p = p;
        t.r = r;
        t.sigma = sigma;
        t.algo = algo;
        t.trial = k;
        t.seed = trial_seed(spec.seed, n, m, r, sigma, k);
        cell.specs.push_back(t);
    }
    return cell;
}

Index clamp_samples(Index m, Index n, SamplingMode mode) {
    m = std::max<Index>(m, 1);
    return mode == SamplingMode::without_replacement ? std::min(m, n) : m;
}

} // namespace

CellRecord run_cell(CellRecord cell, const ExperimentSpec& spec, const TrialRunner& runner) {
    cell.trials.assign(cell.specs.size(), TrialOutcome{});
    parallel_for(static_cast<Index>(cell.specs.size()), spec.threads, [&](Index k) {
        cell.trials[static_cast<std::size_t>(k)] = runner(cell.specs[static_cast<std::size_t>(k)], spec);
    });
    cell.aggregate();
    return cell;
}

Table run_phase(const ExperimentSpec& spec_in, const TrialRunner& runner) {
    ExperimentSpec spec = spec_in;
    spec.finalize();
    const Algorithm algo = spec.algorithms.front();
    Table table;
    for (Index n : spec.n_values) {
        const HankelShape shape = make_shape(n);
        Index r_cap = std::min(shape.n1, shape.n2);
        if (spec.r_max > 0) {
            r_cap = std::min(r_cap, spec.r_max);
        }
        std::vector<std::pair<Index, double>> columns;
        if (!spec.m_values.empty()) {
            for (Index m : spec.m_values) {
                const Index mm = clamp_samples(m, n, spec.sampling);
                columns.emplace_back(mm, static_cast<double>(mm) / static_cast<double>(n));
            }
        } else {
            for (double p : spec.p_values) {
                columns.emplace_back(clamp_samples(std::llround(p * static_cast<double>(n)), n, spec.sampling), p);
            }
        }
        for (const auto& [m, p] : columns) {
            if (!spec.r_values.empty()) {
                for (Index r : spec.r_values) {
                    if (r <= std::min(shape.n1, shape.n2)) {
                        table.push_back(run_cell(make_cell(n, m, p, r, 0.0, algo, spec), spec, runner));
                    }
                }
                continue;
            }
            // Increase r until every trial of a row fails.
            for (Index r = 1; r <= r_cap; ++r) {
                table.push_back(run_cell(make_cell(n, m, p, r, 0.0, algo, spec), spec, runner));
                if (table.back().success_count == 0) {
                    break;
                }
            }
        }
    }
    return table;
}

Table run_timing(const ExperimentSpec& spec_in, const TrialRunner& runner) {
    ExperimentSpec spec = spec_in;
    spec.kind = ExperimentKind::timing;
    spec.finalize();
    Table table;
    for (Index n : spec.n_values) {
        for (Index r : spec.r_values) {
            for (Index m : spec.m_values) {
                const Index mm = clamp_samples(m, n, spec.sampling);
                for (Algorithm algo : spec.algorithms) {
                    table.push_back(run_cell(make_cell(n, mm, static_cast<double>(mm) / static_cast<double>(n), r,
                                                       0.0, algo, spec),
                                             spec, runner));
                }
            }
        }
    }
    return table;
}

Table run_noise(const ExperimentSpec& spec_in, const TrialRunner& runner) {
    ExperimentSpec spec = spec_in;
    spec.kind = ExperimentKind::noise;
    spec.finalize();
    const Index r = spec.r_values.front();
    const Algorithm algo = spec.algorithms.front();
    Table table;
    for (Index n : spec.n_values) {
        for (Index m : spec.m_values) {
            const Index mm = clamp_samples(m, n, spec.sampling);
            for (double sigma : spec.sigmas) {
                table.push_back(run_cell(
                    make_cell(n, mm, static_cast<double>(mm) / static_cast<double>(n), r, sigma, algo, spec), spec,
                    runner));
            }
        }
    }
    return table;
}

Table run_nd_demo(const ExperimentSpec& spec_in) {
    ExperimentSpec spec = spec_in;
    spec.kind = ExperimentKind::nd_demo;
    spec.finalize();
    const NdHankelShape shape = make_nd_shape(spec.nd_dims);
    const Index size = shape.size();
    const Index r = spec.r_values.front();
    const Index m = clamp_samples(std::llround(spec.nd_fraction * static_cast<double>(size)), size, spec.sampling);
    const HankelNd op(shape);

    auto runner = [&](const TrialSpec& t, const ExperimentSpec& s) {
        NdSignalGenConfig gen;
        gen.dims = s.nd_dims;
        gen.r = t.r;
        gen.min_separation_cells = s.min_separation_cells;
        gen.damping_range = s.damping_range;
        gen.seed = derive_seed(t.seed, signal_key);
        const NdSignal sig = generate_nd_signal(gen);
        const SampleSet omega = sample_indices(size, t.m, s.sampling, derive_seed(t.seed, sample_key));
        CVec observed = CVec::Zero(size);
        for (Index a : omega.indices) {
            observed[a] = sig.entries[a];
        }
        add_noise(observed, omega, t.sigma, derive_seed(t.seed, noise_key));
        if (s.check && size <= dense_oracle_max_n) {
            const double gap = oracle_discrepancy(op, sig.entries, t.seed);
            if (!(gap <= check_tol)) {
                throw Error("oracle cross-check failed: fast and dense operators differ by " + std::to_string(gap));
            }
        }
        const std::uint64_t need = nd_fiht_memory_estimate(shape, t.r);
        if (need > default_nd_memory_budget) {
            throw ResourceError("3-D demo exceeds the memory budget");
        }
        SolverConfig cfg = s.solver;
        cfg.r = t.r;
        cfg.seed = t.seed;
        return solve_and_score(op, observed, omega, sig.entries, Algorithm::fiht, cfg, s.nd_success_threshold);
    };
    CellRecord cell = make_cell(size, m, static_cast<double>(m) / static_cast<double>(size), r, 0.0,
                                Algorithm::fiht, spec);
    cell.dims = spec.nd_dims;
    return {run_cell(std::move(cell), spec, runner)};
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Exact text form, so trial rows can be reloaded without loss.
std::string exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string ms_field(double v, bool reproducible) { return reproducible ? std::string() : num(v); }

std::string dims_text(const std::vector<Index>& dims) {
    std::string out;
    for (std::size_t q = 0; q < dims.size(); ++q) {
        out += (q ? "x" : "") + std::to_string(dims[q]);
    }
    return out;
}

std::string phase_row(const CellRecord& c, bool reproducible) {
    return std::to_string(c.n) + "," + num(c.p) + "," + std::to_string(c.r) + "," + num(c.success_rate) + "," +
           num(c.mean_iters) + "," + ms_field(c.mean_ms, reproducible);
}

} // namespace

std::string plotdata_csv(const Table& table, ExperimentKind kind, bool reproducible) {
    if (table.empty()) {
        throw ArgumentError("emit_plotdata: table is empty");
    }
    std::ostringstream out;
    switch (kind) {
    case ExperimentKind::phase:
    case ExperimentKind::recover:
        out << "n,p,r,success_rate,mean_iters,mean_ms\n";
        for (const auto& c : table) {
            out << phase_row(c, reproducible) << "\n";
        }
        break;
    case ExperimentKind::timing:
        out << "n,r,m,algo,mean_iters,mean_rel_err,mean_ms\n";
        for (const auto& c : table) {
            out << c.n << "," << c.r << "," << c.m << "," << to_string(c.algo) << "," << num(c.mean_iters) << ","
                << num(c.mean_rel_err) << "," << ms_field(c.mean_ms, reproducible) << "\n";
        }
        break;
    case ExperimentKind::noise:
        out << "n,m,sigma,snr_db,mean_rel_err\n";
        for (const auto& c : table) {
            const double snr = c.sigma > 0.0 ? -20.0 * std::log10(c.sigma) : std::numeric_limits<double>::infinity();
            out << c.n << "," << c.m << "," << num(c.sigma) << "," << num(snr + 0.0) << "," << num(c.mean_rel_err) << "\n";
        }
        break;
    case ExperimentKind::nd_demo:
        out << "dims,r,m,success_rate,mean_rel_err,mean_iters,mean_ms\n";
        for (const auto& c : table) {
            out << dims_text(c.dims) << "," << c.r << "," << c.m << ","
                << num(c.success_rate) << "," << num(c.mean_rel_err) << "," << num(c.mean_iters) << ","
                << ms_field(c.mean_ms, reproducible) << "\n";
        }
        break;
    }
    return out.str();
}

void emit_plotdata(const Table& table, ExperimentKind kind, const std::filesystem::path& path, bool reproducible) {
    io::write_file_atomic(path, plotdata_csv(table, kind, reproducible));
}

void emit_trials(const Table& table, const std::filesystem::path& path, bool reproducible) {
    if (table.empty()) {
        throw ArgumentError("emit_trials: table is empty");
    }
    std::ostringstream out;
    out << "n,m,p,sigma,r,algo,trial,seed,success,rel_err,iterations,ms,reason\n";
    for (const auto& c : table) {
        for (std::size_t k = 0; k < c.trials.size(); ++k) {
            const auto& s = c.specs[k];
            const auto& t = c.trials[k];
            out << c.n << "," << c.m << "," << exact(c.p) << "," << exact(c.sigma) << "," << c.r << ","
                << to_string(c.algo) << "," << s.trial << "," << s.seed << "," << (t.success ? 1 : 0) << ","
                << exact(t.rel_err) << "," << t.iterations << "," << (reproducible ? std::string() : exact(t.ms))
                << "," << t.reason << "\n";
        }
    }
    io::write_file_atomic(path, out.str());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& s) {
    if (s.empty()) {
        return 0.0;
    }
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
        throw IoError("bad number '" + s + "'");
    }
    return v;
}

} // namespace

Table load_trials(const std::filesystem::path& trials_path,
                  const std::optional<std::filesystem::path>& phase_summary) {
    std::istringstream in(io::read_file(trials_path));
    std::string line;
    if (!std::getline(in, line) || line != "n,m,p,sigma,r,algo,trial,seed,success,rel_err,iterations,ms,reason") {
        throw IoError(trials_path.string() + ": unexpected header");
    }
    Table table;
    bool timing_present = false;
    std::size_t row = 1;
    try {
        while (std::getline(in, line)) {
            ++row;
            const auto f = split_csv(line);
            if (f.size() != 13) {
                throw IoError("row " + std::to_string(row) + ": expected 13 fields");
            }
            const Index n = std::stoll(f[0]);
            const Index m = std::stoll(f[1]);
            const double p = parse_double(f[2]);
            const double sigma = parse_double(f[3]);
            const Index r = std::stoll(f[4]);
            const Algorithm algo = algorithm_from_string(f[5]);
            if (table.empty() || table.back().n != n || table.back().m != m || table.back().p != p ||
                table.back().sigma != sigma || table.back().r != r || table.back().algo != algo) {
                CellRecord c;
                c.n = n;
                c.m = m;
                c.p = p;
                c.r = r;
                c.sigma = sigma;
                c.algo = algo;
                table.push_back(std::move(c));
            }
            TrialSpec s;
            s.n = n;
            s.m = m;
            s.p = p;
            s.r = r;
            s.sigma = sigma;
            s.algo = algo;
            s.trial = std::stoll(f[6]);
            s.seed = std::stoull(f[7]);
            TrialOutcome t;
            t.success = f[8] == "1";
            t.rel_err = parse_double(f[9]);
            t.iterations = std::stoll(f[10]);
            t.ms = parse_double(f[11]);
            timing_present = timing_present || !f[11].empty();
            t.reason = f[12];
            table.back().specs.push_back(s);
            table.back().trials.push_back(t);
        }
    } catch (const std::logic_error& e) {
        throw IoError(trials_path.string() + ": row " + std::to_string(row) + ": " + e.what());
    }
    for (auto& c : table) {
        c.aggregate();
    }
    if (phase_summary) {
        std::istringstream sin(io::read_file(*phase_summary));
        std::getline(sin, line);
        if (line != "n,p,r,success_rate,mean_iters,mean_ms") {
            throw IoError(phase_summary->string() + ": unexpected header");
        }
        std::size_t k = 0;
        while (std::getline(sin, line)) {
            if (k >= table.size() || line != phase_row(table[k], !timing_present)) {
                throw IoError(phase_summary->string() + ": row " + std::to_string(k + 2) +
                              " disagrees with the per-trial records");
            }
            ++k;
        }
        if (k != table.size()) {
            throw IoError(phase_summary->string() + ": missing rows");
        }
    }
    return table;
}

RecoverStatus run_recover(const RecoverRequest& req, std::string& diagnostic) {
    SpectralSignal sig;
    SampleSet omega;
    try {
        if (req.solver.r < 1) {
            throw ArgumentError("rank must be >= 1");
        }
        sig = io::read_signal(req.signal);
        omega = io::read_sample_set(req.samples);
        if (omega.n != sig.n) {
            throw ArgumentError("sample set length " + std::to_string(omega.n) + " does not match signal length " +
                                std::to_string(sig.n));
        }
        if (omega.indices.empty()) {
            throw ArgumentError("sample set is empty");
        }
        const HankelShape shape = make_shape(sig.n);
        if (req.solver.r > std::min(shape.n1, shape.n2)) {
            throw ArgumentError("rank exceeds min(n1, n2) = " + std::to_string(std::min(shape.n1, shape.n2)));
        }
        req.solver.validate();
    } catch (const Error& e) {
        diagnostic = e.what();
        return RecoverStatus::bad_input;
    }

    const Hankel1d op(make_shape(sig.n));
    if (req.check && sig.n <= check_max_n) {
        const double gap = oracle_discrepancy(op, sig.samples, req.solver.seed);
        if (!(gap <= check_tol)) {
            throw Error("oracle cross-check failed: fast and dense operators differ by " + std::to_string(gap));
        }
    }
    CVec observed = CVec::Zero(sig.n);
    for (Index a : omega.indices) {
        observed[a] = sig.samples[a];
    }
    SolverConfig cfg = req.solver;
    if (sig.modes.size() > 0) {
        // Ground truth for the error column when the file carries modes.
        cfg.truth = make_signal(sig.n, sig.modes).samples;
        if (cfg.init == InitKind::resampled && !cfg.mu) {
            cfg.mu = incoherence_estimate(make_signal(sig.n, sig.modes), op.shape());
        }
    }

    auto write_outputs = [&](const SolveResult& res) {
        io::write_result(req.result, res);
        if (req.reconstruction) {
            SpectralSignal rec;
            rec.n = sig.n;
            rec.samples = res.x_rec;
            io::write_signal(*req.reconstruction, rec);
        }
    };
    try {
        const SolveResult res = solve(req.algo, op, observed, omega, cfg);
        write_outputs(res);
        return res.converged ? RecoverStatus::converged : RecoverStatus::max_iters;
    } catch (const DivergenceError& e) {
        write_outputs(e.result());
        diagnostic = e.what();
        return RecoverStatus::diverged;
    } catch (const UndefinedResidualError& e) {
        diagnostic = e.what();
        return RecoverStatus::bad_input;
    }
}

} // namespace hankelrec::bench
