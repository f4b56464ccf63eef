#include <doctest.h>

#include <algorithm>

#include "hankelrec/solvers.hpp"
#include "hankelrec/structured_lowrank.hpp"
#include "support.hpp"

using namespace hankelrec;
using namespace testing;

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

LowRankFactor exact_factor(const CVec& x, const HankelShape& s, Index r) {
    return dense_hard_threshold(hankel_dense(x, s), r);
}

struct Problem {
    SpectralSignal sig;
    SampleSet omega;
    CVec observed;
};

Problem problem(Index n, Index r, Index m, std::uint64_t seed) {
    Problem p;
    p.sig = separated_signal(n, r, derive_seed(seed, 1));
    p.omega = sample_indices(n, m, SamplingMode::without_replacement, derive_seed(seed, 2));
    p.observed = observe(p.sig.samples, p.omega);
    return p;
}

} // namespace

TEST_CASE("observed residual") {
    Rng rng(1);
    const CVec x = random_cvec(20, rng);
    SampleSet omega;
    omega.n = 20;
    omega.indices = {1, 4, 7, 9, 15};
    const CVec obs = observe(x, omega);
    CHECK(observed_residual(x, obs, omega) == 0.0);
    CHECK(observed_residual(CVec::Zero(20), obs, omega) == doctest::Approx(1.0));
    const CVec e = 1e-3 * random_cvec(20, rng);
    const double expected = observe(e, omega).norm() / obs.norm();
    CHECK(observed_residual(x + e, obs, omega) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(observed_residual(x, CVec::Zero(20), omega), UndefinedResidualError);
}

TEST_CASE("one-step initialization") {
    const HankelShape s = make_shape(60);
    const Hankel1d op(s);
    const SpectralSignal sig = separated_signal(60, 3, 4);
    const LowRankFactor L = init_one_step(op, sig.samples, full_set(60), 3);
    CHECK(rel_diff(L.dense(), hankel_dense(sig.samples, s)) < 1e-8);

    SampleSet none;
    none.n = 60;
    CHECK(init_one_step(op, sig.samples, none, 3).sigma.norm() == 0.0);
}

TEST_CASE("one-step initialization improves with more samples") {
    const HankelShape s = make_shape(127);
    const Hankel1d op(s);
    std::vector<double> medians;
    for (Index m : {32, 64, 96}) {
        std::vector<double> errs;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const Problem p = problem(127, 4, m, seed);
            const LowRankFactor L = init_one_step(op, p.observed, p.omega, 4);
            errs.push_back(lowrank_hankel_distance(op, L, p.sig.samples) /
                           hankel_dense(p.sig.samples, s).norm());
        }
        medians.push_back(median(errs));
    }
    CHECK(medians[0] > medians[1]);
    CHECK(medians[1] > medians[2]);
}

TEST_CASE("trimming caps row norms") {
    const HankelShape s = make_shape(50);
    Rng rng(2);
    LowRankFactor L;
    L.U = random_orthonormal(s.n1, 2, rng);
    L.V = random_orthonormal(s.n2, 2, rng);
    L.sigma = RVec::Ones(2);

    const LowRankFactor same = trim(L, 1e6, s);
    CHECK(same.U == L.U);
    CHECK(same.V == L.V);

    const double mu = 0.5;
    const double cap = std::sqrt(mu * s.c_s * 2 / 50.0);
    LowRankFactor spiked;
    spiked.U = CMat::Constant(s.n1, 2, cplx(0.1 * cap, 0.0));
    spiked.V = CMat::Constant(s.n2, 2, cplx(0.1 * cap, 0.0));
    spiked.U.row(3) = RVec::Constant(2, 2.0 * cap / std::sqrt(2.0)).cast<cplx>();
    spiked.sigma = RVec::Ones(2);
    const LowRankFactor t = trim(spiked, mu, s);
    CHECK(rel_diff(CMat(t.U.row(3)), CMat(0.5 * spiked.U.row(3))) < 1e-14);
    CHECK(t.V == spiked.V);
    CMat rest_t = t.U;
    CMat rest_s = spiked.U;
    rest_t.row(3).setZero();
    rest_s.row(3).setZero();
    CHECK(rest_t == rest_s);

    const LowRankFactor small = trim(L, 0.01, s);
    const double small_cap = std::sqrt(0.01 * s.c_s * 2 / 50.0);
    for (Index i = 0; i < s.n1; ++i) {
        CHECK(small.U.row(i).norm() <= small_cap + 1e-12);
    }
    for (Index i = 0; i < s.n2; ++i) {
        CHECK(small.V.row(i).norm() <= small_cap + 1e-12);
    }
}

TEST_CASE("sample partition keeps draw order and gives the remainder to the last set") {
    SampleSet omega;
    omega.n = 20;
    omega.indices = {5, 3, 9, 1, 0, 12, 7, 8, 19, 2, 4};
    const auto parts = partition_samples(omega, 3);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].indices == std::vector<Index>{5, 3, 9});
    CHECK(parts[1].indices == std::vector<Index>{1, 0, 12});
    CHECK(parts[2].indices == std::vector<Index>{7, 8, 19, 2, 4});
    CHECK_THROWS_AS(partition_samples(omega, 12), ArgumentError);
}

TEST_CASE("resampled initialization") {
    const HankelShape s = make_shape(127);
    const Hankel1d op(s);
    const Problem p = problem(127, 3, 96, 21);
    const LowRankFactor zero_rounds = init_resampled(op, p.observed, p.omega, 3, 0, 10.0);
    const LowRankFactor one_step = init_one_step(op, p.observed, p.omega, 3);
    CHECK(rel_diff(zero_rounds.dense(), one_step.dense()) < 1e-12);

    // Three full passes: every round sees the whole signal.
    SampleSet repeated;
    repeated.n = 127;
    repeated.mode = SamplingMode::with_replacement;
    for (int pass = 0; pass < 3; ++pass) {
        for (Index a = 0; a < 127; ++a) {
            repeated.indices.push_back(a);
        }
    }
    const double mu = 4.0 * incoherence_estimate(p.sig, s);
    std::vector<LowRankFactor> history;
    init_resampled(op, p.sig.samples, repeated, 3, 2, mu, {}, &history);
    REQUIRE(history.size() == 3);
    const double scale = hankel_dense(p.sig.samples, s).norm();
    CHECK(lowrank_hankel_distance(op, history.back(), p.sig.samples) <= 1e-8 * scale);
}

TEST_CASE("resampled initialization contracts in the median") {
    const HankelShape s = make_shape(127);
    const Hankel1d op(s);
    std::vector<std::vector<double>> errs(4);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Problem p = problem(127, 3, 96, seed);
        std::vector<LowRankFactor> history;
        init_resampled(op, p.observed, p.omega, 3, 3, incoherence_estimate(p.sig, s), {}, &history);
        for (std::size_t l = 0; l < 4; ++l) {
            errs[l].push_back(lowrank_hankel_distance(op, history[l], p.sig.samples));
        }
    }
    for (std::size_t l = 0; l + 1 < 4; ++l) {
        CHECK(median(errs[l + 1]) <= median(errs[l]));
    }
}

TEST_CASE("exact iterate is a fixed point of both solvers") {
    const HankelShape s = make_shape(80);
    const Hankel1d op(s);
    const Problem p = problem(80, 3, 40, 5);
    SolverConfig cfg;
    cfg.r = 3;
    cfg.max_iters = 1;
    const LowRankFactor L0 = exact_factor(p.sig.samples, s, 3);
    for (Algorithm algo : {Algorithm::iht, Algorithm::fiht}) {
        const SolveResult res = algo == Algorithm::iht ? iht_solve(op, p.observed, p.omega, cfg, L0)
                                                       : fiht_solve(op, p.observed, p.omega, cfg, L0);
        CHECK(rel_diff(res.x_rec, p.sig.samples) < 1e-10);
    }
}

TEST_CASE("one IHT and one FIHT step agree when the update lies in the tangent space") {
    const HankelShape s = make_shape(64);
    const Hankel1d op(s);
    const SpectralSignal sig = separated_signal(64, 4, 9);
    SolverConfig cfg;
    cfg.r = 4;
    cfg.max_iters = 1;
    const LowRankFactor L0 = exact_factor(sig.samples, s, 4);
    const SolveResult a = iht_solve(op, sig.samples, full_set(64), cfg, L0);
    const SolveResult b = fiht_solve(op, sig.samples, full_set(64), cfg, L0);
    CHECK(rel_diff(a.x_rec, b.x_rec) < 1e-8);
}

TEST_CASE("full sampling converges immediately") {
    const HankelShape s = make_shape(127);
    const SpectralSignal sig = separated_signal(127, 4, 2);
    SolverConfig cfg;
    cfg.r = 4;
    cfg.tol_residual = 1e-8;
    for (Algorithm algo : {Algorithm::iht, Algorithm::fiht}) {
        const SolveResult res = solve(algo, Hankel1d(s), sig.samples, full_set(127), cfg);
        CHECK(res.iterations <= 2);
        CHECK(rel_diff(res.x_rec, sig.samples) < 1e-8);
        CHECK(res.converged);
    }
}

TEST_CASE("desk-scale success rate of both solvers") {
    const Hankel1d op(make_shape(127));
    for (Algorithm algo : {Algorithm::iht, Algorithm::fiht}) {
        int successes = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const Problem p = problem(127, 4, 64, seed);
            SolverConfig cfg;
            cfg.r = 4;
            const SolveResult res = solve(algo, op, p.observed, p.omega, cfg);
            CHECK(res.factor.nonzero_rank() <= 4);
            successes += rel_diff(res.x_rec, p.sig.samples) <= 1e-3 ? 1 : 0;
        }
        CHECK(successes >= 48);
    }
}

TEST_CASE("errors decay geometrically at high sampling") {
    const Hankel1d op(make_shape(127));
    std::vector<double> ratios;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Problem p = problem(127, 4, 96, seed);
        SolverConfig cfg;
        cfg.r = 4;
        cfg.max_iters = 11;
        cfg.tol_residual = 1e-300;
        cfg.tol_step = 0.0;
        cfg.truth = p.sig.samples;
        const SolveResult res = fiht_solve(op, p.observed, p.omega, cfg);
        for (std::size_t l = 3; l + 1 < res.trace.size() && l < 10; ++l) {
            const double now = *res.trace[l].true_err;
            if (now > 1e-12) {
                ratios.push_back(*res.trace[l + 1].true_err / now);
            }
        }
    }
    REQUIRE(!ratios.empty());
    CHECK(median(ratios) < 0.9);
}

TEST_CASE("solves are deterministic") {
    const Hankel1d op(make_shape(127));
    const Problem p = problem(127, 4, 64, 33);
    SolverConfig cfg;
    cfg.r = 4;
    const SolveResult a = fiht_solve(op, p.observed, p.omega, cfg);
    const SolveResult b = fiht_solve(op, p.observed, p.omega, cfg);
    CHECK(a.x_rec == b.x_rec);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace[k].residual == b.trace[k].residual);
        CHECK(a.trace[k].step == b.trace[k].step);
    }
}

TEST_CASE("samples drawn with replacement are accepted") {
    const Hankel1d op(make_shape(127));
    const SpectralSignal sig = separated_signal(127, 3, 8);
    const SampleSet omega = sample_indices(127, 90, SamplingMode::with_replacement, 4);
    SolverConfig cfg;
    cfg.r = 3;
    const SolveResult res = fiht_solve(op, observe(sig.samples, omega), omega, cfg);
    CHECK(res.x_rec.allFinite());
}

TEST_CASE("config validation") {
    SolverConfig cfg;
    cfg.r = 0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.r = 2;
    cfg.tol_residual = 0.0;
    cfg.tol_step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.tol_step = 1e-5;
    cfg.init = InitKind::resampled;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.mu = 2.0;
    CHECK_NOTHROW(cfg.validate());
    CHECK(init_kind_from_string("onestep") == InitKind::one_step);
    CHECK(algorithm_from_string("iht") == Algorithm::iht);
    CHECK_THROWS_AS(algorithm_from_string("admm"), ArgumentError);
}
