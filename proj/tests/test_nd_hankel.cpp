#include <doctest.h>

#include "hankelrec/nd_hankel.hpp"
#include "hankelrec/structured_lowrank.hpp"
#include "support.hpp"

using namespace hankelrec;
using namespace testing;

namespace {

// Entry (i, j) straight from the multi-index definition, first index fastest.
CMat lift_by_definition(const CVec& X, const NdHankelShape& s) {
    const std::size_t d = s.ndim();
    std::vector<Index> cdims(d), strides(d);
    for (std::size_t q = 0; q < d; ++q) {
        cdims[q] = s.dims[q] - s.pencils[q] + 1;
    }
    Index stride = 1;
    for (std::size_t q = d; q-- > 0;) {
        strides[q] = stride;
        stride *= s.dims[q];
    }
    CMat H(s.rows, s.cols);
    for (Index i = 0; i < s.rows; ++i) {
        for (Index j = 0; j < s.cols; ++j) {
            Index ii = i, jj = j, flat = 0;
            for (std::size_t q = 0; q < d; ++q) {
                flat += (ii % s.pencils[q] + jj % cdims[q]) * strides[q];
                ii /= s.pencils[q];
                jj /= cdims[q];
            }
            H(i, j) = X[flat];
        }
    }
    return H;
}

} // namespace

TEST_CASE("multi-level shapes") {
    const NdHankelShape s33 = make_nd_shape({3, 3}, std::vector<Index>{2, 2});
    const std::vector<double> w{1, 2, 1, 2, 4, 2, 1, 2, 1};
    for (Index k = 0; k < 9; ++k) {
        CHECK(s33.weights[k] == w[static_cast<std::size_t>(k)]);
    }

    const NdHankelShape s5 = make_nd_shape({5});
    CHECK(s5.rows == 3);
    CHECK(s5.cols == 3);
    CHECK(s5.weights == RVec((RVec(5) << 1, 2, 3, 2, 1).finished()));

    const NdHankelShape big = make_nd_shape({31, 31, 511});
    CHECK(big.rows == 16 * 16 * 256);
    CHECK(big.cols == 16 * 16 * 256);
    CHECK(big.weights.sum() == doctest::Approx(static_cast<double>(big.rows) * static_cast<double>(big.cols)));
}

TEST_CASE("dense multi-level lift follows the index map") {
    Rng rng(3);
    for (const auto& dims : std::vector<std::vector<Index>>{{4, 4}, {6, 5}, {3, 4, 5}, {7}}) {
        const NdHankelShape s = make_nd_shape(dims);
        const CVec X = random_cvec(s.size(), rng);
        CHECK(nd_hankel_dense(X, s) == lift_by_definition(X, s));
    }
}

TEST_CASE("fast multi-level products match the dense lift") {
    Rng rng(7);
    for (const auto& dims : std::vector<std::vector<Index>>{{4, 4}, {6, 5}, {3, 4, 5}, {9, 2}}) {
        const NdHankelShape s = make_nd_shape(dims);
        const HankelNd op(s);
        for (int trial = 0; trial < 5; ++trial) {
            const CVec X = random_cvec(s.size(), rng);
            const CVec u = random_cvec(s.rows, rng);
            const CVec v = random_cvec(s.cols, rng);
            const CMat H = nd_hankel_dense(X, s);
            CHECK(rel_diff(nd_hankel_matvec(X, v, s), CVec(H * v)) < 1e-10);
            CHECK(rel_diff(nd_hankel_matvec_adjoint(X, u, s), CVec(H.adjoint() * u)) < 1e-10);
            CHECK(rel_diff(nd_adjoint_rank_one(u, v, s), op.adjoint_dense(u * v.adjoint())) < 1e-12);
            CHECK(rel_diff(op.adjoint_dense(H), CVec(s.weights.cast<cplx>().cwiseProduct(X))) < 1e-12);
        }
    }
}

TEST_CASE("first column of the lift") {
    Rng rng(5);
    const NdHankelShape s = make_nd_shape({5, 4});
    const CVec X = random_cvec(s.size(), rng);
    const CVec col = nd_hankel_matvec(X, CVec::Unit(s.cols, 0), s);
    for (Index i2 = 0; i2 < s.pencils[1]; ++i2) {
        for (Index i1 = 0; i1 < s.pencils[0]; ++i1) {
            CHECK(std::abs(col[i1 + i2 * s.pencils[0]] - X[i1 * 4 + i2]) < 1e-13);
        }
    }
}

TEST_CASE("all-ones rank-one adjoint gives the weights") {
    const NdHankelShape s = make_nd_shape({3, 3}, std::vector<Index>{2, 2});
    CHECK(rel_diff(nd_adjoint_rank_one(CVec::Ones(4), CVec::Ones(4), s), CVec(s.weights.cast<cplx>())) < 1e-14);
}

TEST_CASE("one-dimensional case reduces to the 1-D operator") {
    Rng rng(9);
    for (Index n : {7, 16, 33}) {
        const NdHankelShape nd = make_nd_shape({n});
        const HankelShape s = make_shape(n);
        const CVec z = random_cvec(n, rng);
        const CVec u = random_cvec(s.n1, rng);
        const CVec v = random_cvec(s.n2, rng);
        CHECK(rel_diff(nd_hankel_matvec(z, v, nd), hankel_matvec(z, v, s)) < 1e-12);
        CHECK(rel_diff(nd_hankel_matvec_adjoint(z, u, nd), hankel_matvec_adjoint(z, u, s)) < 1e-12);
        CHECK(rel_diff(nd_adjoint_rank_one(u, v, nd), adjoint_rank_one(u, v, s)) < 1e-12);
    }
}

TEST_CASE("separable rank-one signal lifts to a rank-one operator") {
    NdMode mode;
    mode.f = {0.2, 0.7};
    mode.tau = {0.0, 0.1};
    const NdSignal sig = make_nd_signal({6, 5}, {mode});
    const NdHankelShape s = make_nd_shape(sig.dims);
    const CMat H = nd_hankel_dense(sig.entries, s);
    const RVec sv = Eigen::JacobiSVD<CMat>(H).singularValues();
    CHECK(sv[1] <= 1e-12 * sv[0]);
    Rng rng(1);
    const CVec v = random_cvec(s.cols, rng);
    const CVec left = H.col(0);
    const CVec right = H.row(0).transpose();
    // Rank one with H(0, 0) = 1: H = left * right^T.
    CHECK(rel_diff(nd_hankel_matvec(sig.entries, v, s), CVec(left * (right.transpose() * v))) < 1e-12);
}

TEST_CASE("multi-level Vandermonde rank and pseudo-inverse") {
    NdSignalGenConfig cfg;
    cfg.dims = {7, 6, 5};
    cfg.r = 3;
    cfg.seed = 4;
    const NdSignal sig = generate_nd_signal(cfg);
    const NdHankelShape s = make_nd_shape(cfg.dims);
    const HankelNd op(s);
    const CMat H = nd_hankel_dense(sig.entries, s);
    const RVec sv = Eigen::JacobiSVD<CMat>(H).singularValues();
    CHECK(sv[3] <= 1e-10 * sv[0]);
    const LowRankFactor L = dense_hard_threshold(H, 3);
    CHECK(rel_diff(op.pseudo_inverse(L), sig.entries) < 1e-10);
}

TEST_CASE("generated multi-dimensional signals respect separation") {
    NdSignalGenConfig cfg;
    cfg.dims = {15, 15, 63};
    cfg.r = 5;
    cfg.min_separation_cells = 1.0;
    cfg.seed = 12;
    const NdSignal sig = generate_nd_signal(cfg);
    for (std::size_t a = 0; a < sig.modes.size(); ++a) {
        for (std::size_t b = a + 1; b < sig.modes.size(); ++b) {
            for (std::size_t q = 0; q < 3; ++q) {
                CHECK(wrap_distance(sig.modes[a].f[q], sig.modes[b].f[q]) >= 1.0 / cfg.dims[q]);
            }
        }
    }
}

TEST_CASE("multi-dimensional FIHT") {
    NdMode mode;
    mode.f = {0.1, 0.4, 0.8};
    mode.tau = {0.0, 0.0, 0.0};
    const NdSignal one = make_nd_signal({6, 7, 8}, {mode});
    const NdHankelShape s = make_nd_shape(one.dims);
    SolverConfig cfg;
    cfg.r = 1;
    cfg.tol_residual = 1e-8;
    const SolveResult full = nd_fiht_solve(one.entries, full_set(s.size()), s, cfg);
    CHECK(full.iterations <= 2);
    CHECK(rel_diff(full.x_rec, one.entries) < 1e-8);

    NdSignalGenConfig gen;
    gen.dims = {15, 15, 63};
    gen.r = 5;
    gen.seed = 3;
    const NdSignal sig = generate_nd_signal(gen);
    const NdHankelShape s3 = make_nd_shape(gen.dims);
    const SampleSet omega = sample_indices(s3.size(), 1134, SamplingMode::without_replacement, 8);
    cfg.r = 5;
    cfg.tol_residual = 1e-7;
    const SolveResult res = nd_fiht_solve(observe(sig.entries, omega), omega, s3, cfg);
    CHECK(rel_diff(res.x_rec, sig.entries) <= 1e-4);
}

TEST_CASE("memory budget is enforced") {
    const NdHankelShape s = make_nd_shape({15, 15, 63});
    CHECK(nd_fiht_memory_estimate(s, 5) > 0);
    SolverConfig cfg;
    cfg.r = 5;
    CHECK_THROWS_AS(nd_fiht_solve(CVec::Zero(s.size()), full_set(s.size()), s, cfg, 1024), ResourceError);
}
