#include <doctest.h>

#include "hankelrec/structured_lowrank.hpp"
#include "support.hpp"

using namespace hankelrec;
using namespace testing;

namespace {

CMat tangent_dense(const TangentCoeffs& tc, const CMat& U, const CMat& V) {
    return U * tc.C * V.adjoint() + U * tc.X.adjoint() + tc.Y * V.adjoint();
}

// Random orthonormal bases for a shape.
struct Basis {
    CMat U;
    CMat V;
};

Basis random_basis(const HankelShape& s, Index r, Rng& rng) {
    return {random_orthonormal(s.n1, r, rng), random_orthonormal(s.n2, r, rng)};
}

} // namespace

TEST_CASE("tangent coefficients of a matrix already in the tangent space") {
    const HankelShape s = make_shape(40);
    const Hankel1d op(s);
    const SpectralSignal sig = separated_signal(40, 3, 17);
    Eigen::JacobiSVD<CMat> svd(hankel_dense(sig.samples, s), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CMat U = svd.matrixU().leftCols(3);
    const CMat V = svd.matrixV().leftCols(3);
    const TangentCoeffs tc = tangent_coeffs(op, sig.samples, U, V);
    const CMat sigma = svd.singularValues().head(3).cast<cplx>().asDiagonal();
    CHECK((tc.C - sigma).norm() <= 1e-10 * sigma.norm());
    CHECK(tc.X.norm() <= 1e-10 * sigma.norm());
    CHECK(tc.Y.norm() <= 1e-10 * sigma.norm());

    const TangentCoeffs zero = tangent_coeffs(op, CVec::Zero(40), U, V);
    CHECK(zero.C.norm() == 0.0);
    CHECK(zero.X.norm() == 0.0);
    CHECK(zero.Y.norm() == 0.0);
}

TEST_CASE("tangent coefficients reproduce the dense projection") {
    Rng rng(64);
    for (Index n : {64, 65, 100}) {
        const HankelShape s = make_shape(n);
        const Hankel1d op(s);
        const Basis b = random_basis(s, 3, rng);
        const CVec h = random_cvec(n, rng);
        const CMat Z = hankel_dense(h, s);
        const CMat P = dense_tangent_projection(Z, b.U, b.V);
        CHECK(rel_diff(tangent_dense(tangent_coeffs(op, h, b.U, b.V), b.U, b.V), P) < 1e-10);
        CHECK(P.norm() <= Z.norm() * (1 + 1e-12));
        CHECK(rel_diff(dense_tangent_projection(P, b.U, b.V), P) < 1e-12);
    }
}

TEST_CASE("retraction of a diagonal core keeps the basis") {
    Rng rng(1);
    const HankelShape s = make_shape(30);
    const Basis b = random_basis(s, 3, rng);
    TangentCoeffs tc;
    tc.C = CMat::Zero(3, 3);
    tc.C.diagonal() << 5.0, 3.0, 1.0;
    tc.X = CMat::Zero(s.n2, 3);
    tc.Y = CMat::Zero(s.n1, 3);
    const LowRankFactor L = retract_rank_r(tc, b.U, b.V, 2);
    CHECK(L.rank() == 2);
    CHECK(L.sigma[0] == doctest::Approx(5.0));
    CHECK(L.sigma[1] == doctest::Approx(3.0));
    CHECK(rel_diff(L.dense(), CMat(b.U.leftCols(2) * tc.C.topLeftCorner(2, 2) * b.V.leftCols(2).adjoint())) < 1e-12);
}

TEST_CASE("retraction matches dense truncation and stays orthonormal") {
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = 20 + static_cast<Index>(rng.uniform() * 100);
        const Index r = 1 + static_cast<Index>(rng.uniform() * 6);
        const HankelShape s = make_shape(n);
        const Hankel1d op(s);
        const Basis b = random_basis(s, r, rng);
        const CVec h = random_cvec(n, rng);
        const LowRankFactor L = retract_rank_r(tangent_coeffs(op, h, b.U, b.V), b.U, b.V, r);
        CHECK(orthonormality_error(L.U) < 1e-10);
        CHECK(orthonormality_error(L.V) < 1e-10);

        const CMat W = dense_tangent_projection(hankel_dense(h, s), b.U, b.V);
        const RVec sv = Eigen::JacobiSVD<CMat>(W).singularValues();
        CHECK(rel_diff(L.sigma, RVec(sv.head(r))) < 1e-8);
        // Eckart-Young: the truncation error is the singular value tail.
        const double tail = std::sqrt(sv.tail(sv.size() - r).squaredNorm());
        CHECK((W - L.dense()).norm() == doctest::Approx(tail).epsilon(1e-8).scale(sv[0]));
    }
}

TEST_CASE("retraction of an exactly rank-r update is lossless") {
    Rng rng(8);
    const HankelShape s = make_shape(50);
    const Basis b = random_basis(s, 2, rng);
    TangentCoeffs tc;
    tc.C = random_cmat(2, 2, rng);
    tc.X = CMat::Zero(s.n2, 2);
    tc.Y = CMat::Zero(s.n1, 2);
    // Y V^* with Y orthogonal to U adds rank but only inside the tangent space.
    const CMat Y = random_cmat(s.n1, 1, rng);
    tc.Y.col(0) = Y - b.U * (b.U.adjoint() * Y);
    const CMat W = tangent_dense(tc, b.U, b.V);
    const LowRankFactor L = retract_rank_r(tc, b.U, b.V, 3);
    CHECK((L.dense() - W).norm() <= 1e-10 * W.norm());
}

TEST_CASE("degenerate complements keep the factors orthonormal") {
    const HankelShape s = make_shape(31);
    Rng rng(4);
    const Basis b = random_basis(s, 4, rng);
    TangentCoeffs tc;
    tc.C = random_cmat(4, 4, rng);
    tc.X = CMat::Zero(s.n2, 4);
    tc.Y = CMat::Zero(s.n1, 4);
    tc.Y.col(1) = random_cvec(s.n1, rng);
    tc.Y.col(1) -= b.U * (b.U.adjoint() * tc.Y.col(1));
    tc.Y.col(2) = 2.0 * tc.Y.col(1);
    const LowRankFactor L = retract_rank_r(tc, b.U, b.V, 4);
    CHECK(orthonormality_error(L.U) < 1e-10);
    CHECK(orthonormality_error(L.V) < 1e-10);

    const ComplementQR qr = complement_qr(tc.Y, b.U);
    CHECK(orthonormality_error(qr.Q) < 1e-10);
    CHECK((b.U.adjoint() * qr.Q).norm() < 1e-10);
    CHECK(rel_diff(CMat(qr.Q * qr.R), tc.Y) < 1e-10);
}

TEST_CASE("dense hard threshold") {
    CMat D = CMat::Zero(3, 3);
    D.diagonal() << 3, 2, 1;
    const LowRankFactor L = dense_hard_threshold(D, 2);
    CMat expected = CMat::Zero(3, 3);
    expected.diagonal() << 3, 2, 0;
    CHECK((L.dense() - expected).norm() < 1e-14);

    Rng rng(6);
    const CMat rank1 = random_cvec(5, rng) * random_cvec(4, rng).adjoint();
    const LowRankFactor padded = dense_hard_threshold(rank1, 3);
    CHECK(padded.rank() == 3);
    CHECK(padded.nonzero_rank() >= 1);
    CHECK(padded.sigma[2] <= 1e-14 * padded.sigma[0]);
    CHECK(rel_diff(padded.dense(), rank1) < 1e-12);

    const CMat Z = random_cmat(20, 15, rng);
    const RVec sv = Eigen::JacobiSVD<CMat>(Z).singularValues();
    const double tail2 = sv.tail(11).squaredNorm();
    CHECK((Z - dense_hard_threshold(Z, 4).dense()).squaredNorm() == doctest::Approx(tail2).epsilon(1e-10));
}

TEST_CASE("partial SVD of Hankel matrices") {
    const HankelShape s = make_shape(101);
    const Hankel1d op(s);
    const SpectralSignal sig = separated_signal(101, 4, 3);
    const CMat H = hankel_dense(sig.samples, s);
    const RVec dense_sv = Eigen::JacobiSVD<CMat>(H).singularValues();
    PartialSvdInfo info;
    const LowRankFactor L = partial_svd_hankel(op, sig.samples, 4, {}, &info);
    CHECK(L.sigma[3] > 0.0);
    CHECK(rel_diff(L.sigma, RVec(dense_sv.head(4))) < 1e-8);
    CHECK((L.dense() - H).norm() <= 1e-8 * H.norm());
    CHECK(orthonormality_error(L.U) < 1e-10);

    const LowRankFactor Z = partial_svd_hankel(op, CVec::Zero(101), 3);
    CHECK(Z.sigma.norm() == 0.0);
    CHECK(orthonormality_error(Z.U) < 1e-10);
    CHECK(orthonormality_error(Z.V) < 1e-10);

    const HankelShape s64 = make_shape(64);
    const SpectralSignal one = make_signal(64, {{0.4, 0.0, {1.5, -0.5}}});
    const LowRankFactor L1 = partial_svd_hankel(Hankel1d(s64), one.samples, 1);
    const double top = Eigen::JacobiSVD<CMat>(hankel_dense(one.samples, s64)).singularValues()[0];
    CHECK(L1.sigma[0] == doctest::Approx(top).epsilon(1e-8));
}

TEST_CASE("orthonormalize converts a general factorization") {
    Rng rng(12);
    LowRankFactor L;
    L.U = random_cmat(12, 3, rng);
    L.V = random_cmat(9, 3, rng);
    L.sigma = RVec::Ones(3);
    const LowRankFactor O = orthonormalize(L);
    CHECK(orthonormality_error(O.U) < 1e-12);
    CHECK(orthonormality_error(O.V) < 1e-12);
    CHECK(rel_diff(O.dense(), L.dense()) < 1e-12);
}
