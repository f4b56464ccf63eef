#pragma once

#include <algorithm>
#include <cmath>

#include "hankelrec/common.hpp"
#include "hankelrec/hankel_core.hpp"
#include "hankelrec/low_rank_factor.hpp"
#include "hankelrec/spectral_signal.hpp"

namespace testing {

using namespace hankelrec;

inline CVec random_cvec(Index len, Rng& rng) {
    CVec v(len);
    for (auto& x : v) {
        x = rng.complex_normal();
    }
    return v;
}

inline CMat random_cmat(Index rows, Index cols, Rng& rng) {
    CMat A(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        A.col(j) = random_cvec(rows, rng);
    }
    return A;
}

inline CMat random_orthonormal(Index rows, Index cols, Rng& rng) {
    Eigen::HouseholderQR<CMat> qr(random_cmat(rows, cols, rng));
    return qr.householderQ() * CMat::Identity(rows, cols);
}

template <typename A, typename B>
double rel_diff(const A& a, const B& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

inline double orthonormality_error(const CMat& Q) {
    return (Q.adjoint() * Q - CMat::Identity(Q.cols(), Q.cols())).norm();
}

/// Undamped signal with r separated modes (separation 1.5 cells).
inline SpectralSignal separated_signal(Index n, Index r, std::uint64_t seed) {
    SignalGenConfig cfg;
    cfg.n = n;
    cfg.r = r;
    cfg.min_separation = 1.5 / static_cast<double>(n);
    cfg.seed = seed;
    return generate_signal(cfg);
}

inline CVec observe(const CVec& x, const SampleSet& omega) {
    CVec out = CVec::Zero(x.size());
    for (Index a : omega.indices) {
        out[a] = x[a];
    }
    return out;
}

inline SampleSet full_set(Index n) {
    SampleSet s;
    s.n = n;
    for (Index a = 0; a < n; ++a) {
        s.indices.push_back(a);
    }
    return s;
}

/// Same deterministic test vector as tests/oracles/make_oracles.py.
inline CVec test_vector(Index n, double a, double b, double c) {
    CVec v(n);
    for (Index k = 0; k < n; ++k) {
        v[k] = cplx(a * static_cast<double>(k) + 1.0, std::sin(b * static_cast<double>(k) + c));
    }
    return v;
}

} // namespace testing
