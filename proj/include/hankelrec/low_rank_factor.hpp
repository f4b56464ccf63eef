#pragma once

#include "hankelrec/common.hpp"

namespace hankelrec {

/// Rank-r matrix U * diag(sigma) * V^*.
///
/// Factors produced by an SVD (partial_svd_hankel, retract_rank_r,
/// dense_hard_threshold) have orthonormal columns and nonincreasing sigma,
/// possibly with trailing zeros.  trim() returns general (non-orthonormal)
/// factors of the same shape.
struct LowRankFactor {
    CMat U;
    RVec sigma;
    CMat V;

    Index rank() const { return sigma.size(); }
    Index rows() const { return U.rows(); }
    Index cols() const { return V.rows(); }

    /// Number of sigma entries above zero.
    Index nonzero_rank() const { return (sigma.array() > 0.0).count(); }

    CMat dense() const { return U * sigma.asDiagonal() * V.adjoint(); }

    static LowRankFactor zero(Index rows, Index cols, Index r) {
        LowRankFactor f;
        f.U = CMat::Identity(rows, r);
        f.V = CMat::Identity(cols, r);
        f.sigma = RVec::Zero(r);
        return f;
    }
};

} // namespace hankelrec
