#pragma once

// Rank-r linear algebra on the tangent space of the fixed-rank manifold.
//
// With L = U S V^* and H = H(h) never formed, the projection of H onto the
// tangent space at L is stored as
//     W = U C V^* + U X^* + Y V^*,
//     C = U^* H V,  X = (I - V V^*) H^* U,  Y = (I - U U^*) H V,
// and its rank-r truncation only needs QR factorizations of X and Y plus an
// SVD of the small block matrix [[C, R1^*], [R2, 0]].

#include <cstdint>
#include <optional>

#include "hankelrec/common.hpp"
#include "hankelrec/hankel_core.hpp"
#include "hankelrec/low_rank_factor.hpp"

namespace hankelrec {

struct TangentCoeffs {
    CMat C; // r x r
    CMat X; // n2 x r
    CMat Y; // n1 x r
};

/// `spectra`, when given, must be op.spectra(U, V).
TangentCoeffs tangent_coeffs(const HankelOperator& op, const CVec& h, const CMat& U, const CMat& V,
                             const FactorSpectra* spectra = nullptr);

/// Best rank-r approximation of U C V^* + U X^* + Y V^*.
LowRankFactor retract_rank_r(const TangentCoeffs& tc, const CMat& U, const CMat& V, Index r);

/// Relative threshold below which an R diagonal entry is treated as zero.
inline constexpr double qr_rank_tol = 1e-14;

/// QR of X restricted to the orthogonal complement of `basis`: Q has
/// orthonormal columns orthogonal to `basis`, X ~= basis * (...) + Q R.
/// Numerically dependent columns get a fresh complement direction and a zero
/// R row, so Q stays orthonormal for degenerate inputs.
struct ComplementQR {
    CMat Q;
    CMat R;
};
ComplementQR complement_qr(const CMat& X, const CMat& basis);

/// Eckart-Young truncation through a full dense SVD (oracle scale).
LowRankFactor dense_hard_threshold(const CMat& Z, Index r);

/// U U^* Z + Z V V^* - U U^* Z V V^*, dense reference.
CMat dense_tangent_projection(const CMat& Z, const CMat& U, const CMat& V);

/// Converts a general factorization A diag(s) B^* into SVD form.
LowRankFactor orthonormalize(const LowRankFactor& L);

struct PartialSvdOptions {
    /// Stop once every leading Ritz residual is below tol * sigma_1.
    double tol = 1e-10;
    /// Maximum Krylov dimension; 0 selects min(n1, n2, 10 r + 200).
    Index max_iters = 0;
    std::uint64_t seed = 0x5eedULL;
};

struct PartialSvdInfo {
    Index steps = 0;
    double max_residual = 0.0;
    /// Ritz estimate of sigma_{r+1}, when the Krylov space is large enough.
    std::optional<double> next_sigma;
};

/// Partial SVD did not converge; carries the best iterate.
class PartialSvdError : public Error {
public:
    PartialSvdError(const std::string& what, LowRankFactor best)
        : Error(what), best_(std::move(best)) {}
    const LowRankFactor& best() const { return best_; }

private:
    LowRankFactor best_;
};

/// Dominant r singular triplets of a bound Hankel matrix by Golub-Kahan
/// Lanczos bidiagonalization with full reorthogonalization.
LowRankFactor partial_svd(const BoundHankel& A, Index r, const PartialSvdOptions& opts = {},
                          PartialSvdInfo* info = nullptr);

LowRankFactor partial_svd_hankel(const HankelOperator& op, const CVec& z, Index r,
                                 const PartialSvdOptions& opts = {}, PartialSvdInfo* info = nullptr);

/// ||L - H x||_F through the dense lift (oracle scale).
double lowrank_hankel_distance(const HankelOperator& op, const LowRankFactor& L, const CVec& x);

} // namespace hankelrec
