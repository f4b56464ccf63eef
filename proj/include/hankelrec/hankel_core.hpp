#pragma once

// Matrix-free Hankel operator algebra.
//
// A length-n vector z is lifted to the n1 x n2 matrix [H z]_{ij} = z_{i+j}
// with n1 + n2 = n + 1.  Products with H z, its adjoint and the adjoint of a
// low-rank matrix are computed by FFT convolution of length next_pow2(n);
// the dense routines are reference implementations behind a size guard.

#include <memory>
#include <optional>
#include <vector>

#include "hankelrec/common.hpp"
#include "hankelrec/fft.hpp"
#include "hankelrec/low_rank_factor.hpp"
#include "hankelrec/sample_set.hpp"

namespace hankelrec {

struct HankelShape {
    Index n = 0;
    Index n1 = 0;
    Index n2 = 0;
    /// weights[a] = number of cells on anti-diagonal a.
    std::vector<Index> weights;
    /// max(n / n1, n / n2)
    double c_s = 0.0;
};

/// Default pencil is nearly square: n1 = ceil((n + 1) / 2).
HankelShape make_shape(Index n, std::optional<Index> n1 = std::nullopt);

/// Zero-padded transforms of the columns of a factor pair:
/// u_hat[k] = F(U(:, k)) and v_hat[k] = F(conj(V(:, k))).  One set serves
/// both H^*(U S V^*) and products of a bound H z with U and V, which lets an
/// iteration reuse the transforms of its factor.
struct FactorSpectra {
    std::vector<fft::Buffer> u_hat;
    std::vector<fft::Buffer> v_hat;
};

/// The matrix H z for a fixed z, with the transform of z computed once.
class BoundHankel {
public:
    virtual ~BoundHankel() = default;
    virtual Index rows() const = 0;
    virtual Index cols() const = 0;
    /// (H z) * V, column by column.
    virtual CMat apply(const CMat& V) const = 0;
    /// (H z)^* * U, column by column.
    virtual CMat apply_adjoint(const CMat& U) const = 0;
    /// (H z) * V from the v_hat of a FactorSpectra.
    virtual CMat apply(const FactorSpectra& f) const = 0;
    /// (H z)^* * U from the u_hat of a FactorSpectra.
    virtual CMat apply_adjoint(const FactorSpectra& f) const = 0;
};

/// Structured operator interface consumed by the solvers.  Implemented by
/// the 1-D Hankel operator here and by the multi-level operator in
/// nd_hankel.hpp.  All methods are const and thread-safe.
class HankelOperator {
public:
    virtual ~HankelOperator() = default;

    virtual Index signal_size() const = 0;
    virtual Index rows() const = 0;
    virtual Index cols() const = 0;
    /// Diagonal of H^* H, length signal_size().
    virtual const RVec& weights() const = 0;
    virtual double c_s() const = 0;

    virtual std::unique_ptr<BoundHankel> bind(const CVec& z) const = 0;
    virtual FactorSpectra spectra(const CMat& U, const CMat& V) const = 0;
    /// H^*(U diag(s) V^*) with U, V given by their spectra.
    virtual CVec adjoint_lowrank(const FactorSpectra& f, const RVec& s) const = 0;
    /// H^*(U diag(s) V^*).
    CVec adjoint_lowrank(const CMat& U, const RVec& s, const CMat& V) const;

    /// Dense reference lift; throws OracleScaleError above the size guard.
    virtual CMat dense(const CVec& z) const = 0;
    /// Dense reference adjoint (sums over the structured index sets).
    virtual CVec adjoint_dense(const CMat& Z) const = 0;

    /// H^dagger L = D^{-2} H^* L.
    CVec pseudo_inverse(const LowRankFactor& L) const;
    /// Same, with `f` the spectra of L.U and L.V.
    CVec pseudo_inverse(const LowRankFactor& L, const FactorSpectra& f) const;

    CMat apply(const CVec& z, const CMat& V) const { return bind(z)->apply(V); }
    CMat apply_adjoint(const CVec& z, const CMat& U) const { return bind(z)->apply_adjoint(U); }
};

class Hankel1d final : public HankelOperator {
public:
    explicit Hankel1d(HankelShape shape);

    const HankelShape& shape() const { return shape_; }

    Index signal_size() const override { return shape_.n; }
    Index rows() const override { return shape_.n1; }
    Index cols() const override { return shape_.n2; }
    const RVec& weights() const override { return weights_; }
    double c_s() const override { return shape_.c_s; }

    std::unique_ptr<BoundHankel> bind(const CVec& z) const override;
    FactorSpectra spectra(const CMat& U, const CMat& V) const override;
    using HankelOperator::adjoint_lowrank;
    CVec adjoint_lowrank(const FactorSpectra& f, const RVec& s) const override;
    CMat dense(const CVec& z) const override;
    CVec adjoint_dense(const CMat& Z) const override;

private:
    HankelShape shape_;
    RVec weights_;
    std::size_t fft_len_;
};

CMat hankel_dense(const CVec& z, const HankelShape& shape);
CVec hankel_adjoint_dense(const CMat& Z, const HankelShape& shape);

/// (H z) v
CVec hankel_matvec(const CVec& z, const CVec& v, const HankelShape& shape);
/// (H z)^* u
CVec hankel_matvec_adjoint(const CVec& z, const CVec& u, const HankelShape& shape);
/// H^*(u v^*): entry a is sum_{i+j=a} u_i conj(v_j).
CVec adjoint_rank_one(const CVec& u, const CVec& v, const HankelShape& shape);
CVec apply_pseudo_inverse(const LowRankFactor& L, const HankelShape& shape);

/// P_Omega z.  Repeated indices scale the entry by their multiplicity.
CVec project_samples(const CVec& z, const SampleSet& omega);

} // namespace hankelrec
