#pragma once

// Multi-level (block) Hankel structure for d-dimensional arrays.
//
// Arrays are flattened row-major (last index fastest).  The lift of an array
// X with dims N and pencils n has Π n_k rows and Π (N_k - n_k + 1) columns,
// entry (i, j) = X(i + j) as multi-indices, with the row index decoded as
// i = i_1 + i_2 n_1 + i_3 n_1 n_2 + ... (first index fastest) and the column
// index likewise.  All products run as one d-dimensional FFT correlation on
// the array zero-padded to next_pow2(N_k) per dimension.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hankelrec/common.hpp"
#include "hankelrec/hankel_core.hpp"
#include "hankelrec/sample_set.hpp"
#include "hankelrec/solvers.hpp"
#include "hankelrec/spectral_signal.hpp"

namespace hankelrec {

struct NdHankelShape {
    std::vector<Index> dims;
    std::vector<Index> pencils;
    Index rows = 0;
    Index cols = 0;
    /// Anti-diagonal counts over the row-major flattened array.
    RVec weights;
    /// max(size / rows, size / cols)
    double c_s = 0.0;

    Index size() const { return static_cast<Index>(weights.size()); }
    std::size_t ndim() const { return dims.size(); }
};

/// Default pencils n_k = ceil((N_k + 1) / 2).
NdHankelShape make_nd_shape(const std::vector<Index>& dims, const std::optional<std::vector<Index>>& pencils = {});

class HankelNd final : public HankelOperator {
public:
    explicit HankelNd(NdHankelShape shape);

    const NdHankelShape& shape() const { return shape_; }

    Index signal_size() const override { return shape_.size(); }
    Index rows() const override { return shape_.rows; }
    Index cols() const override { return shape_.cols; }
    const RVec& weights() const override { return shape_.weights; }
    double c_s() const override { return shape_.c_s; }

    std::unique_ptr<BoundHankel> bind(const CVec& z) const override;
    FactorSpectra spectra(const CMat& U, const CMat& V) const override;
    using HankelOperator::adjoint_lowrank;
    CVec adjoint_lowrank(const FactorSpectra& f, const RVec& s) const override;
    CMat dense(const CVec& z) const override;
    CVec adjoint_dense(const CMat& Z) const override;

    /// Elements in one padded transform buffer.
    std::size_t padded_size() const { return padded_size_; }

private:
    NdHankelShape shape_;
    std::vector<int> padded_dims_;
    std::size_t padded_size_ = 0;
    // Offsets into the padded array of signal, row and column positions.
    std::vector<std::size_t> signal_pos_;
    std::vector<std::size_t> row_pos_;
    std::vector<std::size_t> col_pos_;
};

/// Dense lift built level by level as a block Hankel matrix of lower-level
/// lifts (oracle scale only).
CMat nd_hankel_dense(const CVec& X, const NdHankelShape& shape);

/// (H X) v
CVec nd_hankel_matvec(const CVec& X, const CVec& v, const NdHankelShape& shape);
/// (H X)^* u
CVec nd_hankel_matvec_adjoint(const CVec& X, const CVec& u, const NdHankelShape& shape);
/// H^*(u v^*): entry l is the sum of u(i) conj(v(j)) over i + j = l.
CVec nd_adjoint_rank_one(const CVec& u, const CVec& v, const NdHankelShape& shape);

struct NdMode {
    std::vector<double> f;   // one frequency per dimension, in [0, 1)
    std::vector<double> tau; // one damping per dimension, >= 0
    cplx d{1.0, 0.0};
};

struct NdSignal {
    std::vector<Index> dims;
    CVec entries; // row-major
    std::vector<NdMode> modes;

    Index size() const { return entries.size(); }
};

/// Evaluates sum_k d_k prod_q exp((2 pi i f_kq - tau_kq) l_q).
NdSignal make_nd_signal(const std::vector<Index>& dims, std::vector<NdMode> modes);

struct NdSignalGenConfig {
    std::vector<Index> dims;
    Index r = 0;
    /// Every pair of modes keeps a wrap-around frequency distance of at
    /// least min_separation_cells / N_k in every dimension k; 0 only forbids
    /// exact repeats.
    double min_separation_cells = 0.0;
    std::array<double, 2> damping_range{0.0, 0.0};
    AmplitudeLaw amplitude_law; // empty means default_amplitude_law()
    std::uint64_t seed = 0;
};

NdSignal generate_nd_signal(const NdSignalGenConfig& cfg);

/// Default memory budget for nd_fiht_solve.
inline constexpr std::uint64_t default_nd_memory_budget = 4ULL << 30;

/// Bytes held by the factors and their transforms during a rank-r FIHT run.
std::uint64_t nd_fiht_memory_estimate(const NdHankelShape& shape, Index r);

/// fiht_solve on the multi-level operator.  Throws ResourceError when the
/// estimated working set exceeds `memory_budget`.
SolveResult nd_fiht_solve(const CVec& observed, const SampleSet& omega, const NdHankelShape& shape,
                          const SolverConfig& cfg, std::uint64_t memory_budget = default_nd_memory_budget);

} // namespace hankelrec
