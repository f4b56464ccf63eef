#include "hankelrec/nd_hankel.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hankelrec/fft.hpp"

namespace hankelrec {

namespace {

Index product(const std::vector<Index>& v) {
    return std::accumulate(v.begin(), v.end(), Index{1}, std::multiplies<>());
}

// Row-major flat index of a multi-index.
Index flat_index(const std::vector<Index>& idx, const std::vector<Index>& dims) {
    Index flat = 0;
    for (std::size_t q = 0; q < dims.size(); ++q) {
        flat = flat * dims[q] + idx[q];
    }
    return flat;
}

// Multi-index of a Hankel row/column number, first index fastest.
std::vector<Index> decode_first_fastest(Index k, const std::vector<Index>& extent) {
    std::vector<Index> idx(extent.size());
    for (std::size_t q = 0; q < extent.size(); ++q) {
        idx[q] = k % extent[q];
        k /= extent[q];
    }
    return idx;
}

std::vector<Index> col_extent(const NdHankelShape& s) {
    std::vector<Index> m(s.ndim());
    for (std::size_t q = 0; q < s.ndim(); ++q) {
        m[q] = s.dims[q] - s.pencils[q] + 1;
    }
    return m;
}

} // namespace

NdHankelShape make_nd_shape(const std::vector<Index>& dims, const std::optional<std::vector<Index>>& pencils) {
    if (dims.empty()) {
        throw ArgumentError("make_nd_shape: at least one dimension required");
    }
    for (Index d : dims) {
        if (d < 1) {
            throw ArgumentError("make_nd_shape: dimensions must be >= 1");
        }
    }
    NdHankelShape s;
    s.dims = dims;
    if (pencils) {
        if (pencils->size() != dims.size()) {
            throw ArgumentError("make_nd_shape: one pencil size per dimension required");
        }
        s.pencils = *pencils;
    } else {
        s.pencils.resize(dims.size());
        for (std::size_t q = 0; q < dims.size(); ++q) {
            s.pencils[q] = (dims[q] + 2) / 2;
        }
    }
    for (std::size_t q = 0; q < dims.size(); ++q) {
        if (s.pencils[q] < 1 || s.pencils[q] > dims[q]) {
            throw ArgumentError("make_nd_shape: pencil sizes must lie in [1, N_k]");
        }
    }
    s.rows = product(s.pencils);
    s.cols = product(col_extent(s));

    // Separable product of the 1-D ramps, laid out row-major.
    const Index size = product(dims);
    s.weights = RVec::Ones(size);
    Index inner = size;
    for (std::size_t q = 0; q < dims.size(); ++q) {
        const HankelShape one = make_shape(dims[q], s.pencils[q]);
        inner /= dims[q];
        for (Index flat = 0; flat < size; ++flat) {
            const Index l = (flat / inner) % dims[q];
            s.weights[flat] *= static_cast<double>(one.weights[static_cast<std::size_t>(l)]);
        }
    }
    s.c_s = std::max(static_cast<double>(size) / static_cast<double>(s.rows),
                     static_cast<double>(size) / static_cast<double>(s.cols));
    return s;
}

HankelNd::HankelNd(NdHankelShape shape) : shape_(std::move(shape)) {
    const std::size_t d = shape_.ndim();
    padded_dims_.resize(d);
    std::vector<std::size_t> stride(d);
    padded_size_ = 1;
    for (std::size_t q = d; q-- > 0;) {
        padded_dims_[q] = static_cast<int>(fft::next_pow2(static_cast<std::size_t>(shape_.dims[q])));
        stride[q] = padded_size_;
        padded_size_ *= static_cast<std::size_t>(padded_dims_[q]);
    }
    auto position = [&](const std::vector<Index>& idx) {
        std::size_t pos = 0;
        for (std::size_t q = 0; q < d; ++q) {
            pos += static_cast<std::size_t>(idx[q]) * stride[q];
        }
        return pos;
    };

    const Index size = shape_.size();
    signal_pos_.resize(static_cast<std::size_t>(size));
    std::vector<Index> idx(d, 0);
    for (Index flat = 0; flat < size; ++flat) {
        signal_pos_[static_cast<std::size_t>(flat)] = position(idx);
        for (std::size_t q = d; q-- > 0;) {
            if (++idx[q] < shape_.dims[q]) {
                break;
            }
            idx[q] = 0;
        }
    }
    row_pos_.resize(static_cast<std::size_t>(shape_.rows));
    for (Index i = 0; i < shape_.rows; ++i) {
        row_pos_[static_cast<std::size_t>(i)] = position(decode_first_fastest(i, shape_.pencils));
    }
    const std::vector<Index> m = col_extent(shape_);
    col_pos_.resize(static_cast<std::size_t>(shape_.cols));
    for (Index j = 0; j < shape_.cols; ++j) {
        col_pos_[static_cast<std::size_t>(j)] = position(decode_first_fastest(j, m));
    }
    fft::plan_for(padded_dims_);
}

namespace {

void scatter(const cplx* x, const std::vector<std::size_t>& pos, bool conjugate, fft::Buffer& buf) {
    buf.zero();
    for (std::size_t k = 0; k < pos.size(); ++k) {
        buf[pos[k]] = conjugate ? std::conj(x[k]) : x[k];
    }
}

// Same correlation scheme as the 1-D operator, on the padded d-dimensional
// array with position maps for rows, columns and signal entries.
class BoundNd final : public BoundHankel {
public:
    BoundNd(const CVec& z, const fft::Plan& plan, const std::vector<std::size_t>& signal_pos,
            const std::vector<std::size_t>& row_pos, const std::vector<std::size_t>& col_pos)
        : plan_(plan), row_pos_(row_pos), col_pos_(col_pos), zhat_(plan.size()) {
        scatter(z.data(), signal_pos, false, zhat_);
        plan_.forward(zhat_);
    }

    Index rows() const override { return static_cast<Index>(row_pos_.size()); }
    Index cols() const override { return static_cast<Index>(col_pos_.size()); }

    CMat apply(const CMat& V) const override {
        if (V.rows() != cols()) {
            throw ArgumentError("multi-level Hankel apply: size mismatch");
        }
        CMat out(rows(), V.cols());
        fft::Buffer buf(plan_.size());
        for (Index c = 0; c < V.cols(); ++c) {
            scatter(V.col(c).data(), col_pos_, true, buf);
            plan_.forward(buf);
            correlate(buf, row_pos_, false, out.col(c).data());
        }
        return out;
    }

    CMat apply_adjoint(const CMat& U) const override {
        if (U.rows() != rows()) {
            throw ArgumentError("multi-level Hankel adjoint apply: size mismatch");
        }
        CMat out(cols(), U.cols());
        fft::Buffer buf(plan_.size());
        for (Index c = 0; c < U.cols(); ++c) {
            scatter(U.col(c).data(), row_pos_, false, buf);
            plan_.forward(buf);
            correlate(buf, col_pos_, true, out.col(c).data());
        }
        return out;
    }

    CMat apply(const FactorSpectra& f) const override {
        CMat out(rows(), static_cast<Index>(f.v_hat.size()));
        fft::Buffer buf(plan_.size());
        for (std::size_t c = 0; c < f.v_hat.size(); ++c) {
            std::copy(f.v_hat[c].data(), f.v_hat[c].data() + plan_.size(), buf.data());
            correlate(buf, row_pos_, false, out.col(static_cast<Index>(c)).data());
        }
        return out;
    }

    CMat apply_adjoint(const FactorSpectra& f) const override {
        CMat out(cols(), static_cast<Index>(f.u_hat.size()));
        fft::Buffer buf(plan_.size());
        for (std::size_t c = 0; c < f.u_hat.size(); ++c) {
            std::copy(f.u_hat[c].data(), f.u_hat[c].data() + plan_.size(), buf.data());
            correlate(buf, col_pos_, true, out.col(static_cast<Index>(c)).data());
        }
        return out;
    }

private:
    void correlate(fft::Buffer& buf, const std::vector<std::size_t>& pos, bool conjugate, cplx* out) const {
        const std::size_t len = plan_.size();
        for (std::size_t k = 0; k < len; ++k) {
            buf[k] = zhat_[k] * std::conj(buf[k]);
        }
        plan_.backward(buf);
        const double scale = 1.0 / static_cast<double>(len);
        for (std::size_t t = 0; t < pos.size(); ++t) {
            const cplx v = buf[pos[t]] * scale;
            out[t] = conjugate ? std::conj(v) : v;
        }
    }

    const fft::Plan& plan_;
    const std::vector<std::size_t>& row_pos_;
    const std::vector<std::size_t>& col_pos_;
    fft::Buffer zhat_;
};

} // namespace

std::unique_ptr<BoundHankel> HankelNd::bind(const CVec& z) const {
    if (z.size() != shape_.size()) {
        throw ArgumentError("multi-level Hankel bind: array size does not match shape");
    }
    return std::make_unique<BoundNd>(z, fft::plan_for(padded_dims_), signal_pos_, row_pos_, col_pos_);
}

FactorSpectra HankelNd::spectra(const CMat& U, const CMat& V) const {
    if (U.rows() != shape_.rows || V.rows() != shape_.cols) {
        throw ArgumentError("multi-level Hankel factor spectra: size mismatch");
    }
    const auto& plan = fft::plan_for(padded_dims_);
    FactorSpectra f;
    for (Index k = 0; k < U.cols(); ++k) {
        f.u_hat.emplace_back(padded_size_);
        scatter(U.col(k).data(), row_pos_, false, f.u_hat.back());
        plan.forward(f.u_hat.back());
    }
    for (Index k = 0; k < V.cols(); ++k) {
        f.v_hat.emplace_back(padded_size_);
        scatter(V.col(k).data(), col_pos_, true, f.v_hat.back());
        plan.forward(f.v_hat.back());
    }
    return f;
}

CVec HankelNd::adjoint_lowrank(const FactorSpectra& f, const RVec& s) const {
    if (f.u_hat.size() != static_cast<std::size_t>(s.size()) || f.v_hat.size() != f.u_hat.size()) {
        throw ArgumentError("multi-level Hankel adjoint of low-rank matrix: rank mismatch");
    }
    const auto& plan = fft::plan_for(padded_dims_);
    fft::Buffer acc(padded_size_);
    acc.zero();
    for (Index k = 0; k < s.size(); ++k) {
        if (s[k] == 0.0) {
            continue;
        }
        const auto& a = f.u_hat[static_cast<std::size_t>(k)];
        const auto& b = f.v_hat[static_cast<std::size_t>(k)];
        for (std::size_t q = 0; q < padded_size_; ++q) {
            acc[q] += s[k] * a[q] * b[q];
        }
    }
    plan.backward(acc);
    const double scale = 1.0 / static_cast<double>(padded_size_);
    CVec out(shape_.size());
    for (Index t = 0; t < shape_.size(); ++t) {
        out[t] = acc[signal_pos_[static_cast<std::size_t>(t)]] * scale;
    }
    return out;
}

CMat HankelNd::dense(const CVec& z) const { return nd_hankel_dense(z, shape_); }

CVec HankelNd::adjoint_dense(const CMat& Z) const {
    if (shape_.size() > dense_oracle_max_n) {
        throw OracleScaleError("dense multi-level Hankel reference limited to " +
                               std::to_string(dense_oracle_max_n) + " entries");
    }
    if (Z.rows() != shape_.rows || Z.cols() != shape_.cols) {
        throw ArgumentError("multi-level Hankel adjoint_dense: matrix shape does not match");
    }
    const std::vector<Index> m = col_extent(shape_);
    CVec out = CVec::Zero(shape_.size());
    std::vector<Index> sum(shape_.ndim());
    for (Index j = 0; j < shape_.cols; ++j) {
        const auto jj = decode_first_fastest(j, m);
        for (Index i = 0; i < shape_.rows; ++i) {
            const auto ii = decode_first_fastest(i, shape_.pencils);
            for (std::size_t q = 0; q < sum.size(); ++q) {
                sum[q] = ii[q] + jj[q];
            }
            out[flat_index(sum, shape_.dims)] += Z(i, j);
        }
    }
    return out;
}

namespace {

// Lift over the first `level` dimensions with the remaining indices fixed:
// a block Hankel matrix whose (a, b) block is the lift one level down at
// index a + b of dimension level - 1.
CMat lift_level(const CVec& X, const NdHankelShape& s, std::size_t level, std::vector<Index>& fixed) {
    if (level == 0) {
        CMat one(1, 1);
        one(0, 0) = X[flat_index(fixed, s.dims)];
        return one;
    }
    const std::size_t q = level - 1;
    const Index n = s.pencils[q];
    const Index m = s.dims[q] - n + 1;
    std::vector<CMat> blocks;
    for (Index t = 0; t < s.dims[q]; ++t) {
        fixed[q] = t;
        blocks.push_back(lift_level(X, s, q, fixed));
    }
    fixed[q] = 0;
    const Index br = blocks[0].rows();
    const Index bc = blocks[0].cols();
    CMat H(n * br, m * bc);
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < m; ++b) {
            H.block(a * br, b * bc, br, bc) = blocks[static_cast<std::size_t>(a + b)];
        }
    }
    return H;
}

} // namespace

CMat nd_hankel_dense(const CVec& X, const NdHankelShape& shape) {
    if (shape.size() > dense_oracle_max_n) {
        throw OracleScaleError("dense multi-level Hankel reference limited to " +
                               std::to_string(dense_oracle_max_n) + " entries");
    }
    if (X.size() != shape.size()) {
        throw ArgumentError("nd_hankel_dense: array size does not match shape");
    }
    std::vector<Index> fixed(shape.ndim(), 0);
    return lift_level(X, shape, shape.ndim(), fixed);
}

CVec nd_hankel_matvec(const CVec& X, const CVec& v, const NdHankelShape& shape) {
    return HankelNd(shape).apply(X, v);
}

CVec nd_hankel_matvec_adjoint(const CVec& X, const CVec& u, const NdHankelShape& shape) {
    return HankelNd(shape).apply_adjoint(X, u);
}

CVec nd_adjoint_rank_one(const CVec& u, const CVec& v, const NdHankelShape& shape) {
    return HankelNd(shape).adjoint_lowrank(u, RVec::Ones(1), v);
}

NdSignal make_nd_signal(const std::vector<Index>& dims, std::vector<NdMode> modes) {
    if (dims.empty() || std::any_of(dims.begin(), dims.end(), [](Index d) { return d < 1; })) {
        throw ArgumentError("make_nd_signal: dimensions must be >= 1");
    }
    for (const auto& m : modes) {
        if (m.f.size() != dims.size() || m.tau.size() != dims.size()) {
            throw ArgumentError("make_nd_signal: one frequency and damping per dimension required");
        }
        if (std::any_of(m.tau.begin(), m.tau.end(), [](double t) { return t < 0.0; })) {
            throw ArgumentError("damping must be nonnegative");
        }
        if (m.d == cplx{0.0, 0.0}) {
            throw ArgumentError("mode amplitude must be nonzero");
        }
    }
    NdSignal sig;
    sig.dims = dims;
    sig.modes = std::move(modes);
    const Index size = product(dims);
    sig.entries = CVec::Zero(size);
    const std::size_t d = dims.size();
    for (const auto& m : sig.modes) {
        // Per-dimension geometric sequences, multiplied out row-major.
        std::vector<CVec> seq(d);
        for (std::size_t q = 0; q < d; ++q) {
            const cplx rate{-m.tau[q], two_pi * m.f[q]};
            seq[q].resize(dims[q]);
            for (Index l = 0; l < dims[q]; ++l) {
                seq[q][l] = std::exp(rate * static_cast<double>(l));
            }
        }
        std::vector<Index> idx(d, 0);
        for (Index flat = 0; flat < size; ++flat) {
            cplx v = m.d;
            for (std::size_t q = 0; q < d; ++q) {
                v *= seq[q][idx[q]];
            }
            sig.entries[flat] += v;
            for (std::size_t q = d; q-- > 0;) {
                if (++idx[q] < dims[q]) {
                    break;
                }
                idx[q] = 0;
            }
        }
    }
    return sig;
}

NdSignal generate_nd_signal(const NdSignalGenConfig& cfg) {
    if (cfg.r < 1) {
        throw ArgumentError("generate_nd_signal: r must be >= 1");
    }
    const NdHankelShape shape = make_nd_shape(cfg.dims);
    if (cfg.r > std::min(shape.rows, shape.cols)) {
        throw ArgumentError("generate_nd_signal: r exceeds the lift's smaller dimension");
    }
    if (cfg.min_separation_cells < 0.0) {
        throw ArgumentError("generate_nd_signal: min_separation_cells must be >= 0");
    }
    std::vector<double> sep(cfg.dims.size());
    for (std::size_t q = 0; q < sep.size(); ++q) {
        sep[q] = cfg.min_separation_cells / static_cast<double>(cfg.dims[q]);
        if (sep[q] > 0.5 || static_cast<double>(cfg.r) * sep[q] >= 1.0) {
            throw GenerationError("generate_nd_signal: separation infeasible in dimension " + std::to_string(q));
        }
    }
    if (cfg.damping_range[0] < 0.0 || cfg.damping_range[1] < cfg.damping_range[0]) {
        throw ArgumentError("generate_nd_signal: invalid damping range");
    }
    Rng rng(cfg.seed);
    const AmplitudeLaw law = cfg.amplitude_law ? cfg.amplitude_law : default_amplitude_law();
    const std::size_t d = cfg.dims.size();

    std::vector<std::vector<double>> freqs;
    int rounds = 0;
    while (static_cast<Index>(freqs.size()) < cfg.r) {
        std::vector<double> f(d);
        for (auto& x : f) {
            x = rng.uniform();
        }
        const bool ok = std::all_of(freqs.begin(), freqs.end(), [&](const std::vector<double>& g) {
            for (std::size_t q = 0; q < d; ++q) {
                const double dist = wrap_distance(f[q], g[q]);
                if (sep[q] > 0.0 ? dist < sep[q] : dist == 0.0) {
                    return false;
                }
            }
            return true;
        });
        if (ok) {
            freqs.push_back(std::move(f));
        } else if (++rounds > max_rejection_rounds) {
            throw GenerationError("generate_nd_signal: separation not met after " +
                                  std::to_string(max_rejection_rounds) + " rejection rounds");
        }
    }
    std::vector<NdMode> modes;
    for (auto& f : freqs) {
        NdMode m;
        m.f = std::move(f);
        m.tau.resize(d);
        for (auto& t : m.tau) {
            t = cfg.damping_range[0] == cfg.damping_range[1] ? cfg.damping_range[0]
                                                             : rng.uniform(cfg.damping_range[0], cfg.damping_range[1]);
        }
        m.d = law(rng);
        modes.push_back(std::move(m));
    }
    return make_nd_signal(cfg.dims, std::move(modes));
}

std::uint64_t nd_fiht_memory_estimate(const NdHankelShape& shape, Index r) {
    const HankelNd op(shape);
    const auto factors = static_cast<std::uint64_t>(6 * r * (shape.rows + shape.cols));
    // Two sets of factor spectra plus the bound signal and scratch buffers.
    const auto spectra = static_cast<std::uint64_t>(4 * r + 3) * op.padded_size();
    return (factors + spectra) * sizeof(cplx);
}

SolveResult nd_fiht_solve(const CVec& observed, const SampleSet& omega, const NdHankelShape& shape,
                          const SolverConfig& cfg, std::uint64_t memory_budget) {
    if (observed.size() != shape.size() || omega.n != shape.size()) {
        throw ArgumentError("nd_fiht_solve: observed array and sample set must match the shape");
    }
    const std::uint64_t need = nd_fiht_memory_estimate(shape, cfg.r);
    if (need > memory_budget) {
        throw ResourceError("nd_fiht_solve: estimated working set of " + std::to_string(need) +
                            " bytes exceeds the memory budget of " + std::to_string(memory_budget) + " bytes");
    }
    const HankelNd op(shape);
    return fiht_solve(op, observed, omega, cfg);
}

} // namespace hankelrec
