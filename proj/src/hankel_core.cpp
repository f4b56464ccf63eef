#include "hankelrec/hankel_core.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "hankelrec/fft.hpp"

namespace hankelrec {

namespace {

const fft::Plan& plan_of_length(std::size_t len) {
    const std::array<int, 1> dims{static_cast<int>(len)};
    return fft::plan_for(dims);
}

void require_oracle_scale(Index n) {
    if (n > dense_oracle_max_n) {
        throw OracleScaleError("dense Hankel reference limited to n <= " + std::to_string(dense_oracle_max_n) +
                               ", got n = " + std::to_string(n));
    }
}

} // namespace

HankelShape make_shape(Index n, std::optional<Index> n1) {
    if (n < 1) {
        throw ArgumentError("signal length must be >= 1");
    }
    HankelShape s;
    s.n = n;
    s.n1 = n1.value_or((n + 2) / 2);
    if (s.n1 < 1 || s.n1 > n) {
        throw ArgumentError("pencil size n1 must lie in [1, n]");
    }
    s.n2 = n + 1 - s.n1;
    s.weights.resize(static_cast<std::size_t>(n));
    for (Index a = 0; a < n; ++a) {
        s.weights[static_cast<std::size_t>(a)] = std::min({a + 1, s.n1, s.n2, n - a});
    }
    s.c_s = std::max(static_cast<double>(n) / static_cast<double>(s.n1),
                     static_cast<double>(n) / static_cast<double>(s.n2));
    return s;
}

CVec HankelOperator::adjoint_lowrank(const CMat& U, const RVec& s, const CMat& V) const {
    if (U.rows() != rows() || V.rows() != cols() || U.cols() != s.size() || V.cols() != s.size()) {
        throw ArgumentError("Hankel adjoint of low-rank matrix: size mismatch");
    }
    return adjoint_lowrank(spectra(U, V), s);
}

CVec HankelOperator::pseudo_inverse(const LowRankFactor& L) const {
    return pseudo_inverse(L, spectra(L.U, L.V));
}

CVec HankelOperator::pseudo_inverse(const LowRankFactor& L, const FactorSpectra& f) const {
    CVec x = adjoint_lowrank(f, L.sigma);
    return x.array() / weights().array().cast<cplx>();
}

Hankel1d::Hankel1d(HankelShape shape)
    : shape_(std::move(shape)), fft_len_(fft::next_pow2(static_cast<std::size_t>(shape_.n))) {
    weights_.resize(shape_.n);
    for (Index a = 0; a < shape_.n; ++a) {
        weights_[a] = static_cast<double>(shape_.weights[static_cast<std::size_t>(a)]);
    }
    plan_of_length(fft_len_);
}

namespace {

// Zero-padded transform of x (conjugated when `conjugate`).
void transform_column(const fft::Plan& plan, const cplx* x, Index len, bool conjugate, fft::Buffer& out) {
    out.zero();
    for (Index k = 0; k < len; ++k) {
        out[static_cast<std::size_t>(k)] = conjugate ? std::conj(x[k]) : x[k];
    }
    plan.forward(out);
}

// With y_hat = F(y), the first `count` entries of the cyclic correlation
// c_t = sum_i z_{t+i} conj(y_i).  Indices never wrap since the transform
// length is at least n.
class Bound1d final : public BoundHankel {
public:
    Bound1d(const CVec& z, Index n1, Index n2, std::size_t len)
        : n1_(n1), n2_(n2), len_(len), plan_(plan_of_length(len)), zhat_(len) {
        transform_column(plan_, z.data(), z.size(), false, zhat_);
    }

    Index rows() const override { return n1_; }
    Index cols() const override { return n2_; }

    // (H z v)_i = sum_j z_{i+j} v_j: correlation against y = conj(v).
    CMat apply(const CMat& V) const override {
        if (V.rows() != n2_) {
            throw ArgumentError("Hankel apply: size mismatch");
        }
        CMat out(n1_, V.cols());
        fft::Buffer buf(len_);
        for (Index c = 0; c < V.cols(); ++c) {
            transform_column(plan_, V.col(c).data(), n2_, true, buf);
            correlate(buf, n1_, false, out.col(c).data());
        }
        return out;
    }

    // ((H z)^* u)_j = conj(sum_i z_{i+j} conj(u_i)): correlation against u.
    CMat apply_adjoint(const CMat& U) const override {
        if (U.rows() != n1_) {
            throw ArgumentError("Hankel adjoint apply: size mismatch");
        }
        CMat out(n2_, U.cols());
        fft::Buffer buf(len_);
        for (Index c = 0; c < U.cols(); ++c) {
            transform_column(plan_, U.col(c).data(), n1_, false, buf);
            correlate(buf, n2_, true, out.col(c).data());
        }
        return out;
    }

    CMat apply(const FactorSpectra& f) const override {
        CMat out(n1_, static_cast<Index>(f.v_hat.size()));
        fft::Buffer buf(len_);
        for (std::size_t c = 0; c < f.v_hat.size(); ++c) {
            std::copy(f.v_hat[c].data(), f.v_hat[c].data() + len_, buf.data());
            correlate(buf, n1_, false, out.col(static_cast<Index>(c)).data());
        }
        return out;
    }

    CMat apply_adjoint(const FactorSpectra& f) const override {
        CMat out(n2_, static_cast<Index>(f.u_hat.size()));
        fft::Buffer buf(len_);
        for (std::size_t c = 0; c < f.u_hat.size(); ++c) {
            std::copy(f.u_hat[c].data(), f.u_hat[c].data() + len_, buf.data());
            correlate(buf, n2_, true, out.col(static_cast<Index>(c)).data());
        }
        return out;
    }

private:
    // buf holds y_hat on entry and is overwritten.
    void correlate(fft::Buffer& buf, Index count, bool conjugate, cplx* out) const {
        for (std::size_t k = 0; k < len_; ++k) {
            buf[k] = zhat_[k] * std::conj(buf[k]);
        }
        plan_.backward(buf);
        const double scale = 1.0 / static_cast<double>(len_);
        for (Index t = 0; t < count; ++t) {
            const cplx v = buf[static_cast<std::size_t>(t)] * scale;
            out[t] = conjugate ? std::conj(v) : v;
        }
    }

    Index n1_;
    Index n2_;
    std::size_t len_;
    const fft::Plan& plan_;
    fft::Buffer zhat_;
};

} // namespace

std::unique_ptr<BoundHankel> Hankel1d::bind(const CVec& z) const {
    if (z.size() != shape_.n) {
        throw ArgumentError("Hankel bind: vector length does not match shape");
    }
    return std::make_unique<Bound1d>(z, shape_.n1, shape_.n2, fft_len_);
}

FactorSpectra Hankel1d::spectra(const CMat& U, const CMat& V) const {
    if (U.rows() != shape_.n1 || V.rows() != shape_.n2) {
        throw ArgumentError("Hankel factor spectra: size mismatch");
    }
    const auto& plan = plan_of_length(fft_len_);
    FactorSpectra f;
    for (Index k = 0; k < U.cols(); ++k) {
        f.u_hat.emplace_back(fft_len_);
        transform_column(plan, U.col(k).data(), shape_.n1, false, f.u_hat.back());
    }
    for (Index k = 0; k < V.cols(); ++k) {
        f.v_hat.emplace_back(fft_len_);
        transform_column(plan, V.col(k).data(), shape_.n2, true, f.v_hat.back());
    }
    return f;
}

CVec Hankel1d::adjoint_lowrank(const FactorSpectra& f, const RVec& s) const {
    if (f.u_hat.size() != static_cast<std::size_t>(s.size()) || f.v_hat.size() != f.u_hat.size()) {
        throw ArgumentError("Hankel adjoint of low-rank matrix: rank mismatch");
    }
    const auto& plan = plan_of_length(fft_len_);
    fft::Buffer acc(fft_len_);
    acc.zero();
    for (Index k = 0; k < s.size(); ++k) {
        if (s[k] == 0.0) {
            continue;
        }
        const auto& a = f.u_hat[static_cast<std::size_t>(k)];
        const auto& b = f.v_hat[static_cast<std::size_t>(k)];
        for (std::size_t q = 0; q < fft_len_; ++q) {
            acc[q] += s[k] * a[q] * b[q];
        }
    }
    plan.backward(acc);
    const double scale = 1.0 / static_cast<double>(fft_len_);
    CVec out(shape_.n);
    for (Index t = 0; t < shape_.n; ++t) {
        out[t] = acc[static_cast<std::size_t>(t)] * scale;
    }
    return out;
}

CMat Hankel1d::dense(const CVec& z) const { return hankel_dense(z, shape_); }

CVec Hankel1d::adjoint_dense(const CMat& Z) const { return hankel_adjoint_dense(Z, shape_); }

CMat hankel_dense(const CVec& z, const HankelShape& shape) {
    require_oracle_scale(shape.n);
    if (z.size() != shape.n) {
        throw ArgumentError("hankel_dense: vector length does not match shape");
    }
    CMat H(shape.n1, shape.n2);
    for (Index j = 0; j < shape.n2; ++j) {
        for (Index i = 0; i < shape.n1; ++i) {
            H(i, j) = z[i + j];
        }
    }
    return H;
}

CVec hankel_adjoint_dense(const CMat& Z, const HankelShape& shape) {
    require_oracle_scale(shape.n);
    if (Z.rows() != shape.n1 || Z.cols() != shape.n2) {
        throw ArgumentError("hankel_adjoint_dense: matrix shape does not match");
    }
    CVec out = CVec::Zero(shape.n);
    for (Index j = 0; j < shape.n2; ++j) {
        for (Index i = 0; i < shape.n1; ++i) {
            out[i + j] += Z(i, j);
        }
    }
    return out;
}

CVec hankel_matvec(const CVec& z, const CVec& v, const HankelShape& shape) {
    return Hankel1d(shape).apply(z, v);
}

CVec hankel_matvec_adjoint(const CVec& z, const CVec& u, const HankelShape& shape) {
    return Hankel1d(shape).apply_adjoint(z, u);
}

CVec adjoint_rank_one(const CVec& u, const CVec& v, const HankelShape& shape) {
    return Hankel1d(shape).adjoint_lowrank(u, RVec::Ones(1), v);
}

CVec apply_pseudo_inverse(const LowRankFactor& L, const HankelShape& shape) {
    return Hankel1d(shape).pseudo_inverse(L);
}

CVec project_samples(const CVec& z, const SampleSet& omega) {
    if (omega.n != z.size()) {
        throw ArgumentError("project_samples: sample set length does not match vector");
    }
    omega.validate();
    return z.array() * omega.multiplicity().array().cast<cplx>();
}

} // namespace hankelrec
