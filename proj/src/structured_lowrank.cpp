#include "hankelrec/structured_lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace hankelrec {

namespace {

// Two passes of classical Gram-Schmidt against the first `count` columns.
void orthogonalize(CVec& w, const CMat& basis, Index count) {
    if (count == 0) {
        return;
    }
    for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(count) * (basis.leftCols(count).adjoint() * w);
    }
}

CVec random_unit(Rng& rng, Index dim) {
    CVec v(dim);
    for (Index i = 0; i < dim; ++i) {
        v[i] = rng.complex_normal();
    }
    return v / v.norm();
}

// Unit vector orthogonal to both `fixed` and the first `count` columns of
// `partial`, built from canonical directions starting at `next`.
CVec fresh_direction(const CMat& fixed, const CMat& partial, Index count, Index& next) {
    const Index rows = partial.rows();
    for (Index tries = 0; tries < rows; ++tries) {
        const Index i = (next + tries) % rows;
        CVec e = CVec::Zero(rows);
        e[i] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            if (fixed.cols() > 0) {
                e -= fixed * (fixed.adjoint() * e);
            }
            if (count > 0) {
                e -= partial.leftCols(count) * (partial.leftCols(count).adjoint() * e);
            }
        }
        const double nrm = e.norm();
        if (nrm > 0.5) {
            next = i + 1;
            return e / nrm;
        }
    }
    throw Error("complement_qr: no direction left in the orthogonal complement");
}

} // namespace

TangentCoeffs tangent_coeffs(const HankelOperator& op, const CVec& h, const CMat& U, const CMat& V,
                             const FactorSpectra* spectra) {
    if (U.rows() != op.rows() || V.rows() != op.cols() || U.cols() != V.cols()) {
        throw ArgumentError("tangent_coeffs: basis shape does not match operator");
    }
    const auto H = op.bind(h);
    const CMat HV = spectra != nullptr ? H->apply(*spectra) : H->apply(V);
    const CMat HtU = spectra != nullptr ? H->apply_adjoint(*spectra) : H->apply_adjoint(U);
    TangentCoeffs tc;
    tc.C = U.adjoint() * HV;
    // V^* H^* U = C^*
    tc.X = HtU - V * tc.C.adjoint();
    tc.Y = HV - U * tc.C;
    return tc;
}

namespace {

// Column-by-column Gram-Schmidt with replacement directions for dependent
// columns.
ComplementQR complement_qr_gs(const CMat& X, const CMat& basis, Index qmax, double tol) {
    const Index rows = X.rows();
    const Index r = X.cols();
    ComplementQR out;
    out.Q = CMat::Zero(rows, qmax);
    out.R = CMat::Zero(qmax, r);
    Index q = 0;
    Index next_candidate = 0;
    for (Index k = 0; k < r; ++k) {
        CVec w = X.col(k);
        for (int pass = 0; pass < 2; ++pass) {
            if (basis.cols() > 0) {
                w -= basis * (basis.adjoint() * w);
            }
            if (q > 0) {
                const CVec c = out.Q.leftCols(q).adjoint() * w;
                w -= out.Q.leftCols(q) * c;
                out.R.block(0, k, q, 1) += c;
            }
        }
        if (q == qmax) {
            continue;
        }
        const double nrm = w.norm();
        if (nrm > tol && nrm > 0.0) {
            out.Q.col(q) = w / nrm;
            out.R(q, k) = nrm;
        } else {
            out.Q.col(q) = fresh_direction(basis, out.Q, q, next_candidate);
        }
        ++q;
    }
    return out;
}

} // namespace

ComplementQR complement_qr(const CMat& X, const CMat& basis) {
    const Index rows = X.rows();
    const Index r = X.cols();
    const Index qmax = std::max<Index>(0, std::min(r, rows - basis.cols()));
    const double tol = qr_rank_tol * X.norm();
    if (qmax < r || r == 0) {
        return complement_qr_gs(X, basis, qmax, tol);
    }

    CMat W = X;
    if (basis.cols() > 0) {
        W -= basis * (basis.adjoint() * W);
    }
    Eigen::HouseholderQR<CMat> qr(W);
    const CMat R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (Index k = 0; k < r; ++k) {
        if (!(std::abs(R(k, k)) > tol)) {
            return complement_qr_gs(X, basis, qmax, tol);
        }
    }
    ComplementQR out;
    out.Q = qr.householderQ() * CMat::Identity(rows, r);
    out.R = R;
    return out;
}

namespace {

// Cholesky QR of X after projecting out `basis`: X_perp = Q R with Q never
// formed.  Empty when the Gram matrix is too ill-conditioned for the
// orthogonality loss (about eps * cond(R)^2) to stay negligible.
struct CholeskyComplement {
    CMat W; // X - basis basis^* X
    CMat R; // upper triangular, W = Q R
};

inline constexpr double cholesky_qr_max_cond = 100.0;

std::optional<CholeskyComplement> cholesky_complement(const CMat& X, const CMat& basis) {
    const Index r = X.cols();
    if (r == 0 || X.rows() - basis.cols() < r) {
        return std::nullopt;
    }
    CholeskyComplement out;
    out.W = X - basis * (basis.adjoint() * X);
    CMat G = CMat::Zero(r, r);
    G.selfadjointView<Eigen::Lower>().rankUpdate(out.W.adjoint());
    const CMat gram = G.selfadjointView<Eigen::Lower>();
    // cond(R)^2 = cond(G)
    const RVec ev = Eigen::SelfAdjointEigenSolver<CMat>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    const double lo = ev[0];
    const double hi = ev[r - 1];
    const double floor = qr_rank_tol * X.norm();
    if (!(lo > floor * floor) || hi > cholesky_qr_max_cond * cholesky_qr_max_cond * lo) {
        return std::nullopt;
    }
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success) {
        return std::nullopt;
    }
    out.R = llt.matrixU();
    return out;
}

// [basis, Q] * coeffs with Q = W R^{-1}.
CMat combine(const CMat& basis, const CholeskyComplement& qr, const CMat& coeffs) {
    const Index k0 = basis.cols();
    const Index q = qr.R.rows();
    CMat lifted(k0 + q, coeffs.cols());
    lifted.topRows(k0) = coeffs.topRows(k0);
    lifted.bottomRows(q) = qr.R.triangularView<Eigen::Upper>().solve(coeffs.bottomRows(q));
    CMat out = basis * lifted.topRows(k0);
    out.noalias() += qr.W * lifted.bottomRows(q);
    return out;
}

CMat middle_block(const CMat& C, const CMat& R1, const CMat& R2) {
    const Index k0 = C.rows();
    CMat M = CMat::Zero(k0 + R2.rows(), k0 + R1.rows());
    M.topLeftCorner(k0, k0) = C;
    M.topRightCorner(k0, R1.rows()) = R1.adjoint();
    M.bottomLeftCorner(R2.rows(), k0) = R2;
    return M;
}

} // namespace

LowRankFactor retract_rank_r(const TangentCoeffs& tc, const CMat& U, const CMat& V, Index r) {
    const Index k0 = U.cols();
    if (tc.C.rows() != k0 || tc.C.cols() != k0 || tc.X.rows() != V.rows() || tc.Y.rows() != U.rows()) {
        throw ArgumentError("retract_rank_r: coefficient shapes do not match basis");
    }

    const auto fast1 = cholesky_complement(tc.X, V);
    const auto fast2 = fast1 ? cholesky_complement(tc.Y, U) : std::nullopt;
    if (fast1 && fast2) {
        Eigen::BDCSVD<CMat> svd(middle_block(tc.C, fast1->R, fast2->R), Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Index k = std::min<Index>(r, svd.singularValues().size());
        LowRankFactor out;
        out.U = combine(U, *fast2, svd.matrixU().leftCols(k));
        out.V = combine(V, *fast1, svd.matrixV().leftCols(k));
        out.sigma = svd.singularValues().head(k);
        return out;
    }

    const ComplementQR qr1 = complement_qr(tc.X, V);
    const ComplementQR qr2 = complement_qr(tc.Y, U);
    Eigen::BDCSVD<CMat> svd(middle_block(tc.C, qr1.R, qr2.R), Eigen::ComputeThinU | Eigen::ComputeThinV);

    CMat left(U.rows(), k0 + qr2.Q.cols());
    left << U, qr2.Q;
    CMat right(V.rows(), k0 + qr1.Q.cols());
    right << V, qr1.Q;

    const Index k = std::min<Index>(r, svd.singularValues().size());
    LowRankFactor out;
    out.U = left * svd.matrixU().leftCols(k);
    out.V = right * svd.matrixV().leftCols(k);
    out.sigma = svd.singularValues().head(k);
    return out;
}

LowRankFactor dense_hard_threshold(const CMat& Z, Index r) {
    if (Z.rows() + Z.cols() - 1 > dense_oracle_max_n) {
        throw OracleScaleError("dense_hard_threshold: matrix beyond oracle scale");
    }
    if (r < 0 || r > std::min(Z.rows(), Z.cols())) {
        throw ArgumentError("dense_hard_threshold: r must lie in [0, min(rows, cols)]");
    }
    Eigen::BDCSVD<CMat> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LowRankFactor out;
    out.U = svd.matrixU().leftCols(r);
    out.V = svd.matrixV().leftCols(r);
    out.sigma = svd.singularValues().head(r);
    return out;
}

CMat dense_tangent_projection(const CMat& Z, const CMat& U, const CMat& V) {
    const CMat UUZ = U * (U.adjoint() * Z);
    const CMat ZVV = (Z * V) * V.adjoint();
    const CMat UUZVV = U * (U.adjoint() * Z * V) * V.adjoint();
    return UUZ + ZVV - UUZVV;
}

LowRankFactor orthonormalize(const LowRankFactor& L) {
    const ComplementQR qa = complement_qr(L.U, CMat(L.U.rows(), 0));
    const ComplementQR qb = complement_qr(L.V, CMat(L.V.rows(), 0));
    const CMat core = qa.R * L.sigma.cast<cplx>().asDiagonal() * qb.R.adjoint();
    Eigen::BDCSVD<CMat> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index k = std::min<Index>(L.rank(), svd.singularValues().size());
    LowRankFactor out;
    out.U = qa.Q * svd.matrixU().leftCols(k);
    out.V = qb.Q * svd.matrixV().leftCols(k);
    out.sigma = svd.singularValues().head(k);
    return out;
}

namespace {

LowRankFactor assemble(const CMat& Ub, const CMat& Vb, Index k, const Eigen::MatrixXd& left,
                       const Eigen::MatrixXd& right, const RVec& sigma) {
    LowRankFactor out;
    out.U = Ub.leftCols(k) * left.cast<cplx>();
    out.V = Vb.leftCols(k) * right.cast<cplx>();
    out.sigma = sigma;
    return out;
}

// Golub-Kahan bidiagonalization of an operator with rows >= cols.  Running
// out of right Krylov directions (k == cols) makes the factorization exact.
template <typename Apply, typename ApplyAdjoint>
LowRankFactor lanczos_svd(Apply&& apply, ApplyAdjoint&& apply_adjoint, Index m, Index n, Index r,
                          const PartialSvdOptions& opts, PartialSvdInfo* info) {
    const Index limit = std::min(m, n);
    Index kmax = opts.max_iters > 0 ? opts.max_iters : std::min<Index>(limit, 10 * r + 200);
    kmax = std::clamp<Index>(kmax, r, limit);

    Rng rng(opts.seed);
    CMat Ub(m, kmax);
    CMat Vb(n, kmax + 1);
    RVec alpha = RVec::Zero(kmax);
    RVec beta = RVec::Zero(kmax);
    Vb.col(0) = random_unit(rng, n);

    double anorm = 0.0;
    Index next_check = r;
    Index best_k = 0;
    Eigen::MatrixXd best_left;
    Eigen::MatrixXd best_right;
    RVec best_sigma;
    double best_residual = std::numeric_limits<double>::infinity();

    for (Index j = 0; j < kmax; ++j) {
        CVec p = apply(CVec(Vb.col(j)));
        if (j > 0) {
            p -= beta[j - 1] * Ub.col(j - 1);
        }
        orthogonalize(p, Ub, j);
        double a = p.norm();
        if (a <= 1e-14 * anorm) {
            a = 0.0;
            p = random_unit(rng, m);
            orthogonalize(p, Ub, j);
        }
        Ub.col(j) = p / p.norm();
        alpha[j] = a;
        anorm = std::max(anorm, a);

        CVec q = apply_adjoint(CVec(Ub.col(j))) - a * Vb.col(j);
        orthogonalize(q, Vb, j + 1);
        double b = q.norm();
        if (j + 1 < n) {
            if (b <= 1e-14 * anorm) {
                b = 0.0;
                q = random_unit(rng, n);
                orthogonalize(q, Vb, j + 1);
            }
            Vb.col(j + 1) = q / q.norm();
        }
        beta[j] = b;
        anorm = std::max(anorm, b);

        const Index k = j + 1;
        const bool exhausted = k == limit;
        if (k < next_check && k < kmax) {
            continue;
        }
        next_check = k + std::max<Index>(4, k / 10);

        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k, k);
        for (Index i = 0; i < k; ++i) {
            B(i, i) = alpha[i];
            if (i + 1 < k) {
                B(i, i + 1) = beta[i];
            }
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVec& s = svd.singularValues();
        double max_res = 0.0;
        for (Index i = 0; i < r; ++i) {
            const double res = exhausted ? 0.0 : std::abs(beta[k - 1] * svd.matrixU()(k - 1, i));
            max_res = std::max(max_res, res);
        }
        if (max_res < best_residual) {
            best_residual = max_res;
            best_k = k;
            best_left = svd.matrixU().leftCols(r);
            best_right = svd.matrixV().leftCols(r);
            best_sigma = s.head(r);
        }
        if (max_res <= opts.tol * s[0] || exhausted) {
            if (info != nullptr) {
                info->steps = k;
                info->max_residual = max_res;
                info->next_sigma = k > r ? std::optional<double>(s[r]) : std::nullopt;
            }
            return assemble(Ub, Vb, k, svd.matrixU().leftCols(r), svd.matrixV().leftCols(r), s.head(r));
        }
    }
    LowRankFactor best = best_k > 0 ? assemble(Ub, Vb, best_k, best_left, best_right, best_sigma)
                                    : LowRankFactor::zero(m, n, r);
    throw PartialSvdError("partial SVD did not converge within " + std::to_string(kmax) +
                              " Lanczos steps (residual " + std::to_string(best_residual) + ")",
                          best);
}

LowRankFactor swap_sides(LowRankFactor f) {
    std::swap(f.U, f.V);
    return f;
}

} // namespace

LowRankFactor partial_svd(const BoundHankel& A, Index r, const PartialSvdOptions& opts, PartialSvdInfo* info) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (r < 1 || r > std::min(m, n)) {
        throw ArgumentError("partial_svd: r must lie in [1, min(n1, n2)]");
    }
    auto fwd = [&](const CVec& v) -> CVec { return A.apply(v); };
    auto adj = [&](const CVec& u) -> CVec { return A.apply_adjoint(u); };
    if (m >= n) {
        return lanczos_svd(fwd, adj, m, n, r, opts, info);
    }
    try {
        return swap_sides(lanczos_svd(adj, fwd, n, m, r, opts, info));
    } catch (const PartialSvdError& e) {
        throw PartialSvdError(e.what(), swap_sides(e.best()));
    }
}

LowRankFactor partial_svd_hankel(const HankelOperator& op, const CVec& z, Index r, const PartialSvdOptions& opts,
                                 PartialSvdInfo* info) {
    return partial_svd(*op.bind(z), r, opts, info);
}

double lowrank_hankel_distance(const HankelOperator& op, const LowRankFactor& L, const CVec& x) {
    return (op.dense(x) - L.dense()).norm();
}

} // namespace hankelrec
