#include "hankelrec/spectral_signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hankelrec {

AmplitudeLaw default_amplitude_law() {
    return [](Rng& rng) {
        const double c = rng.uniform();
        const double modulus = 1.0 + std::pow(10.0, 0.5 * c);
        const double phase = rng.uniform(0.0, two_pi);
        return std::polar(modulus, phase);
    };
}

AmplitudeLaw unit_amplitude_law() {
    return [](Rng& rng) { return std::polar(1.0, rng.uniform(0.0, two_pi)); };
}

double wrap_distance(double f1, double f2) {
    const double d = std::abs(f1 - f2);
    return std::min(d, 1.0 - d);
}

SpectralSignal make_signal(Index n, std::vector<Mode> modes) {
    if (n < 1) {
        throw ArgumentError("signal length must be >= 1");
    }
    for (const auto& m : modes) {
        if (m.tau < 0.0) {
            throw ArgumentError("damping must be nonnegative");
        }
        if (m.d == cplx{0.0, 0.0}) {
            throw ArgumentError("mode amplitude must be nonzero");
        }
    }
    SpectralSignal sig;
    sig.n = n;
    sig.modes = std::move(modes);
    sig.samples = CVec::Zero(n);
    for (const auto& m : sig.modes) {
        const cplx rate{-m.tau, two_pi * m.f};
        for (Index t = 0; t < n; ++t) {
            sig.samples[t] += m.d * std::exp(rate * static_cast<double>(t));
        }
    }
    return sig;
}

SpectralSignal generate_signal(const SignalGenConfig& cfg) {
    if (cfg.n < 1 || cfg.r < 1) {
        throw ArgumentError("generate_signal: n and r must be >= 1");
    }
    const HankelShape shape = make_shape(cfg.n, cfg.n1);
    if (cfg.r > std::min(shape.n1, shape.n2)) {
        throw ArgumentError("generate_signal: r exceeds min(n1, n2)");
    }
    if (cfg.min_separation < 0.0 || cfg.min_separation > 0.5) {
        throw ArgumentError("generate_signal: min_separation must lie in [0, 0.5]");
    }
    if (cfg.min_separation > 0.0 && static_cast<double>(cfg.r) * cfg.min_separation >= 1.0) {
        throw GenerationError("generate_signal: r * min_separation >= 1 is infeasible");
    }
    if (cfg.damping_range[0] < 0.0 || cfg.damping_range[1] < cfg.damping_range[0]) {
        throw ArgumentError("generate_signal: invalid damping range");
    }

    Rng rng(cfg.seed);
    const AmplitudeLaw law = cfg.amplitude_law ? cfg.amplitude_law : default_amplitude_law();

    std::vector<double> freqs;
    freqs.reserve(static_cast<std::size_t>(cfg.r));
    int rounds = 0;
    while (static_cast<Index>(freqs.size()) < cfg.r) {
        const double f = rng.uniform();
        const bool ok = std::all_of(freqs.begin(), freqs.end(), [&](double g) {
            const double d = wrap_distance(f, g);
            return cfg.min_separation > 0.0 ? d >= cfg.min_separation : d > 0.0;
        });
        if (ok) {
            freqs.push_back(f);
        } else if (++rounds > max_rejection_rounds) {
            throw GenerationError("generate_signal: separation not met after " +
                                  std::to_string(max_rejection_rounds) + " rejection rounds");
        }
    }

    std::vector<Mode> modes;
    modes.reserve(freqs.size());
    for (double f : freqs) {
        Mode m;
        m.f = f;
        m.tau = cfg.damping_range[0] == cfg.damping_range[1]
                    ? cfg.damping_range[0]
                    : rng.uniform(cfg.damping_range[0], cfg.damping_range[1]);
        m.d = law(rng);
        modes.push_back(m);
    }
    return make_signal(cfg.n, std::move(modes));
}

SampleSet sample_indices(Index n, Index m, SamplingMode mode, std::uint64_t seed) {
    if (n < 1) {
        throw ArgumentError("sample_indices: n must be >= 1");
    }
    if (m < 1) {
        throw ArgumentError("sample_indices: m must be >= 1");
    }
    SampleSet set;
    set.n = n;
    set.mode = mode;
    Rng rng(seed);
    if (mode == SamplingMode::with_replacement) {
        set.indices.resize(static_cast<std::size_t>(m));
        for (auto& a : set.indices) {
            a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        }
        return set;
    }
    if (m > n) {
        throw ArgumentError("sample_indices: m = " + std::to_string(m) + " exceeds n = " + std::to_string(n) +
                            " without replacement");
    }
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index k = 0; k < m; ++k) {
        const auto pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - k)));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(pick)]);
    }
    perm.resize(static_cast<std::size_t>(m));
    set.indices = std::move(perm);
    return set;
}

VandermondeFactors vandermonde_factors(const SpectralSignal& sig, const HankelShape& shape) {
    const Index r = sig.rank();
    if (r > std::min(shape.n1, shape.n2)) {
        throw ArgumentError("vandermonde_factors: r exceeds min(n1, n2)");
    }
    if (shape.n != sig.n) {
        throw ArgumentError("vandermonde_factors: shape does not match signal length");
    }
    VandermondeFactors vf;
    vf.left.resize(shape.n1, r);
    vf.right.resize(shape.n2, r);
    vf.amplitudes.resize(r);
    for (Index k = 0; k < r; ++k) {
        const auto& m = sig.modes[static_cast<std::size_t>(k)];
        const cplx rate{-m.tau, two_pi * m.f};
        for (Index i = 0; i < shape.n1; ++i) {
            vf.left(i, k) = std::exp(rate * static_cast<double>(i));
        }
        for (Index j = 0; j < shape.n2; ++j) {
            vf.right(j, k) = std::exp(rate * static_cast<double>(j));
        }
        vf.amplitudes[k] = m.d;
    }
    return vf;
}

namespace {

double smallest_gram_eigenvalue(const CMat& E) {
    const CMat gram = E.adjoint() * E;
    Eigen::SelfAdjointEigenSolver<CMat> eig(gram, Eigen::EigenvaluesOnly);
    const RVec& ev = eig.eigenvalues();
    const double largest = ev.maxCoeff();
    const double smallest = ev.minCoeff();
    if (!(smallest > 1e-12 * largest)) {
        throw DegenerateSignalError("Vandermonde factor is rank deficient");
    }
    return smallest;
}

} // namespace

double incoherence_estimate(const SpectralSignal& sig, const HankelShape& shape) {
    const VandermondeFactors vf = vandermonde_factors(sig, shape);
    if (vf.left.cols() == 0) {
        throw DegenerateSignalError("signal has no modes");
    }
    const double left = static_cast<double>(shape.n1) / smallest_gram_eigenvalue(vf.left);
    const double right = static_cast<double>(shape.n2) / smallest_gram_eigenvalue(vf.right);
    return std::max(left, right);
}

} // namespace hankelrec
