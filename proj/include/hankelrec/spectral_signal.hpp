#pragma once

// Spectrally sparse signal model: generation, evaluation, random sampling
// and Vandermonde/incoherence diagnostics.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hankelrec/common.hpp"
#include "hankelrec/hankel_core.hpp"
#include "hankelrec/sample_set.hpp"

namespace hankelrec {

struct Mode {
    double f = 0.0;   // normalized frequency in [0, 1)
    double tau = 0.0; // damping per unit time, >= 0
    cplx d{1.0, 0.0}; // complex amplitude, nonzero
};

struct SpectralSignal {
    Index n = 0;
    std::vector<Mode> modes;
    CVec samples;

    Index rank() const { return static_cast<Index>(modes.size()); }
};

/// Draws one complex amplitude.
using AmplitudeLaw = std::function<cplx(Rng&)>;

/// Modulus 1 + 10^(0.5 c) with c ~ U[0, 1], phase ~ U[0, 2pi).
AmplitudeLaw default_amplitude_law();
/// Unit modulus, uniform phase.
AmplitudeLaw unit_amplitude_law();

struct SignalGenConfig {
    Index n = 0;
    Index r = 0;
    /// Minimum wrap-around distance between frequencies; 0 only forbids exact repeats.
    double min_separation = 0.0;
    std::array<double, 2> damping_range{0.0, 0.0};
    AmplitudeLaw amplitude_law; // empty means default_amplitude_law()
    std::uint64_t seed = 0;
    /// Pencil row count used to check r <= min(n1, n2); nearly square when unset.
    std::optional<Index> n1;
};

/// Rejection rounds allowed before generate_signal gives up on separation.
inline constexpr int max_rejection_rounds = 10000;

double wrap_distance(double f1, double f2);

/// Evaluates sum_k d_k exp((2 pi i f_k - tau_k) t) for t = 0..n-1.
SpectralSignal make_signal(Index n, std::vector<Mode> modes);

SpectralSignal generate_signal(const SignalGenConfig& cfg);

SampleSet sample_indices(Index n, Index m, SamplingMode mode, std::uint64_t seed);

/// Hankel(x) = left * diag(amplitudes) * right^T.
struct VandermondeFactors {
    CMat left;  // n1 x r, column k = y_k^i
    CMat right; // n2 x r
    CVec amplitudes;
};

VandermondeFactors vandermonde_factors(const SpectralSignal& sig, const HankelShape& shape);

/// max(n1 / lambda_min(E_L^* E_L), n2 / lambda_min(E_R^* E_R)).
double incoherence_estimate(const SpectralSignal& sig, const HankelShape& shape);

} // namespace hankelrec
