#pragma once

// Shared numeric types, the error hierarchy and the deterministic RNG used
// across the library.

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hankelrec {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Raised when signal generation cannot satisfy its separation constraint.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Vandermonde factors are rank deficient (coincident poles).
class DegenerateSignalError : public Error {
public:
    using Error::Error;
};

/// A dense reference routine was asked to work beyond its size guard.
class OracleScaleError : public Error {
public:
    using Error::Error;
};

class UndefinedResidualError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

// Largest signal length for which the dense Hankel reference routines run.
inline constexpr Index dense_oracle_max_n = 4096;

/// SplitMix64-seeded xoshiro256** generator.  Distribution code is written
/// by hand so streams are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            s = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) {
                return x % bound;
            }
        }
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(two_pi * u2);
        has_spare_ = true;
        return rad * std::cos(two_pi * u2);
    }

    /// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
    cplx complex_normal() {
        const double s = std::sqrt(0.5);
        const double re = normal();
        return {s * re, s * normal()};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Mixes a base seed with a cell or trial key.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key) {
    std::uint64_t z = key + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return base ^ (z ^ (z >> 31));
}

} // namespace hankelrec
