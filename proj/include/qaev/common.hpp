#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace qaev {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntVector = Vector<std::int32_t>;
using RealVector = Vector<double>;
using StateVector = Vector<std::complex<double>>;

// Largest n for which 2^n enumeration / state allocation is allowed by default.
inline constexpr int kDefaultCapacityBits = 24;

inline Index dimension(int n_bits) { return Index(1) << n_bits; }

// Error taxonomy; the CLI maps these onto distinct exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameters, malformed clauses, dimension mismatches, over-cap sizes.
struct ConfigError : Error {
    using Error::Error;
};

// Instance generation exhausted its restart budget.
struct GenerationError : Error {
    using Error::Error;
};

// Integration finished outside the norm-drift criterion.
struct AccuracyError : Error {
    using Error::Error;
};

// Step budget exhausted before reaching t = T.
struct BudgetError : Error {
    using Error::Error;
};

// Least-squares fit on degenerate input.
struct FitError : Error {
    using Error::Error;
};

// Time hunt hit the doubling cap without reaching the window.
struct HuntError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

inline void require_capacity(int n_bits, int cap_bits = kDefaultCapacityBits) {
    if (n_bits < 1 || n_bits > cap_bits)
        throw ConfigError("bit count " + std::to_string(n_bits) + " outside capacity [1, " +
                          std::to_string(cap_bits) + "]");
}

}  // namespace qaev
