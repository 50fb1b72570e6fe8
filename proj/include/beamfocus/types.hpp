#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace beamfocus {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
inline constexpr Scalar kPi = Scalar(3.141592653589793238462643383279502884L);

inline constexpr double kSpeedOfLight = 299792458.0;

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) { return deg * kPi<Scalar> / Scalar(180); }

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) { return rad * Scalar(180) / kPi<Scalar>; }

// Bad index, mismatched lengths, invalid construction arguments.
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotEllipseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractViolation(what);
}

}  // namespace detail

}  // namespace beamfocus
