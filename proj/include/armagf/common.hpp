#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace armagf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base class for numerical-domain failures callers are expected to handle.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The rational denominator 1 + c_Q'(lambda) alpha came too close to zero.
class DegenerateDenominatorError : public Error {
public:
  using Error::Error;
};

/// A previous iterate violates the stability constraint it was certified against.
class InfeasibleIterateError : public Error {
public:
  using Error::Error;
};

/// The assembled quadratic has no usable spectrum (grid too sparse or all weights zero).
class RankDeficiencyError : public Error {
public:
  using Error::Error;
};

// Reports never emit -inf; anything quieter than this is clamped.
inline constexpr double kDbFloor = -300.0;

/// 20*log10|h|, floored at kDbFloor.
inline double amplitude_db(double h) {
  return std::max(20.0 * std::log10(std::abs(h)), kDbFloor);
}

/// 10*log10(e) for a nonnegative power/energy quantity, floored at kDbFloor.
inline double power_db(double e) {
  return std::max(10.0 * std::log10(e), kDbFloor);
}

}  // namespace armagf
