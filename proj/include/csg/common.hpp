#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace csg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Absolute tolerance for best-response ties and simplex membership checks.
inline constexpr double kTieTol = 1e-9;

// Thrown when a configured budget (round count, enumeration cap, ...) would be
// exceeded; the CLI maps this to exit code 3.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on invalid configs / malformed inputs; CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace csg
