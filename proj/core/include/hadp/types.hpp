#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hadp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when dimensions, invariants or config values are inconsistent.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the closed-loop integration leaves the finite/bounded regime.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Axis-aligned box in R^d.
struct Box {
  Vector low;
  Vector high;

  Eigen::Index dim() const { return low.size(); }
  bool contains(const Box& other) const {
    return (low.array() <= other.low.array()).all() &&
           (high.array() >= other.high.array()).all();
  }
};

void require(bool condition, const std::string& message);

/// Largest singular value; the induced 2-norm.
double operator_norm(const Matrix& m);

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

}  // namespace hadp
