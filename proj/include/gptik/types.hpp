#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gptik {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// True iff every component of v is finite (no NaN, no +/-Inf).
inline bool is_finite(const Vector& v) { return v.allFinite(); }
inline bool is_finite(const Matrix& m) { return m.allFinite(); }

/// Validates that v has the expected dimension and only finite components.
/// `what` names the offending argument in the error message.
inline void require_vector(const Vector& v, Eigen::Index dim, const std::string& what) {
  if (v.size() != dim) {
    throw std::invalid_argument(what + ": dimension mismatch (got " + std::to_string(v.size()) +
                                ", expected " + std::to_string(dim) + ")");
  }
  if (!v.allFinite()) {
    throw std::invalid_argument(what + ": non-finite component");
  }
}

inline void require_finite(const Vector& v, const std::string& what) {
  if (v.size() < 1) throw std::invalid_argument(what + ": dimension must be >= 1");
  if (!v.allFinite()) throw std::invalid_argument(what + ": non-finite component");
}

}  // namespace gptik
