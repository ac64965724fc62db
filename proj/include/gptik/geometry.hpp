#pragma once

#include <cstdint>
#include <vector>

#include "gptik/types.hpp"

namespace gptik::geometry {

/// Closed convex subset of R^d with an exact Euclidean projection.
///
/// Supported families:
///   Box              { x : lower <= x <= upper }         (componentwise clamp)
///   Ball             { x : |x - center| <= radius }      (radial scaling)
///   Simplex          { x : x_i >= 0, sum x_i = scale }   (sort-and-threshold)
///   Halfspace        { x : <normal, x> <= offset }
///   AffineHyperplane { x : <normal, x> == offset }
///   WholeSpace       R^d                                 (identity)
class ConvexSet {
 public:
  enum class Kind { box, ball, simplex, halfspace, affine_hyperplane, whole_space };

  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet simplex(Eigen::Index dim, double scale);
  static ConvexSet halfspace(Vector normal, double offset);
  static ConvexSet affine_hyperplane(Vector normal, double offset);
  static ConvexSet whole_space(Eigen::Index dim);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }

  /// Euclidean projection onto the set. Exact (closed form) for every family.
  /// Throws std::invalid_argument on dimension mismatch or non-finite input.
  Vector project(const Vector& x) const;

  /// True iff x violates each defining (in)equality of the set by at most tol.
  /// Violations are measured on the raw defining expressions:
  ///   box:        lower_i - x_i <= tol and x_i - upper_i <= tol
  ///   ball:       |x - center| - radius <= tol
  ///   simplex:    -x_i <= tol and |sum x_i - scale| <= tol
  ///   halfspace:  <normal, x> - offset <= tol
  ///   hyperplane: |<normal, x> - offset| <= tol
  /// Non-finite points are never contained.
  bool contains(const Vector& x, double tol) const;

  /// Deterministic pseudo-random points inside the set; the seed fully
  /// determines the result. Every returned point satisfies
  /// contains(p, 1e-12).
  std::vector<Vector> sample(std::uint64_t seed, int count) const;

  // Parameter accessors. Each is meaningful only for the matching kind.
  const Vector& lower() const { return a_; }
  const Vector& upper() const { return b_; }
  const Vector& center() const { return a_; }
  double radius() const { return scalar_; }
  double scale() const { return scalar_; }
  const Vector& normal() const { return a_; }
  double offset() const { return scalar_; }

 private:
  ConvexSet(Kind kind, Eigen::Index dim, Vector a, Vector b, double scalar)
      : kind_(kind), dim_(dim), a_(std::move(a)), b_(std::move(b)), scalar_(scalar) {}

  Kind kind_;
  Eigen::Index dim_;
  Vector a_;       // box lower / ball center / halfspace or hyperplane normal
  Vector b_;       // box upper
  double scalar_;  // ball radius / simplex scale / halfspace or hyperplane offset
};

/// Free-function form of ConvexSet::sample for harness code.
inline std::vector<Vector> support_sample(const ConvexSet& set, std::uint64_t seed, int count) {
  return set.sample(seed, count);
}

}  // namespace gptik::geometry
