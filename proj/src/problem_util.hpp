#pragma once

#include "qstab/problems.hpp"

#include <random>
#include <string>

namespace qstab::detail {

using Rng = std::mt19937_64;

inline Vector gaussian(Rng& rng, Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Haar-ish random rotation (det = +1) from a QR factorization.
Matrix random_rotation(Rng& rng, Index d);
// n x k matrix with orthonormal columns.
Matrix random_stiefel(Rng& rng, Index n, Index k);

// Quadratic form ||L y + c||^2.
QuadraticForm least_squares_form(const Matrix& L, const Vector& c);

// Nearest-point family min ||y - theta z0||^2 over the affine coordinates
// (z', y) subject to the given affine constraints; y_coords lists which affine
// coordinates are tied to theta (in theta order).
struct NearestPointSpec {
  std::string name;
  Index n_affine = 0;
  std::vector<Index> y_coords;
  std::vector<QuadraticForm> constraints;
  Index local_dim = 0;
};
ParametricProblem make_nearest_point(const NearestPointSpec& spec);

// Layout for x = (z0, affine coordinates) given which affine coordinates are y.
Layout lifted_layout(Index n_affine, const std::vector<Index>& y_coords);

}  // namespace qstab::detail
