#pragma once

#include "qstab/linalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qstab {

// y -> y^T P y + q^T y + r
struct QuadraticForm {
  SymMatrix P;
  Vector q;
  double r = 0.0;

  QuadraticForm() = default;
  explicit QuadraticForm(Index n) : P(n), q(Vector::Zero(n)) {}
  QuadraticForm(SymMatrix P_, Vector q_, double r_) : P(std::move(P_)), q(std::move(q_)), r(r_) {}

  Index dim() const { return P.n(); }
  double operator()(const Vector& y) const { return P.quad(y) + q.dot(y) + r; }
  Vector gradient(const Vector& y) const { return 2.0 * (P.mat() * y) + q; }
  SymMatrix hessian() const { return 2.0 * P; }
};

// x -> x^T H x + b
struct HomQuadratic {
  SymMatrix H;
  double b = 0.0;

  double operator()(const Vector& x) const { return H.quad(x) + b; }
  Vector gradient(const Vector& x) const { return 2.0 * (H.mat() * x); }
};

struct HomQCQP {
  Index N = 0;
  SymMatrix G;
  std::vector<HomQuadratic> constraints;
  std::optional<Index> hom_index;

  Index m() const { return static_cast<Index>(constraints.size()); }
  double objective(const Vector& x) const { return G.quad(x); }
  // Throws InvalidInput on inconsistent sizes, non-finite data, or all b = 0.
  void validate() const;
};

HomQCQP homogenize(const QuadraticForm& objective, const std::vector<QuadraticForm>& constraints);

SymMatrix lagrangian_hessian(const HomQCQP& p, const Vector& lambda);
// Rows are the gradients 2 H^i x.
Matrix constraint_jacobian(const HomQCQP& p, const Vector& x);

struct KktResiduals {
  double feas = 0.0;       // max_i |h^i(x)|
  double stat = 0.0;       // ||Q(lambda) x||
  double psd_slack = 0.0;  // min eig Q(lambda)
};
KktResiduals kkt_residuals(const HomQCQP& p, const Vector& x, const Vector& lambda);

struct AffineMultiplier {
  Vector mu;
  double residual = 0.0;  // ||J^T mu + grad_q||
};
// Least-norm mu with mu^T J = -grad_q^T.
AffineMultiplier affine_multiplier(const Vector& grad_q, const Matrix& J, double tol = 1e-12);

// lambda = (-g(x), mu); requires the z0^2 = 1 constraint first.
Vector lift_multiplier(const HomQCQP& p, const Vector& x, const Vector& mu);

// ---------------------------------------------------------------------------
// Parametric families

// Coordinates of x = (z0, z', y).
struct Layout {
  std::optional<Index> hom_index;
  std::vector<Index> aux;
  std::vector<Index> y;
};

// The affine problem in the coordinates of x with z0 removed.
struct AffineProblem {
  QuadraticForm objective;
  std::vector<QuadraticForm> constraints;
  Index local_dim = 0;         // dim of the variety at the points of interest
  bool nearest_point = false;  // objective is ||y - theta||^2 with no auxiliaries
};

struct GroundTruth {
  Vector theta;
  Vector x;
  bool degenerate = false;
};

struct OracleResult {
  double value = 0.0;
  Vector x;  // a homogeneous global minimizer
};

struct ParametricProblem {
  std::string name;
  Index d = 0;
  Layout layout;
  std::function<HomQCQP(const Vector&)> instantiate_fn;
  std::function<AffineProblem(const Vector&)> affine_view;  // may be empty
  bool theta_independent_feasible_set = false;
  std::function<GroundTruth(std::uint64_t)> ground_truth;                  // may be empty
  std::function<std::optional<OracleResult>(const Vector&)> oracle;         // may be empty
  std::function<std::vector<std::string>(const Vector&)> diagnostics;      // may be empty

  HomQCQP instantiate(const Vector& theta) const;
  std::vector<std::string> warnings(const Vector& theta) const;
};

}  // namespace qstab
