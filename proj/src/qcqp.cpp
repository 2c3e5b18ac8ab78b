#include "qstab/qcqp.hpp"

#include <cmath>

namespace qstab {

void HomQCQP::validate() const {
  if (N < 1) throw InvalidInput("HomQCQP: N must be positive");
  if (G.n() != N) throw InvalidInput("HomQCQP: objective has wrong size");
  if (!G.all_finite()) throw InvalidInput("HomQCQP: non-finite objective");
  if (hom_index && (*hom_index < 0 || *hom_index >= N)) throw InvalidInput("HomQCQP: hom_index out of range");
  bool some_b = false;
  for (const auto& c : constraints) {
    if (c.H.n() != N) throw InvalidInput("HomQCQP: constraint has wrong size");
    if (!c.H.all_finite() || !std::isfinite(c.b)) throw InvalidInput("HomQCQP: non-finite constraint");
    some_b = some_b || c.b != 0.0;
  }
  // x = 0 would be feasible; certificates are meaningless there.
  if (!some_b) throw InvalidInput("HomQCQP: every constraint has b = 0");
}

namespace {

SymMatrix lift(const QuadraticForm& f) {
  const Index n = f.dim();
  Matrix g = Matrix::Zero(n + 1, n + 1);
  g(0, 0) = f.r;
  g.block(0, 1, 1, n) = 0.5 * f.q.transpose();
  g.block(1, 0, n, 1) = 0.5 * f.q;
  g.bottomRightCorner(n, n) = f.P.mat();
  return SymMatrix(g);
}

}  // namespace

HomQCQP homogenize(const QuadraticForm& objective, const std::vector<QuadraticForm>& constraints) {
  const Index n = objective.dim();
  if (objective.q.size() != n) throw InvalidInput("homogenize: inconsistent objective");
  HomQCQP p;
  p.N = n + 1;
  p.hom_index = 0;
  p.G = lift(objective);
  SymMatrix e0(n + 1);
  e0.set(0, 0, 1.0);
  p.constraints.push_back({e0, -1.0});
  for (const auto& f : constraints) {
    if (f.dim() != n || f.q.size() != n) throw InvalidInput("homogenize: inconsistent constraint");
    p.constraints.push_back({lift(f), 0.0});
  }
  return p;
}

SymMatrix lagrangian_hessian(const HomQCQP& p, const Vector& lambda) {
  if (lambda.size() != p.m()) throw InvalidInput("lagrangian_hessian: multiplier length mismatch");
  SymMatrix Q = p.G;
  for (Index i = 0; i < p.m(); ++i)
    if (lambda(i) != 0.0) Q.axpy(lambda(i), p.constraints[i].H);
  return Q;
}

Matrix constraint_jacobian(const HomQCQP& p, const Vector& x) {
  if (x.size() != p.N) throw InvalidInput("constraint_jacobian: dimension mismatch");
  Matrix J(p.m(), p.N);
  for (Index i = 0; i < p.m(); ++i) J.row(i) = p.constraints[i].gradient(x).transpose();
  return J;
}

KktResiduals kkt_residuals(const HomQCQP& p, const Vector& x, const Vector& lambda) {
  if (x.size() != p.N) throw InvalidInput("kkt_residuals: dimension mismatch");
  KktResiduals r;
  for (const auto& c : p.constraints) r.feas = std::max(r.feas, std::abs(c(x)));
  SymMatrix Q = lagrangian_hessian(p, lambda);
  r.stat = (Q.mat() * x).norm();
  r.psd_slack = min_eig(Q);
  return r;
}

AffineMultiplier affine_multiplier(const Vector& grad_q, const Matrix& J, double tol) {
  if (J.cols() != grad_q.size()) throw InvalidInput("affine_multiplier: dimension mismatch");
  AffineMultiplier out;
  out.mu = -(pseudo_inverse(J.transpose(), tol) * grad_q);
  out.residual = (J.transpose() * out.mu + grad_q).norm();
  return out;
}

Vector lift_multiplier(const HomQCQP& p, const Vector& x, const Vector& mu) {
  if (mu.size() + 1 != p.m()) throw InvalidInput("lift_multiplier: multiplier length mismatch");
  Vector lambda(p.m());
  lambda(0) = -p.objective(x);
  lambda.tail(mu.size()) = mu;
  return lambda;
}

HomQCQP ParametricProblem::instantiate(const Vector& theta) const {
  if (theta.size() != d)
    throw InvalidInput(name + ": expected " + std::to_string(d) + " parameters, got " + std::to_string(theta.size()));
  require_finite(theta, "instantiate");
  HomQCQP p = instantiate_fn(theta);
  p.validate();
  return p;
}

std::vector<std::string> ParametricProblem::warnings(const Vector& theta) const {
  if (!diagnostics) return {};
  return diagnostics(theta);
}

}  // namespace qstab
