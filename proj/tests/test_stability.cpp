#include "qstab/problems.hpp"
#include "qstab/stability.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qstab;

namespace {

Vector cusp_point(double t) {
  Vector x(4);
  x << 1, t, t * t, t * t * t;
  return x;
}

Vector cusp_theta(double t) {
  Vector th(2);
  th << t * t, t * t * t;
  return th;
}

std::vector<Index> z_block(const ParametricProblem& fam) {
  std::vector<Index> z{*fam.layout.hom_index};
  for (Index a : fam.layout.aux) z.push_back(a);
  return z;
}

}  // namespace

TEST(Acq, TwistedCubicAtOrigin) {
  Matrix J(2, 3);
  J << 0, 1, 0, 0, 0, 1;
  AcqResult a = check_acq(J, 1);
  EXPECT_EQ(a.s, 2);
  EXPECT_NEAR(a.sigma_s, 1.0, 1e-14);
  EXPECT_TRUE(a.holds);
}

TEST(Acq, DoubleLineFails) {
  // f = (y1 - y2)^2 has zero gradient on its zero set
  Matrix J = Matrix::Zero(1, 2);
  EXPECT_FALSE(check_acq(J, 1).holds);
}

TEST(Acq, Sphere) {
  Matrix J = Matrix::Zero(1, 3);
  J(0, 0) = 2.0;
  AcqResult a = check_acq(J, 2);
  EXPECT_NEAR(a.sigma_s, 2.0, 1e-14);
  EXPECT_TRUE(a.holds);
}

TEST(Acq, ExtraRankFails) {
  EXPECT_FALSE(check_acq(Matrix::Identity(3, 3), 1).holds);
  EXPECT_THROW(check_acq(Matrix::Identity(3, 3), 4), InvalidInput);
  EXPECT_THROW(check_acq(Matrix::Identity(3, 3), -1), InvalidInput);
}

TEST(OperatorNormM, Examples) {
  EXPECT_NEAR(operator_norm_M({2.0 * SymMatrix::identity(2)}), std::sqrt(2.0), 1e-14);
  EXPECT_EQ(operator_norm_M({SymMatrix(3), SymMatrix(3)}), 0.0);
  SymMatrix H1(3), H2(3);
  H1.set(0, 0, -2.0);       // Hessian of y2 - y1^2
  H2.set(0, 1, -1.0);       // Hessian of y3 - y1 y2
  EXPECT_NEAR(operator_norm_M({H1, H2}), 1.0, 1e-14);
}

TEST(OperatorNormM, MatchesDirectMaximization) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> nd;
  std::vector<SymMatrix> hs{oracle::random_sym(rng, 3), oracle::random_sym(rng, 3)};
  const double M = operator_norm_M(hs);
  double best = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double a = 2.0 * M_PI * k / 20000;
    Matrix S = 0.5 * (std::cos(a) * hs[0].mat() + std::sin(a) * hs[1].mat());
    best = std::max(best, S.norm());
  }
  EXPECT_NEAR(M, best, 1e-6);
}

TEST(Radius, CorollaryAndTheoremAgree) {
  RadiusInputs c;
  c.sigma_s = 1.0;
  c.M = 1.0;
  EXPECT_NEAR(stability_radius(c, RadiusMode::corollary).value, 0.5, 1e-15);
  const double s = 0.7, M = 1.3;
  RadiusInputs t;
  t.nu2 = 1.0;
  t.K = 2.0 / s;
  t.L = 0.0;
  t.M = M;
  c.sigma_s = s;
  c.M = M;
  EXPECT_NEAR(stability_radius(t, RadiusMode::theorem).value, stability_radius(c, RadiusMode::corollary).value,
              1e-15);
}

TEST(Radius, DegenerateAndMissing) {
  RadiusInputs t;
  t.nu2 = 0.5;
  t.K = 0.0;
  t.L = 0.0;
  t.M = 2.0;
  Radius r = stability_radius(t, RadiusMode::theorem);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(std::isinf(r.value));
  RadiusInputs missing;
  missing.M = 1.0;
  EXPECT_THROW(stability_radius(missing, RadiusMode::theorem), InvalidInput);
  EXPECT_THROW(stability_radius(missing, RadiusMode::corollary), InvalidInput);
}

TEST(RestrictionMatrix, CuspidalClosedForm) {
  ParametricProblem fam = cuspidal_cubic();
  for (double t : {0.5, 1.0, 2.0, -1.3}) {
    HomQCQP p = fam.instantiate(cusp_theta(t));
    Vector mu(4);
    mu << 0, t, -t * t, -1;
    SymMatrix A = restriction_matrix_A(p, mu, z_block(fam), nearest_point_shift(fam.layout, cusp_point(t)));
    Matrix E(2, 2);
    E << std::pow(t, 4), -std::pow(t, 3), -std::pow(t, 3), t * t;
    EXPECT_LE((A.mat() - E).cwiseAbs().maxCoeff(), 1e-12 * (1 + E.norm()));
  }
}

TEST(RestrictionMatrix, ZeroMultiplierAndLinearity) {
  ParametricProblem fam = cuspidal_cubic();
  HomQCQP p = fam.instantiate(cusp_theta(0.8));
  Vector shift = nearest_point_shift(fam.layout, cusp_point(0.8));
  EXPECT_TRUE(restriction_matrix_A(p, Vector::Zero(4), z_block(fam), shift).is_zero());
  std::mt19937_64 rng(3);
  Vector m1 = oracle::gaussian(rng, 4, 1), m2 = oracle::gaussian(rng, 4, 1);
  const double a = 1.7, b = -0.4;
  Matrix lhs = restriction_matrix_A(p, a * m1 + b * m2, z_block(fam), shift).mat();
  Matrix rhs = a * restriction_matrix_A(p, m1, z_block(fam), shift).mat() +
               b * restriction_matrix_A(p, m2, z_block(fam), shift).mat();
  EXPECT_LE((lhs - rhs).norm(), 1e-12);
  EXPECT_THROW(restriction_matrix_A(p, Vector::Zero(3), z_block(fam)), InvalidInput);
  EXPECT_THROW(restriction_matrix_A(p, Vector::Zero(4), {0, 0}), InvalidInput);
  EXPECT_THROW(restriction_matrix_A(p, Vector::Zero(4), {7}), InvalidInput);
}

TEST(RestrictedSlater, CuspidalHolds) {
  ParametricProblem fam = cuspidal_cubic();
  HomQCQP p = fam.instantiate(cusp_theta(1.0));
  SymMatrix Qbar = lagrangian_hessian(p, Vector::Zero(4));
  RestrictedSlater rs = restricted_slater(p, cusp_point(1.0), Qbar);
  EXPECT_TRUE(rs.holds);
  EXPECT_EQ(rs.V_dim, 1);
  EXPECT_GT(rs.t_star, 1e-7);
  // the witness is a valid direction
  SymMatrix B(4);
  for (Index i = 0; i < 4; ++i) B.axpy(rs.mu_star(i), p.constraints[i].H);
  EXPECT_LE((B.mat() * cusp_point(1.0)).norm(), 1e-6);
  EXPECT_LE(rs.mu_star.cwiseAbs().maxCoeff(), 1.0 + 1e-6);
}

TEST(RestrictedSlater, BadFormulationFails) {
  ParametricProblem fam = twisted_cubic_bad();
  GroundTruth g = fam.ground_truth(5);
  HomQCQP p = fam.instantiate(g.theta);
  RestrictedSlater rs = restricted_slater(p, g.x, lagrangian_hessian(p, Vector::Zero(p.m())));
  EXPECT_FALSE(rs.holds);
  EXPECT_FALSE(rs.inconclusive);
}

TEST(RestrictedSlater, VacuousForCorankOne) {
  ParametricProblem fam = twisted_cubic();
  HomQCQP p = fam.instantiate(Vector::Ones(3));
  RestrictedSlater rs = restricted_slater(p, Vector::Ones(4), lagrangian_hessian(p, Vector::Zero(3)));
  EXPECT_TRUE(rs.holds);
  EXPECT_EQ(rs.V_dim, 0);
  EXPECT_TRUE(std::isinf(rs.t_star));
}

TEST(RestrictedKernel, OrthogonalToPoint) {
  ParametricProblem fam = cuspidal_cubic();
  HomQCQP p = fam.instantiate(cusp_theta(0.5));
  SymMatrix Qbar = lagrangian_hessian(p, Vector::Zero(4));
  Matrix V = restricted_kernel_basis(Qbar, cusp_point(0.5));
  ASSERT_EQ(V.cols(), 1);
  EXPECT_LE((Qbar.mat() * V).norm(), 1e-12);
  EXPECT_LE(std::abs(cusp_point(0.5).dot(V.col(0))), 1e-12);
}

TEST(Finsler, Examples) {
  Vector a(2), b(2);
  a << 0, 1;
  b << 1, 0;
  FinslerResult r = finsler_perturb(SymMatrix::diag(a), SymMatrix::diag(b));
  EXPECT_TRUE(r.found);
  EXPECT_NEAR(r.t, 1e-8, 1e-20);
  b << -1, 1;
  EXPECT_THROW(finsler_perturb(SymMatrix::diag(a), SymMatrix::diag(b)), FinslerHypothesisViolated);
  a << -1, 1;
  EXPECT_THROW(finsler_perturb(SymMatrix::diag(a), SymMatrix::identity(2)), InvalidInput);
}

TEST(Finsler, GridValues) {
  FinslerGrid g;
  std::vector<double> v = g.values();
  ASSERT_EQ(v.size(), 50u);
  EXPECT_NEAR(v.front(), 1e-8, 1e-22);
  EXPECT_EQ(v.back(), 1.0);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]);
  g.points = 0;
  EXPECT_THROW(g.values(), InvalidInput);
}

TEST(PerturbMultiplier, CuspidalBecomesCorankOne) {
  ParametricProblem fam = cuspidal_cubic();
  HomQCQP p = fam.instantiate(cusp_theta(1.0));
  Vector mu(4);
  mu << 0, 1, -1, -1;
  MultiplierPerturbation mp = perturb_multiplier(p, cusp_point(1.0), Vector::Zero(4), mu);
  EXPECT_TRUE(mp.corank_one);
  EXPECT_GT(mp.t, 0.0);
  EXPECT_LE(mp.t, 1.0);
  CorankCheck cc = check_corank_one(lagrangian_hessian(p, mp.lambda));
  EXPECT_TRUE(cc.is_corank_one);
  // lambda_bar alone has corank two
  EXPECT_FALSE(check_corank_one(lagrangian_hessian(p, Vector::Zero(4))).is_corank_one);
}

TEST(PerturbMultiplier, RejectsNonTangentDirection) {
  ParametricProblem fam = cuspidal_cubic();
  HomQCQP p = fam.instantiate(cusp_theta(1.0));
  Vector mu(4);
  mu << 1, 0, 0, 0;
  EXPECT_THROW(perturb_multiplier(p, cusp_point(1.0), Vector::Zero(4), mu), InvalidInput);
}

TEST(BranchPoint, CuspAtOrigin) {
  ParametricProblem fam = cuspidal_cubic();
  HomQCQP p = fam.instantiate(cusp_theta(0.0));
  SymMatrix Qbar = lagrangian_hessian(p, Vector::Zero(4));
  Matrix J = constraint_jacobian(p, cusp_point(0.0));
  EXPECT_TRUE(branch_point_check(J, Qbar).is_branch_point);
  EXPECT_FALSE(regularity_matrix_check(J, Qbar));
}

TEST(BranchPoint, CorankOneNotBranch) {
  ParametricProblem fam = twisted_cubic();
  HomQCQP p = fam.instantiate(Vector::Ones(3));
  SymMatrix Qbar = lagrangian_hessian(p, Vector::Zero(3));
  Matrix J = constraint_jacobian(p, Vector::Ones(4));
  EXPECT_FALSE(branch_point_check(J, Qbar).is_branch_point);
  EXPECT_TRUE(regularity_matrix_check(J, Qbar));
}

TEST(BranchPoint, NearestPointLiftInjectivity) {
  // cuspidal lift at t = 1: grad_z1 f = (-y1, -2 z1, y2) at (1,1,1) is nonzero
  ParametricProblem fam = cuspidal_cubic();
  HomQCQP p = fam.instantiate(cusp_theta(1.0));
  Matrix J = constraint_jacobian(p, cusp_point(1.0));
  Vector gz = J.col(1).tail(3);
  EXPECT_GT(gz.norm(), 0.5);
  EXPECT_FALSE(branch_point_check(J, lagrangian_hessian(p, Vector::Zero(4))).is_branch_point);
}

TEST(BranchPoint, AgreesWithKernelIntersection) {
  std::mt19937_64 rng(90);
  for (int k = 0; k < 20; ++k) {
    const Index n = 5;
    // planted common kernel vector on even trials
    Vector v = oracle::gaussian(rng, n, 1);
    v.normalize();
    Matrix P = Matrix::Identity(n, n) - v * v.transpose();
    Matrix J = oracle::gaussian(rng, 2, n);
    Matrix R = oracle::gaussian(rng, n, n);
    Matrix Q = R * R.transpose();
    const bool planted = k % 2 == 0;
    if (planted) {
      J = J * P;
      Q = P * Q * P;
    }
    SymMatrix Qs(Q);
    BranchPoint bp = branch_point_check(J, Qs);
    // direct: smallest ||Q w|| over unit w in ker J
    Matrix T = null_space(J);
    Vector sv = singular_values(Q * T);
    const bool direct = sv(sv.size() - 1) <= 1e-7 * std::max(1.0, spectral_norm(Q));
    EXPECT_EQ(bp.is_branch_point, direct);
    EXPECT_EQ(bp.is_branch_point, planted);
    EXPECT_EQ(regularity_matrix_check(J, Qs), !planted);
  }
}

TEST(Regularity, DuplicatedRowsStillPass) {
  ParametricProblem fam = twisted_cubic();
  HomQCQP p = fam.instantiate(Vector::Ones(3));
  Matrix J = constraint_jacobian(p, Vector::Ones(4));
  Matrix J2(J.rows() + 1, J.cols());
  J2 << J, J.row(1);
  EXPECT_TRUE(regularity_matrix_check(J2, lagrangian_hessian(p, Vector::Zero(3))));
}

TEST(R2, Declarations) {
  EXPECT_EQ(assess_R2(twisted_cubic()), R2Status::holds_by_declaration);
  EXPECT_EQ(assess_R2(cuspidal_cubic()), R2Status::holds_by_declaration);
  GraphSpec tri{3, {{0, 1}, {1, 2}, {0, 2}}};
  EXPECT_EQ(assess_R2(rotation_sync(tri, 2)), R2Status::holds_by_declaration);
  ParametricProblem fam = twisted_cubic();
  fam.theta_independent_feasible_set = false;
  EXPECT_EQ(assess_R2(fam), R2Status::unknown);
}

TEST(AssessStability, TwistedCubicOrigin) {
  ParametricProblem fam = twisted_cubic();
  Vector x = Vector::Zero(4);
  x(0) = 1.0;
  StabilityReport r = assess_stability(fam, Vector::Zero(3), x, Vector::Zero(3));
  ASSERT_TRUE(r.acq);
  EXPECT_NEAR(r.acq->sigma_s, 1.0, 1e-12);
  EXPECT_NEAR(r.M, 1.0, 1e-12);
  ASSERT_TRUE(r.radius_cor);
  EXPECT_NEAR(r.radius_cor->value, 0.5, 1e-12);
  EXPECT_TRUE(r.rs.holds);
  EXPECT_FALSE(r.branch_point.is_branch_point);
  EXPECT_TRUE(r.regularity_matrix_full_rank);
  auto cr = corollary_radius_at(fam, Vector::Zero(3));
  ASSERT_TRUE(cr);
  EXPECT_NEAR(cr->value, 0.5, 1e-12);
}

TEST(AssessStability, TheoremRadiusNeedsConstants) {
  ParametricProblem fam = twisted_cubic();
  StabilityOptions o;
  o.K = 2.0;
  o.L = 0.5;
  StabilityReport r = assess_stability(fam, Vector::Ones(3), Vector::Ones(4), Vector::Zero(3), o);
  ASSERT_TRUE(r.radius_thm);
  EXPECT_NEAR(r.radius_thm->value, r.nu2 / (2.0 * r.M + 0.5), 1e-12);
  StabilityReport q = assess_stability(fam, Vector::Ones(3), Vector::Ones(4), Vector::Zero(3));
  EXPECT_FALSE(q.radius_thm);
}
