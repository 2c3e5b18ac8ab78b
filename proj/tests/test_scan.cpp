#include "qstab/registry.hpp"
#include "qstab/report.hpp"
#include "qstab/scan.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace qstab;

namespace {

ScanConfig twisted_slice(int steps1, int steps3, int workers) {
  ScanConfig c;
  c.axes = {{0, -1.0, 1.0, steps1}, {2, -1.5, 1.5, steps3}};
  c.derived = {{1, 0, 2.0, 1.0}};
  c.workers = workers;
  c.reproducible = true;
  return c;
}

std::string scan_csv(const ParametricProblem& fam, const ScanConfig& c) {
  std::ostringstream os;
  write_scan_csv(os, fam, c, run_scan(fam, c));
  return os.str();
}

std::string sweep_csv(const ParametricProblem& fam, const SweepConfig& c) {
  std::ostringstream os;
  write_sweep_csv(os, c, run_noise_sweep(fam, c));
  return os.str();
}

}  // namespace

TEST(ScanConfig, Validation) {
  ScanConfig c = twisted_slice(3, 3, 1);
  EXPECT_NO_THROW(c.validate(3));
  EXPECT_THROW(c.validate(4), InvalidInput);  // theta4 unassigned
  ScanConfig one = c;
  one.axes[0].steps = 1;
  EXPECT_THROW(one.validate(3), InvalidInput);
  ScanConfig twice = c;
  twice.fixed = {{2, 0.5}};
  EXPECT_THROW(twice.validate(3), InvalidInput);
  ScanConfig none;
  EXPECT_THROW(none.validate(3), InvalidInput);
  ScanConfig chain = c;
  chain.derived.push_back({1, 1, 1.0, 1.0});
  EXPECT_THROW(chain.validate(3), InvalidInput);
}

TEST(ScanConfig, RowMajorOrder) {
  ScanConfig c = twisted_slice(3, 5, 1);
  EXPECT_EQ(c.rows(), 15);
  Vector first = c.theta_at(0, 3), second = c.theta_at(1, 3), sixth = c.theta_at(5, 3);
  EXPECT_EQ(first(0), -1.0);
  EXPECT_EQ(first(2), -1.5);
  EXPECT_EQ(second(0), -1.0);  // first axis varies slowest
  EXPECT_EQ(second(2), -0.75);
  EXPECT_EQ(sixth(0), 0.0);
  EXPECT_EQ(sixth(1), 0.0);
  EXPECT_EQ(c.theta_at(14, 3)(1), 1.0);  // derived theta2 = theta1^2
}

TEST(Scan, SmokeGridHasNineRows) {
  ParametricProblem fam = twisted_cubic();
  ScanConfig c = twisted_slice(3, 3, 1);
  auto rows = run_scan(fam, c);
  EXPECT_EQ(rows.size(), 9u);
  std::string csv = scan_csv(fam, c);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "theta1,theta2,theta3,dval,pval_candidate,gap_rel,verdict,rank_S,nu2,solve_time");
  int n = 0;
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 9);
}

TEST(Scan, TimestampOnlyWhenNotReproducible) {
  ParametricProblem fam = twisted_cubic();
  ScanConfig c = twisted_slice(2, 2, 1);
  c.reproducible = false;
  EXPECT_EQ(scan_csv(fam, c).rfind("# twisted-cubic scan ", 0), 0u);
  c.reproducible = true;
  EXPECT_EQ(scan_csv(fam, c).rfind("theta1", 0), 0u);
}

TEST(Scan, OnCurveRowsTightAndNeighborsToo) {
  ParametricProblem fam = twisted_cubic();
  // theta3 axis chosen so that theta3 = theta1^3 lands on grid points
  ScanConfig c;
  c.axes = {{0, -1.0, 1.0, 5}, {2, -1.5, 1.5, 13}};
  c.derived = {{1, 0, 2.0, 1.0}};
  c.workers = 4;
  c.reproducible = true;
  auto rows = run_scan(fam, c);
  int on_curve = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vector& th = rows[i].theta;
    if (std::abs(th(2) - th(0) * th(0) * th(0)) > 1e-12) continue;
    ++on_curve;
    EXPECT_EQ(rows[i].cert.verdict, Verdict::certified_tight) << th.transpose();
    // neighbours along the theta3 axis
    const std::size_t j = i % 13;
    if (j > 0) EXPECT_EQ(rows[i - 1].cert.verdict, Verdict::certified_tight) << rows[i - 1].theta.transpose();
    if (j < 12) EXPECT_EQ(rows[i + 1].cert.verdict, Verdict::certified_tight) << rows[i + 1].theta.transpose();
  }
  EXPECT_GE(on_curve, 3);  // theta1 in {-1, 0, 1}
}

TEST(Scan, WorkerCountDoesNotChangeOutput) {
  ParametricProblem fam = twisted_cubic();
  ScanConfig a = twisted_slice(5, 5, 1), b = twisted_slice(5, 5, 4);
  a.guaranteed_column = b.guaranteed_column = true;
  EXPECT_EQ(scan_csv(fam, a), scan_csv(fam, b));
  EXPECT_EQ(scan_csv(fam, b), scan_csv(fam, b));
}

TEST(Scan, BallColumns) {
  ParametricProblem fam = twisted_cubic();
  ScanConfig c = twisted_slice(3, 3, 1);
  c.base_points = {Vector::Zero(3)};
  c.guaranteed_column = true;
  auto rows = run_scan(fam, c);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.in_ball);
    ASSERT_TRUE(r.guaranteed);
    EXPECT_EQ(*r.in_ball, r.theta.norm() < 0.5);
  }
  std::string csv = scan_csv(fam, c);
  EXPECT_NE(csv.find(",in_ball,guaranteed\n"), std::string::npos);
  ScanConfig bad = c;
  bad.base_points = {Vector::Zero(2)};
  EXPECT_THROW(run_scan(fam, bad), InvalidInput);
}

TEST(Sweep, NoiselessRotationSync) {
  ParametricProblem fam = make_problem("rotation-sync");
  SweepConfig c;
  c.sigmas = {0.0};
  c.trials = 5;
  c.seed = 7;
  auto rows = run_noise_sweep(fam, c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].tight_fraction, 1.0);
  EXPECT_LE(rows[0].mean_recovery_error, 1e-6);
  EXPECT_EQ(rows[0].trials, 5);
}

TEST(Sweep, SingleTrialBitExact) {
  ParametricProblem fam = make_problem("rotation-sync");
  SweepConfig c;
  c.sigmas = {0.05};
  c.trials = 1;
  c.seed = 99;
  c.reproducible = true;
  EXPECT_EQ(sweep_csv(fam, c), sweep_csv(fam, c));
}

TEST(Sweep, WorkersAndRerunsIdentical) {
  ParametricProblem fam = make_problem("edm-1d");
  SweepConfig a;
  a.sigmas = {0.0, 1e-3};
  a.trials = 12;
  a.seed = 42;
  a.reproducible = true;
  SweepConfig b = a;
  b.workers = 4;
  const std::string s1 = sweep_csv(fam, a);
  EXPECT_EQ(s1, sweep_csv(fam, b));
  EXPECT_EQ(sweep_csv(fam, b), sweep_csv(fam, b));
  EXPECT_EQ(s1.rfind("sigma,trials,tight_fraction,mean_gap_rel,mean_recovery_error\n", 0), 0u);
}

TEST(Sweep, RegressionTrendRotationSync) {
  // tight fraction does not increase with noise on this grid
  ParametricProblem fam = make_problem("rotation-sync");
  SweepConfig c;
  c.sigmas = {0.0, 0.01, 0.05, 0.1};
  c.trials = 20;
  c.seed = 1;
  c.workers = 4;
  auto rows = run_noise_sweep(fam, c);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].tight_fraction, 1.0);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].tight_fraction, rows[i - 1].tight_fraction);
}

TEST(Sweep, InputErrors) {
  SweepConfig c;
  c.sigmas = {0.1};
  c.trials = 0;
  EXPECT_THROW(run_noise_sweep(twisted_cubic(), c), InvalidInput);
  c.trials = 1;
  c.sigmas = {};
  EXPECT_THROW(run_noise_sweep(twisted_cubic(), c), InvalidInput);
  c.sigmas = {-1.0};
  EXPECT_THROW(run_noise_sweep(twisted_cubic(), c), InvalidInput);
}

TEST(Registry, NamesAndErrors) {
  const auto& reg = registered_problems();
  EXPECT_GE(reg.size(), 10u);
  for (const auto& e : reg) {
    ParametricProblem fam = make_problem(e.name);
    EXPECT_EQ(fam.name, e.name);
    EXPECT_GT(fam.d, 0);
  }
  EXPECT_THROW(make_problem("no-such-problem"), InvalidInput);
  EXPECT_THROW(make_problem("rank-one", {{"shape", "x"}}), InvalidInput);
  EXPECT_THROW(make_problem("twisted-cubic", {{"unknown", 1}}), InvalidInput);
  ParametricProblem r = make_problem("rank-one", {{"shape", {3, 2}}});
  EXPECT_EQ(r.d, 6);
  ParametricProblem s = make_problem("rotation-sync", {{"vertices", 4}, {"edges", {{0, 1}, {1, 2}, {2, 3}}}, {"d", 3}});
  EXPECT_EQ(s.d, 3 * 9);
}

TEST(Report, NumbersAndCertificate) {
  EXPECT_EQ(json_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(json_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(json_number(std::nan("")), "nan");
  EXPECT_EQ(json_number(1.5), 1.5);
  EXPECT_EQ(format_number(0.5), "5.000000000000e-01");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  GapCertificate c = certify_gap(twisted_cubic(), Vector::Ones(3));
  nlohmann::json j = certificate_to_json(c, false);
  EXPECT_EQ(j["verdict"], "certified_tight");
  EXPECT_FALSE(j.contains("solve_seconds"));
  EXPECT_EQ(j["x_hat"].size(), 4u);
  EXPECT_EQ(j["lambda"].size(), 3u);
  EXPECT_TRUE(certificate_to_json(c, true).contains("solve_seconds"));
}
