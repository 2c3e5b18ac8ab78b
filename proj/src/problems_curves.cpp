#include "problem_util.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace qstab {
namespace detail {

Matrix random_rotation(Rng& rng, Index d) {
  Matrix R = random_stiefel(rng, d, d);
  if (R.determinant() < 0) R.col(0) *= -1.0;
  return R;
}

Matrix random_stiefel(Rng& rng, Index n, Index k) {
  Matrix G(n, k);
  for (Index j = 0; j < k; ++j) G.col(j) = gaussian(rng, n);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, k);
  Matrix R = qr.matrixQR().topLeftCorner(k, k);
  for (Index j = 0; j < k; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

QuadraticForm least_squares_form(const Matrix& L, const Vector& c) {
  return QuadraticForm(SymMatrix(Matrix(L.transpose() * L)), 2.0 * L.transpose() * c, c.squaredNorm());
}

Layout lifted_layout(Index n_affine, const std::vector<Index>& y_coords) {
  Layout l;
  l.hom_index = 0;
  std::vector<bool> is_y(n_affine, false);
  for (Index j : y_coords) is_y[j] = true;
  for (Index j = 0; j < n_affine; ++j)
    if (!is_y[j]) l.aux.push_back(j + 1);
  for (Index j : y_coords) l.y.push_back(j + 1);
  return l;
}

ParametricProblem make_nearest_point(const NearestPointSpec& spec) {
  ParametricProblem fam;
  fam.name = spec.name;
  fam.d = static_cast<Index>(spec.y_coords.size());
  fam.layout = lifted_layout(spec.n_affine, spec.y_coords);
  fam.theta_independent_feasible_set = true;
  auto objective = [spec](const Vector& theta) {
    QuadraticForm obj(spec.n_affine);
    for (std::size_t k = 0; k < spec.y_coords.size(); ++k) {
      const Index j = spec.y_coords[k];
      obj.P.add_monomial(j, j, 1.0);
      obj.q(j) = -2.0 * theta(static_cast<Index>(k));
    }
    obj.r = theta.squaredNorm();
    return obj;
  };
  fam.instantiate_fn = [spec, objective](const Vector& theta) {
    HomQCQP p = homogenize(objective(theta), spec.constraints);
    return p;
  };
  fam.affine_view = [spec, objective](const Vector& theta) {
    AffineProblem av;
    av.objective = objective(theta);
    av.constraints = spec.constraints;
    av.local_dim = spec.local_dim;
    av.nearest_point = static_cast<Index>(spec.y_coords.size()) == spec.n_affine;
    return av;
  };
  return fam;
}

}  // namespace detail

using detail::NearestPointSpec;
using detail::Rng;

namespace {

double min_over_roots(const std::vector<double>& dcoef, const std::function<double(double)>& phi, double& t_best) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> cand = real_roots(dcoef);
  cand.push_back(0.0);
  for (double t : cand) {
    double v = phi(t);
    if (v < best) {
      best = v;
      t_best = t;
    }
  }
  return best;
}

}  // namespace

std::pair<double, double> twisted_cubic_nearest(const Vector& theta) {
  const double a = theta(0), b = theta(1), c = theta(2);
  auto phi = [&](double t) {
    return (t - a) * (t - a) + (t * t - b) * (t * t - b) + (t * t * t - c) * (t * t * t - c);
  };
  double t = 0.0;
  double v = min_over_roots({-a, 1.0 - 2.0 * b, -3.0 * c, 2.0, 0.0, 3.0}, phi, t);
  return {t, v};
}

ParametricProblem twisted_cubic() {
  NearestPointSpec s;
  s.name = "twisted-cubic";
  s.n_affine = 3;
  s.y_coords = {0, 1, 2};
  QuadraticForm f1(3), f2(3);
  f1.P.add_monomial(0, 0, -1.0);  // y2 - y1^2
  f1.q(1) = 1.0;
  f2.P.add_monomial(0, 1, -1.0);  // y3 - y1 y2
  f2.q(2) = 1.0;
  s.constraints = {f1, f2};
  s.local_dim = 1;
  ParametricProblem fam = detail::make_nearest_point(s);
  fam.ground_truth = [](std::uint64_t seed) {
    Rng rng(seed);
    const double t = detail::uniform(rng, -2.0, 2.0);
    GroundTruth g;
    g.theta = Vector(3);
    g.theta << t, t * t, t * t * t;
    g.x = Vector(4);
    g.x << 1.0, g.theta;
    return g;
  };
  fam.oracle = [](const Vector& theta) -> std::optional<OracleResult> {
    auto [t, v] = twisted_cubic_nearest(theta);
    OracleResult r;
    r.value = v;
    r.x = Vector(4);
    r.x << 1.0, t, t * t, t * t * t;
    return r;
  };
  return fam;
}

ParametricProblem twisted_cubic_bad() {
  // x = (z0, z1, z2, y1, y2, y3);  affine coordinates (z1, z2, y1, y2, y3)
  NearestPointSpec s;
  s.name = "twisted-cubic-bad";
  s.n_affine = 5;
  s.y_coords = {2, 3, 4};
  QuadraticForm circle(5);
  circle.P.add_monomial(0, 0, 1.0);
  circle.P.add_monomial(1, 1, 1.0);
  circle.r = -1.0;
  s.constraints.push_back(circle);
  // (z1 z2) [[z0, y1, y2], [y1, y2, y3]] = 0
  QuadraticForm c0(5), c1(5), c2(5);
  c0.q(0) = 1.0;
  c0.P.add_monomial(1, 2, 1.0);
  c1.P.add_monomial(0, 2, 1.0);
  c1.P.add_monomial(1, 3, 1.0);
  c2.P.add_monomial(0, 3, 1.0);
  c2.P.add_monomial(1, 4, 1.0);
  s.constraints.insert(s.constraints.end(), {c0, c1, c2});
  s.local_dim = 1;
  ParametricProblem fam = detail::make_nearest_point(s);
  auto lift = [](double t) {
    Vector x(6);
    const double r = std::sqrt(1.0 + t * t);
    x << 1.0, t / r, -1.0 / r, t, t * t, t * t * t;
    return x;
  };
  fam.ground_truth = [lift](std::uint64_t seed) {
    Rng rng(seed);
    const double t = detail::uniform(rng, -2.0, 2.0);
    GroundTruth g;
    g.x = lift(t);
    g.theta = g.x.tail(3);
    return g;
  };
  fam.oracle = [lift](const Vector& theta) -> std::optional<OracleResult> {
    auto [t, v] = twisted_cubic_nearest(theta);
    return OracleResult{v, lift(t)};
  };
  return fam;
}

ParametricProblem cuspidal_cubic() {
  // x = (z0, z1, y1, y2); affine coordinates (z1, y1, y2)
  NearestPointSpec s;
  s.name = "cuspidal-cubic";
  s.n_affine = 3;
  s.y_coords = {1, 2};
  QuadraticForm h1(3), h2(3), h3(3);
  h1.q(2) = 1.0;  // y2 z0 - y1 z1
  h1.P.add_monomial(0, 1, -1.0);
  h2.q(1) = 1.0;  // y1 z0 - z1^2
  h2.P.add_monomial(0, 0, -1.0);
  h3.P.add_monomial(0, 2, 1.0);  // y2 z1 - y1^2
  h3.P.add_monomial(1, 1, -1.0);
  s.constraints = {h1, h2, h3};
  s.local_dim = 1;
  ParametricProblem fam = detail::make_nearest_point(s);
  fam.ground_truth = [](std::uint64_t seed) {
    Rng rng(seed);
    const double t = detail::uniform(rng, -2.0, 2.0);
    GroundTruth g;
    g.theta = Vector(2);
    g.theta << t * t, t * t * t;
    g.x = Vector(4);
    g.x << 1.0, t, t * t, t * t * t;
    return g;
  };
  fam.oracle = [](const Vector& theta) -> std::optional<OracleResult> {
    const double a = theta(0), b = theta(1);
    auto phi = [&](double t) { return std::pow(t * t - a, 2) + std::pow(t * t * t - b, 2); };
    double t = 0.0;
    double v = min_over_roots({0.0, -2.0 * a, -3.0 * b, 2.0, 0.0, 3.0}, phi, t);
    OracleResult r;
    r.value = v;
    r.x = Vector(4);
    r.x << 1.0, t, t * t, t * t * t;
    return r;
  };
  return fam;
}

namespace {

// Row-major multi-index helpers.
std::vector<Index> unravel(Index flat, const std::vector<Index>& shape) {
  std::vector<Index> idx(shape.size());
  for (Index k = static_cast<Index>(shape.size()) - 1; k >= 0; --k) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  return idx;
}

Index ravel(const std::vector<Index>& idx, const std::vector<Index>& shape) {
  Index flat = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) flat = flat * shape[k] + idx[k];
  return flat;
}

}  // namespace

ParametricProblem rank_one_approximation(const std::vector<Index>& shape) {
  if (shape.size() < 2) throw InvalidInput("rank_one_approximation: need at least two modes");
  Index total = 1;
  for (Index s : shape) {
    if (s < 1) throw InvalidInput("rank_one_approximation: empty mode");
    total *= s;
  }
  if (total > 64) throw InvalidInput("rank_one_approximation: more than 64 entries");

  // Unordered monomial pairs -> coefficient, sign-normalized for deduplication.
  using Poly = std::map<std::pair<Index, Index>, double>;
  std::set<std::vector<std::pair<std::pair<Index, Index>, double>>> seen;
  std::vector<QuadraticForm> minors;
  auto mono = [](Index a, Index b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (std::size_t mode = 0; mode < shape.size(); ++mode) {
    const Index rows = shape[mode];
    const Index cols = total / rows;
    auto entry = [&](Index r, Index c) {
      // c enumerates the remaining modes in row-major order
      std::vector<Index> rest_shape;
      for (std::size_t k = 0; k < shape.size(); ++k)
        if (k != mode) rest_shape.push_back(shape[k]);
      std::vector<Index> rest = unravel(c, rest_shape);
      std::vector<Index> idx;
      for (std::size_t k = 0, q = 0; k < shape.size(); ++k) idx.push_back(k == mode ? r : rest[q++]);
      return ravel(idx, shape);
    };
    for (Index r1 = 0; r1 < rows; ++r1)
      for (Index r2 = r1 + 1; r2 < rows; ++r2)
        for (Index c1 = 0; c1 < cols; ++c1)
          for (Index c2 = c1 + 1; c2 < cols; ++c2) {
            Poly poly;
            poly[mono(entry(r1, c1), entry(r2, c2))] += 1.0;
            poly[mono(entry(r1, c2), entry(r2, c1))] -= 1.0;
            std::vector<std::pair<std::pair<Index, Index>, double>> key;
            for (auto& [k, v] : poly)
              if (v != 0.0) key.push_back({k, v});
            if (key.empty()) continue;
            if (key.front().second < 0)
              for (auto& kv : key) kv.second = -kv.second;
            if (!seen.insert(key).second) continue;
            QuadraticForm f(total);
            for (auto& [k, v] : key) f.P.add_monomial(k.first, k.second, v);
            minors.push_back(f);
          }
  }

  NearestPointSpec s;
  s.name = "rank-one";
  s.n_affine = total;
  for (Index j = 0; j < total; ++j) s.y_coords.push_back(j);
  s.constraints = minors;
  s.local_dim = 1;
  for (Index k : shape) s.local_dim += k - 1;
  ParametricProblem fam = detail::make_nearest_point(s);
  fam.ground_truth = [shape, total](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> u;
    for (Index k : shape) {
      Vector v = detail::gaussian(rng, k);
      u.push_back(v / v.norm());
    }
    GroundTruth g;
    g.theta = Vector(total);
    for (Index f = 0; f < total; ++f) {
      std::vector<Index> idx = unravel(f, shape);
      double prod = 1.0;
      for (std::size_t k = 0; k < shape.size(); ++k) prod *= u[k](idx[k]);
      g.theta(f) = prod;
    }
    g.x = Vector(total + 1);
    g.x << 1.0, g.theta;
    return g;
  };
  if (shape.size() == 2) {
    fam.oracle = [shape, total](const Vector& theta) -> std::optional<OracleResult> {
      Matrix T(shape[0], shape[1]);
      for (Index i = 0; i < shape[0]; ++i)
        for (Index j = 0; j < shape[1]; ++j) T(i, j) = theta(i * shape[1] + j);
      SvdResult s = svd(T);
      Matrix Y = s.sigma(0) * s.U.col(0) * s.V.col(0).transpose();
      OracleResult r;
      r.value = s.sigma.tail(s.sigma.size() - 1).squaredNorm();
      r.x = Vector(total + 1);
      r.x(0) = 1.0;
      for (Index i = 0; i < shape[0]; ++i)
        for (Index j = 0; j < shape[1]; ++j) r.x(1 + i * shape[1] + j) = Y(i, j);
      return r;
    };
  }
  return fam;
}

}  // namespace qstab
