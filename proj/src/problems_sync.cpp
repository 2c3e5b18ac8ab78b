#include "problem_util.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qstab {

bool GraphSpec::connected() const {
  if (vertices < 1) return false;
  std::vector<Index> parent(vertices);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  Index comps = vertices;
  for (auto [i, j] : edges) {
    Index a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps == 1;
}

void GraphSpec::validate(bool require_connected) const {
  if (vertices < 2) throw InvalidInput("graph: need at least two vertices");
  std::set<std::pair<Index, Index>> seen;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= vertices || j >= vertices) throw InvalidInput("graph: edge endpoint out of range");
    if (i == j) throw InvalidInput("graph: self loop");
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) throw InvalidInput("graph: duplicate edge");
  }
  if (require_connected && !connected()) throw InvalidInput("graph: not connected");
}

namespace {

// Orthonormality of the columns of a d x k block starting at affine offset `off`
// (column-major), i.e. X^T X = I_k.
void stiefel_constraints(Index n_affine, Index off, Index d, Index k, std::vector<QuadraticForm>& out) {
  for (Index a = 0; a < k; ++a)
    for (Index b = a; b < k; ++b) {
      QuadraticForm f(n_affine);
      for (Index r = 0; r < d; ++r) f.P.add_monomial(off + a * d + r, off + b * d + r, 1.0);
      f.r = a == b ? -1.0 : 0.0;
      out.push_back(f);
    }
}

Vector vec(const Matrix& M) { return Eigen::Map<const Vector>(M.data(), M.size()); }

Matrix unvec(const Vector& v, Index rows, Index cols) { return Eigen::Map<const Matrix>(v.data(), rows, cols); }

// Shared by rotation_sync and se_sync. Vertex i >= 1 owns rotation block
// (i-1)*d*d; translations (if any) follow all rotations.
struct SyncShape {
  GraphSpec g;
  Index d = 0;
  bool translations = false;

  Index n() const { return g.vertices - 1; }
  Index dd() const { return d * d; }
  Index n_affine() const { return n() * dd() + (translations ? n() * d : 0); }
  Index rot(Index v) const { return (v - 1) * dd(); }
  Index tr(Index v) const { return n() * dd() + (v - 1) * d; }
  Index E() const { return static_cast<Index>(g.edges.size()); }
  Index param_dim() const { return E() * dd() + (translations ? E() * d : 0); }
};

QuadraticForm sync_objective(const SyncShape& s, const Vector& theta) {
  const Index d = s.d, dd = s.dd(), na = s.n_affine(), E = s.E();
  const Index rows = E * dd + (s.translations ? E * d : 0);
  Matrix L = Matrix::Zero(rows, na);
  Vector c = Vector::Zero(rows);
  const Matrix I = Matrix::Identity(d, d);
  for (Index e = 0; e < E; ++e) {
    auto [i, j] = s.g.edges[e];
    Matrix Rh = unvec(theta.segment(e * dd, dd), d, d);
    // vec(R_j - Rh R_i) = vec R_j - (I kron Rh) vec R_i
    Matrix K = Matrix::Zero(dd, dd);
    for (Index b = 0; b < d; ++b) K.block(b * d, b * d, d, d) = Rh;
    const Index r0 = e * dd;
    if (j > 0)
      L.block(r0, s.rot(j), dd, dd) += Matrix::Identity(dd, dd);
    else
      c.segment(r0, dd) += vec(I);
    if (i > 0)
      L.block(r0, s.rot(i), dd, dd) -= K;
    else
      c.segment(r0, dd) -= vec(Rh);
  }
  if (s.translations) {
    for (Index e = 0; e < E; ++e) {
      auto [i, j] = s.g.edges[e];
      Vector uh = theta.segment(E * dd + e * d, d);
      const Index r0 = E * dd + e * d;
      // u_j - u_i - R_i uh, and R_i uh = (uh^T kron I) vec R_i
      if (j > 0) L.block(r0, s.tr(j), d, d) += Matrix::Identity(d, d);
      if (i > 0) {
        L.block(r0, s.tr(i), d, d) -= Matrix::Identity(d, d);
        for (Index b = 0; b < d; ++b) L.block(r0, s.rot(i) + b * d, d, d) -= uh(b) * Matrix::Identity(d, d);
      } else {
        c.segment(r0, d) -= uh;
      }
    }
  }
  return detail::least_squares_form(L, c);
}

ParametricProblem make_sync(const SyncShape& s, const std::string& name) {
  std::vector<QuadraticForm> cons;
  for (Index v = 1; v < s.g.vertices; ++v) stiefel_constraints(s.n_affine(), s.rot(v), s.d, s.d, cons);
  ParametricProblem fam;
  fam.name = name;
  fam.d = s.param_dim();
  std::vector<Index> all(s.n_affine());
  std::iota(all.begin(), all.end(), Index{0});
  fam.layout = detail::lifted_layout(s.n_affine(), all);
  fam.theta_independent_feasible_set = true;
  fam.instantiate_fn = [s, cons](const Vector& theta) { return homogenize(sync_objective(s, theta), cons); };
  fam.affine_view = [s, cons](const Vector& theta) {
    AffineProblem av;
    av.objective = sync_objective(s, theta);
    av.constraints = cons;
    av.local_dim = s.n() * s.d * (s.d - 1) / 2;
    av.nearest_point = false;
    return av;
  };
  fam.ground_truth = [s](std::uint64_t seed) {
    detail::Rng rng(seed);
    const Index d = s.d, n = s.n();
    std::vector<Matrix> R(n + 1, Matrix::Identity(d, d));
    std::vector<Vector> u(n + 1, Vector::Zero(d));
    for (Index v = 1; v <= n; ++v) R[v] = detail::random_rotation(rng, d);
    if (s.translations)
      for (Index v = 1; v <= n; ++v) u[v] = detail::gaussian(rng, d);
    GroundTruth g;
    g.theta = Vector(s.param_dim());
    for (Index e = 0; e < s.E(); ++e) {
      auto [i, j] = s.g.edges[e];
      g.theta.segment(e * s.dd(), s.dd()) = vec(R[j] * R[i].transpose());
      if (s.translations) g.theta.segment(s.E() * s.dd() + e * d, d) = R[i].transpose() * (u[j] - u[i]);
    }
    g.x = Vector(s.n_affine() + 1);
    g.x(0) = 1.0;
    for (Index v = 1; v <= n; ++v) {
      g.x.segment(1 + s.rot(v), s.dd()) = vec(R[v]);
      if (s.translations) g.x.segment(1 + s.tr(v), d) = u[v];
    }
    return g;
  };
  return fam;
}

}  // namespace

ParametricProblem rotation_sync(const GraphSpec& g, Index d) {
  g.validate(true);
  if (d < 2) throw InvalidInput("rotation_sync: d must be at least 2");
  return make_sync({g, d, false}, "rotation-sync");
}

ParametricProblem se_sync(const GraphSpec& g, Index d) {
  g.validate(true);
  if (d < 2) throw InvalidInput("se_sync: d must be at least 2");
  return make_sync({g, d, true}, "se-sync");
}

ParametricProblem procrustes(Index m1, Index n, Index k, Index m2) {
  if (m1 < 1 || n < 1 || k < 1 || m2 < 1) throw InvalidInput("procrustes: sizes must be positive");
  if (k > n) throw InvalidInput("procrustes: need k <= n for X^T X = I_k");
  const Index nk = n * k;
  const Index dim = m1 * n + m1 * m2 + k * m2;
  auto split = [=](const Vector& th, Matrix& A, Matrix& B, Matrix& C) {
    A = unvec(th.segment(0, m1 * n), m1, n);
    B = unvec(th.segment(m1 * n, m1 * m2), m1, m2);
    C = unvec(th.segment(m1 * n + m1 * m2, k * m2), k, m2);
  };
  auto objective = [=](const Vector& th) {
    Matrix A, B, C;
    split(th, A, B, C);
    // vec(A X C) = (C^T kron A) vec X
    Matrix K(m1 * m2, nk);
    for (Index a = 0; a < m2; ++a)
      for (Index b = 0; b < k; ++b) K.block(a * m1, b * n, m1, n) = C(b, a) * A;
    return detail::least_squares_form(K, -vec(B));
  };
  std::vector<QuadraticForm> cons;
  stiefel_constraints(nk, 0, n, k, cons);
  ParametricProblem fam;
  fam.name = "procrustes";
  fam.d = dim;
  std::vector<Index> all(nk);
  std::iota(all.begin(), all.end(), Index{0});
  fam.layout = detail::lifted_layout(nk, all);
  fam.theta_independent_feasible_set = true;
  fam.instantiate_fn = [objective, cons](const Vector& th) { return homogenize(objective(th), cons); };
  fam.affine_view = [=](const Vector& th) {
    AffineProblem av;
    av.objective = objective(th);
    av.constraints = cons;
    av.local_dim = n * k - k * (k + 1) / 2;
    return av;
  };
  fam.diagnostics = [=](const Vector& th) {
    std::vector<std::string> w;
    Matrix A, B, C;
    split(th, A, B, C);
    if (m1 * m2 < nk) {
      w.push_back("procrustes: X -> AXC is not injective (too few rows); relaxation may be loose");
      return w;
    }
    Vector sa = singular_values(A), sc = singular_values(C);
    // singular values of C^T kron A are products
    double smax = sa.maxCoeff() * sc.maxCoeff();
    double smin = (sa.size() < n ? 0.0 : sa.minCoeff()) * (sc.size() < k ? 0.0 : sc.minCoeff());
    if (smin <= 1e-8 * smax) w.push_back("procrustes: X -> AXC is not injective; relaxation may be loose");
    return w;
  };
  fam.ground_truth = [=](std::uint64_t seed) {
    detail::Rng rng(seed);
    Matrix A(m1, n), C(k, m2);
    for (Index j = 0; j < n; ++j) A.col(j) = detail::gaussian(rng, m1);
    for (Index j = 0; j < m2; ++j) C.col(j) = detail::gaussian(rng, k);
    Matrix X = detail::random_stiefel(rng, n, k);
    Matrix B = A * X * C;
    GroundTruth g;
    g.theta = Vector(dim);
    g.theta << vec(A), vec(B), vec(C);
    g.x = Vector(nk + 1);
    g.x << 1.0, vec(X);
    return g;
  };
  return fam;
}

}  // namespace qstab
