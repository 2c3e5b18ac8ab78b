#include "problem_util.hpp"

#include <cmath>

namespace qstab {

double cayley_menger(double a, double b, double c) {
  return a * a + b * b + c * c - 2.0 * a * b - 2.0 * a * c - 2.0 * b * c;
}

Index pair_index(Index i, Index j, Index vertices) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= vertices || i == j) throw InvalidInput("pair_index: bad pair");
  return i * vertices - i * (i + 1) / 2 + (j - i - 1);
}

ParametricProblem edm_1d(const GraphSpec& g) {
  g.validate(true);
  const Index V = g.vertices;
  const Index P = V * (V - 1) / 2;
  // affine position of each lexicographic pair: unobserved pairs first, then edges
  std::vector<Index> pos(P, -1);
  const Index E = static_cast<Index>(g.edges.size());
  for (Index e = 0; e < E; ++e) pos[pair_index(g.edges[e].first, g.edges[e].second, V)] = (P - E) + e;
  Index next = 0;
  for (Index p = 0; p < P; ++p)
    if (pos[p] < 0) pos[p] = next++;

  detail::NearestPointSpec s;
  s.name = "edm-1d";
  s.n_affine = P;
  for (Index e = 0; e < E; ++e) s.y_coords.push_back(P - E + e);
  for (Index i = 0; i < V; ++i)
    for (Index j = i + 1; j < V; ++j)
      for (Index k = j + 1; k < V; ++k) {
        const Index a = pos[pair_index(i, j, V)], b = pos[pair_index(i, k, V)], c = pos[pair_index(j, k, V)];
        QuadraticForm f(P);
        f.P.add_monomial(a, a, 1.0);
        f.P.add_monomial(b, b, 1.0);
        f.P.add_monomial(c, c, 1.0);
        f.P.add_monomial(a, b, -2.0);
        f.P.add_monomial(a, c, -2.0);
        f.P.add_monomial(b, c, -2.0);
        s.constraints.push_back(f);
      }
  s.local_dim = V - 1;
  ParametricProblem fam = detail::make_nearest_point(s);
  fam.ground_truth = [g, pos, P, V, E](std::uint64_t seed) {
    detail::Rng rng(seed);
    Vector t = Vector::Zero(V);
    t.tail(V - 1) = detail::gaussian(rng, V - 1);
    GroundTruth gt;
    gt.x = Vector(P + 1);
    gt.x(0) = 1.0;
    for (Index i = 0; i < V; ++i)
      for (Index j = i + 1; j < V; ++j) {
        const double dij = t(j) - t(i);
        gt.x(1 + pos[pair_index(i, j, V)]) = dij * dij;
        gt.degenerate = gt.degenerate || std::abs(dij) < 1e-3;
      }
    gt.theta = gt.x.tail(E);
    return gt;
  };
  return fam;
}

}  // namespace qstab
