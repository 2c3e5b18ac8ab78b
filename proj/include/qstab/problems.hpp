#pragma once

#include "qstab/qcqp.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace qstab {

// Vertices 0..vertices-1; vertex 0 is the anchor.
struct GraphSpec {
  Index vertices = 0;
  std::vector<std::pair<Index, Index>> edges;

  bool connected() const;
  // Throws InvalidInput on bad indices, self loops, duplicates, or (if asked) disconnection.
  void validate(bool require_connected = true) const;
};

// Exponent vectors with total degree <= degree, sorted lexicographically.
struct MonomialBasis {
  Index n = 0;
  Index degree = 0;
  std::vector<std::vector<int>> exponents;

  Index size() const { return static_cast<Index>(exponents.size()); }
  Index index_of(const std::vector<int>& alpha) const;  // -1 if absent
};
MonomialBasis monomial_basis(Index n, Index degree);

// Real roots of c[0] + c[1] t + ... + c[k] t^k, Newton-polished.
std::vector<double> real_roots(const std::vector<double>& c);

ParametricProblem twisted_cubic();
ParametricProblem twisted_cubic_bad();
ParametricProblem cuspidal_cubic();
ParametricProblem rank_one_approximation(const std::vector<Index>& shape);
ParametricProblem rotation_sync(const GraphSpec& g, Index d);
ParametricProblem se_sync(const GraphSpec& g, Index d);
ParametricProblem procrustes(Index m1, Index n, Index k, Index m2);
ParametricProblem edm_1d(const GraphSpec& g);

// Nearest point on the twisted cubic: minimizer t and squared distance.
std::pair<double, double> twisted_cubic_nearest(const Vector& theta);

// det [[0,a,b,1],[a,0,c,1],[b,c,0,1],[1,1,1,0]] = a^2+b^2+c^2-2ab-2ac-2bc
double cayley_menger(double a, double b, double c);
// Index of pair (i, j), i < j, among all pairs of `vertices` points in lexicographic order.
Index pair_index(Index i, Index j, Index vertices);

// phi(A) = x^T A x as coefficients over monomial_basis(n, 2d).
Vector gram_apply(const MonomialBasis& basis, const SymMatrix& A);
// Moore-Penrose inverse of phi: every ordered pair (a, b) with a + b = gamma
// receives c_gamma / #pairs.
SymMatrix gram_lift(const MonomialBasis& basis, const Vector& f);

struct SosReference {
  Vector theta_bar;
  SymMatrix Q_bar;
};
// coeff_map returns coefficients over monomial_basis(n, two_d).
ParametricProblem sos_unconstrained(Index n, Index two_d, Index param_dim,
                                    std::function<Vector(const Vector&)> coeff_map,
                                    std::optional<SosReference> reference = std::nullopt);
// z1^4 z2^2 + z1^2 z2^4 + theta z1^2 z2^2
ParametricProblem sos_binary_sextic();
// z^4 - theta z
ParametricProblem sos_univariate_quartic();

}  // namespace qstab
