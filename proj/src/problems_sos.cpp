#include "problem_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace qstab {

namespace {

void gen_exponents(Index n, Index degree, std::vector<int>& cur, Index var, std::vector<std::vector<int>>& out) {
  if (var == n) {
    out.push_back(cur);
    return;
  }
  const int used = std::accumulate(cur.begin(), cur.begin() + var, 0);
  for (int e = 0; e + used <= degree; ++e) {
    cur[var] = e;
    gen_exponents(n, degree, cur, var + 1, out);
  }
  cur[var] = 0;
}

int total_degree(const std::vector<int>& a) { return std::accumulate(a.begin(), a.end(), 0); }

std::vector<int> add(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

}  // namespace

MonomialBasis monomial_basis(Index n, Index degree) {
  if (n < 1 || degree < 0) throw InvalidInput("monomial_basis: need n >= 1 and degree >= 0");
  MonomialBasis b;
  b.n = n;
  b.degree = degree;
  std::vector<int> cur(n, 0);
  gen_exponents(n, degree, cur, 0, b.exponents);
  std::sort(b.exponents.begin(), b.exponents.end());
  return b;
}

Index MonomialBasis::index_of(const std::vector<int>& alpha) const {
  auto it = std::lower_bound(exponents.begin(), exponents.end(), alpha);
  if (it == exponents.end() || *it != alpha) return -1;
  return static_cast<Index>(it - exponents.begin());
}

Vector gram_apply(const MonomialBasis& basis, const SymMatrix& A) {
  if (A.n() != basis.size()) throw InvalidInput("gram_apply: size mismatch");
  MonomialBasis big = monomial_basis(basis.n, 2 * basis.degree);
  Vector f = Vector::Zero(big.size());
  for (Index a = 0; a < basis.size(); ++a)
    for (Index b = 0; b < basis.size(); ++b) f(big.index_of(add(basis.exponents[a], basis.exponents[b]))) += A(a, b);
  return f;
}

SymMatrix gram_lift(const MonomialBasis& basis, const Vector& f) {
  const Index two_d = 2 * basis.degree;
  MonomialBasis big = monomial_basis(basis.n, two_d);
  Vector coeff = f;
  if (f.size() != big.size()) {
    // Accept a longer vector only when everything above degree 2d vanishes.
    Index k = two_d + 1;
    MonomialBasis wide = monomial_basis(basis.n, k);
    while (wide.size() < f.size()) wide = monomial_basis(basis.n, ++k);
    if (wide.size() != f.size()) throw InvalidInput("gram_lift: coefficient vector has the wrong length");
    coeff = Vector::Zero(big.size());
    for (Index i = 0; i < wide.size(); ++i) {
      const int deg = total_degree(wide.exponents[i]);
      if (deg > two_d) {
        if (f(i) != 0.0)
          throw InvalidInput(deg % 2 ? "gram_lift: odd total degree monomial above the basis degree"
                                     : "gram_lift: monomial degree exceeds twice the basis degree");
        continue;
      }
      coeff(big.index_of(wide.exponents[i])) = f(i);
    }
  }
  require_finite(coeff, "gram_lift");
  std::vector<int> count(big.size(), 0);
  std::vector<Index> target(basis.size() * basis.size());
  for (Index a = 0; a < basis.size(); ++a)
    for (Index b = 0; b < basis.size(); ++b) {
      Index g = big.index_of(add(basis.exponents[a], basis.exponents[b]));
      target[a * basis.size() + b] = g;
      ++count[g];
    }
  Matrix Q(basis.size(), basis.size());
  for (Index a = 0; a < basis.size(); ++a)
    for (Index b = 0; b < basis.size(); ++b) {
      Index g = target[a * basis.size() + b];
      Q(a, b) = coeff(g) / count[g];
    }
  return SymMatrix(Q);
}

ParametricProblem sos_unconstrained(Index n, Index two_d, Index param_dim,
                                    std::function<Vector(const Vector&)> coeff_map,
                                    std::optional<SosReference> reference) {
  if (two_d < 2 || two_d % 2) throw InvalidInput("sos_unconstrained: two_d must be even and positive");
  MonomialBasis basis = monomial_basis(n, two_d / 2);
  const Index N = basis.size();
  if (N > 40) throw InvalidInput("sos_unconstrained: monomial basis larger than 40");
  if (reference) {
    if (reference->theta_bar.size() != param_dim) throw InvalidInput("sos_unconstrained: reference parameter has wrong length");
    if (reference->Q_bar.n() != N) throw InvalidInput("sos_unconstrained: reference Gram matrix has wrong size");
  }

  // Veronese relations: per monomial class, the first pair (a <= b) is canonical.
  MonomialBasis big = monomial_basis(n, two_d);
  std::vector<std::vector<std::pair<Index, Index>>> classes(big.size());
  for (Index a = 0; a < N; ++a)
    for (Index b = a; b < N; ++b) classes[big.index_of(add(basis.exponents[a], basis.exponents[b]))].push_back({a, b});
  std::vector<HomQuadratic> cons;
  SymMatrix e0(N);
  e0.set(0, 0, 1.0);
  cons.push_back({e0, -1.0});
  for (const auto& cls : classes)
    for (std::size_t k = 1; k < cls.size(); ++k) {
      SymMatrix H(N);
      H.add_monomial(cls[k].first, cls[k].second, 1.0);
      H.add_monomial(cls[0].first, cls[0].second, -1.0);
      cons.push_back({H, 0.0});
    }

  ParametricProblem fam;
  fam.name = "sos";
  fam.d = param_dim;
  fam.layout.hom_index = 0;
  for (Index a = 1; a < N; ++a) fam.layout.aux.push_back(a);
  fam.instantiate_fn = [=](const Vector& theta) {
    Vector f = coeff_map(theta);
    HomQCQP p;
    p.N = N;
    p.hom_index = 0;
    if (reference)
      p.G = gram_lift(basis, f - coeff_map(reference->theta_bar)) + reference->Q_bar;
    else
      p.G = gram_lift(basis, f);
    p.constraints = cons;
    return p;
  };
  fam.theta_independent_feasible_set = true;
  return fam;
}

namespace {

Vector monomial_vector(const MonomialBasis& basis, const Vector& z) {
  Vector x(basis.size());
  for (Index a = 0; a < basis.size(); ++a) {
    double v = 1.0;
    for (Index i = 0; i < basis.n; ++i) v *= std::pow(z(i), basis.exponents[a][i]);
    x(a) = v;
  }
  return x;
}

}  // namespace

ParametricProblem sos_binary_sextic() {
  MonomialBasis big = monomial_basis(2, 6);
  const Index i42 = big.index_of({4, 2}), i24 = big.index_of({2, 4}), i22 = big.index_of({2, 2});
  auto coeffs = [=](const Vector& th) {
    Vector f = Vector::Zero(big.size());
    f(i42) = 1.0;
    f(i24) = 1.0;
    f(i22) = th(0);
    return f;
  };
  ParametricProblem fam = sos_unconstrained(2, 6, 1, coeffs);
  fam.name = "sos-binary-sextic";
  MonomialBasis basis = monomial_basis(2, 3);
  // p = ab(a + b + theta) with a = z1^2, b = z2^2; for theta < 0 the minimum
  // sits on a = b = -theta/3.
  fam.oracle = [basis](const Vector& th) -> std::optional<OracleResult> {
    Vector z = Vector::Zero(2);
    double v = 0.0;
    if (th(0) < 0) {
      const double s = -th(0) / 3.0;
      z.setConstant(std::sqrt(s));
      v = th(0) * th(0) * th(0) / 27.0;
    }
    return OracleResult{v, monomial_vector(basis, z)};
  };
  return fam;
}

ParametricProblem sos_univariate_quartic() {
  MonomialBasis big = monomial_basis(1, 4);
  auto coeffs = [=](const Vector& th) {
    Vector f = Vector::Zero(big.size());
    f(big.index_of({4})) = 1.0;
    f(big.index_of({1})) = -th(0);
    return f;
  };
  ParametricProblem fam = sos_unconstrained(1, 4, 1, coeffs);
  fam.name = "sos-univariate-quartic";
  MonomialBasis basis = monomial_basis(1, 2);
  // stationarity 4 z^3 = theta
  fam.oracle = [basis](const Vector& th) -> std::optional<OracleResult> {
    Vector z(1);
    z(0) = std::cbrt(th(0) / 4.0);
    const double v = std::pow(z(0), 4) - th(0) * z(0);
    return OracleResult{v, monomial_vector(basis, z)};
  };
  fam.ground_truth = [basis](std::uint64_t seed) {
    detail::Rng rng(seed);
    Vector z(1);
    z(0) = detail::uniform(rng, -2.0, 2.0);
    GroundTruth g;
    g.theta = Vector(1);
    g.theta(0) = 4.0 * z(0) * z(0) * z(0);
    g.x = monomial_vector(basis, z);
    return g;
  };
  return fam;
}

}  // namespace qstab
