#include "qstab/problems.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qstab {

std::vector<double> real_roots(const std::vector<double>& c) {
  std::vector<double> a = c;
  while (!a.empty() && a.back() == 0.0) a.pop_back();
  const Index k = static_cast<Index>(a.size()) - 1;
  if (k < 1) return {};
  Matrix comp = Matrix::Zero(k, k);
  for (Index i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
  for (Index i = 0; i < k; ++i) comp(i, k - 1) = -a[i] / a[k];
  Eigen::EigenSolver<Matrix> es(comp, false);
  auto eval = [&](double t, double& dp) {
    double p = 0.0;
    dp = 0.0;
    for (Index i = k; i >= 0; --i) {
      dp = dp * t + p;
      p = p * t + a[i];
    }
    return p;
  };
  std::vector<double> out;
  for (Index i = 0; i < k; ++i) {
    std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    double t = z.real();
    for (int it = 0; it < 20; ++it) {
      double dp;
      double p = eval(t, dp);
      if (dp == 0.0) break;
      double step = p / dp;
      t -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(t))) break;
    }
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qstab
