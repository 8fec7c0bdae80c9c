#include "pcs/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace pcs {

namespace {

// Newton iteration on the orthonormal Hermite recurrence (Golub-Welsch
// initial guesses from the asymptotic root formula).
GaussHermite compute(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Hermite order must be positive");
  GaussHermite gh;
  gh.nodes.assign(n, 0.0);
  gh.weights.assign(n, 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * gh.nodes[n - 1];
    else if (i == 3)
      z = 1.91 * z - 0.91 * gh.nodes[n - 2];
    else
      z = 2.0 * z - gh.nodes[n - i + 1];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    gh.nodes[n - 1 - i] = z;
    gh.nodes[i] = -z;
    gh.weights[i] = gh.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  return gh;
}

}  // namespace

const GaussHermite& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, GaussHermite> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute(n)).first;
  return it->second;
}

}  // namespace pcs
