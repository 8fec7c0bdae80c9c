#pragma once

#include <vector>

namespace pcs {

/// Gauss-Hermite rule for weight exp(-t^2) on the real line.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, nodes ascending. Cached per n; thread-safe.
const GaussHermite& gauss_hermite(int n);

}  // namespace pcs
