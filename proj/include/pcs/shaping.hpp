#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pcs/constellation.hpp"

namespace pcs {

/// Maxwell-Boltzmann input optimised for an AWGN channel at a target SNR.
struct ShapingSolution {
  double nu = 0.0;        ///< MB rate on the unscaled (odd-integer) template
  double scaling = 1.0;   ///< grid spacing Δ meeting the power constraint
  std::vector<double> pmf;
  double predicted_mi = 0.0;  ///< bits/symbol
  double target_snr = 0.0;    ///< linear
  double power = 1.0;
  Constellation constellation;  ///< template with pmf and scaling applied
};

struct ShapedBitRate {
  double entropy = 0.0;               ///< H(pmf), bits/symbol
  std::vector<double> bit_entropies;  ///< binary entropy of each label position
};

/// pmf_i ∝ exp(-nu |x_i|^2) over the template (unscaled) points.
std::vector<double> mb_pmf(const Constellation& tmpl, double nu);

/// Memoryless I(X;Y) for complex AWGN with noise variance
/// average_power()/snr, by tensor Gauss-Hermite quadrature. The node count
/// starts at 32 per dimension and doubles until successive values agree to
/// 1e-5 bits.
double awgn_mi(const Constellation& c, double snr);

/// Same integral at a fixed node count per dimension (no refinement).
double awgn_mi_fixed(const Constellation& c, double snr, int nodes);

/// Largest nu searched: the MB pmf is within 1e-6 of its nu -> inf limit.
double mb_nu_limit(const Constellation& tmpl);

/// Joint (nu, Δ) optimisation: Δ follows from the power constraint in closed
/// form, nu maximises awgn_mi by a grid scan followed by golden-section
/// refinement. The result never falls below the uniform input.
ShapingSolution optimize_shaping(const Constellation& tmpl, double snr, double power = 1.0);

ShapedBitRate shaped_bit_rate(const ShapingSolution& s);
ShapedBitRate shaped_bit_rate(const Constellation& c);

/// CSV with header "snr_db,nu,scaling,predicted_mi,entropy".
void write_shaping_csv(std::ostream& os, std::span<const ShapingSolution> rows);

double db_to_linear(double db);
double linear_to_db(double x);

}  // namespace pcs
