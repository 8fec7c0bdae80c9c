#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pcs/constellation.hpp"

namespace pcs {

struct SymbolRecord {
  std::uint32_t tx = 0;  ///< constellation index
  cplx rx;
  int pol = 0;
};

/// Zips per-polarisation transmitted indices with received samples.
std::vector<SymbolRecord> make_records(std::span<const std::uint32_t> tx, std::span<const cplx> rx, int pol = 0);

struct MiEstimate {
  double bits = 0.0;
  std::size_t records_used = 0;
  /// Symbols with nonzero probability but fewer than two records; they are
  /// left out of both the average and the mixture.
  std::vector<std::uint32_t> dropped_symbols;
  /// Symbols kept with fewer than 100 records (estimate may be biased).
  std::vector<std::uint32_t> sparse_symbols;
};

/// Plug-in memoryless MI. Each conditional p(y|x) is a 2-D Gaussian kernel
/// density over the records of x with an isotropic Silverman bandwidth
/// sqrt(tr Σ_x / 2) n_x^(-1/6); p(y) = Σ_x pmf(x) p(y|x). A record never
/// contributes a kernel to its own density (leave-one-out). Kernels are
/// truncated at 7 bandwidths; a record with no kernel in range falls back to
/// the exact sums.
MiEstimate estimate_mi_detailed(std::span<const SymbolRecord> records, const Constellation& c);
double estimate_mi(std::span<const SymbolRecord> records, const Constellation& c);

/// Bitwise LLRs, log P(b=0|y) / P(b=1|y), with the constellation pmf as the
/// symbol prior and circular Gaussian noise of complex variance
/// noise_variance (E|n|^2). Output is symbol-major, label position order.
std::vector<double> compute_llrs(std::span<const cplx> rx, const Constellation& c, double noise_variance);

/// log P(b=0) / P(b=1) under the pmf, per label position.
std::vector<double> prior_llrs(const Constellation& c);

double measure_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference);
std::size_t count_bit_errors(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference);

/// Mean |rx - tx|^2.
double estimate_noise_variance(std::span<const cplx> rx, std::span<const cplx> tx);

struct MiRow {
  int spans = 0;
  double distance_km = 0.0;
  double launch_dbm = 0.0;
  double mi = 0.0;
};
/// CSV with header "distance_km,launch_dbm,mi".
void write_mi_csv(std::ostream& os, std::span<const MiRow> rows);

struct BerRow {
  double distance_km = 0.0;
  double ber = 0.0;
};
/// CSV with header "distance_km,ber".
void write_ber_csv(std::ostream& os, std::span<const BerRow> rows);

}  // namespace pcs
