#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pcs {

using cplx = std::complex<double>;

/// Probability of a 1 at each label position under the symbol pmf.
struct BitLevelMarginals {
  std::vector<double> p_one;
};

/// Square QAM on the odd-integer grid {±1, ±3, ...}·Δ with binary-reflected
/// Gray labels applied per rail (I bits first, then Q bits).
///
/// Point i sits at column i / L, row i % L of the L×L grid, where
/// L = sqrt(M). Labels are stored as integers whose most significant bit is
/// label position 0. Instances are immutable; the `with_*` members return
/// modified copies.
class Constellation {
 public:
  Constellation() = default;

  /// Unit-power uniform QAM. Supported orders: 4, 16, 64.
  static Constellation qam(int order);

  /// Rebuild from explicit labels (any permutation of 0..M-1) on the same
  /// grid; used for labeling experiments.
  Constellation with_labels(std::vector<std::uint32_t> labels) const;
  Constellation with_pmf(std::vector<double> pmf) const;
  Constellation with_scaling(double scaling) const;
  /// Same pmf, scaling chosen so average_power() == power.
  Constellation with_power(double power) const;

  int order() const { return static_cast<int>(template_.size()); }
  int bits_per_symbol() const { return bits_; }
  int levels_per_rail() const { return levels_; }
  double scaling() const { return scaling_; }

  std::span<const cplx> template_points() const { return template_; }
  std::span<const cplx> points() const { return points_; }
  std::span<const std::uint32_t> labels() const { return labels_; }
  std::span<const double> pmf() const { return pmf_; }

  cplx point(std::size_t i) const { return points_[i]; }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }
  /// Bit at label position `pos` (0 = first/most significant) of point i.
  int bit(std::size_t i, int pos) const {
    return static_cast<int>((labels_[i] >> (bits_ - 1 - pos)) & 1u);
  }
  std::size_t index_of_label(std::uint32_t label) const {
    return label_to_index_[label];
  }

  double average_power() const;
  double min_distance() const;
  BitLevelMarginals bit_marginals() const;
  double entropy() const;

  /// Plain-text table: one line per point, "index label re im pmf".
  void write_table(std::ostream& os) const;
  static Constellation read_table(std::istream& is);

 private:
  void rebuild_points();

  int bits_ = 0;
  int levels_ = 0;
  double scaling_ = 1.0;
  std::vector<cplx> template_;
  std::vector<cplx> points_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::size_t> label_to_index_;
  std::vector<double> pmf_;
};

inline Constellation build_qam(int order) { return Constellation::qam(order); }

/// Validates a probability vector of length m (nonnegative, sums to 1 within
/// 1e-9 before renormalisation). Throws std::invalid_argument.
std::vector<double> checked_pmf(std::vector<double> pmf, std::size_t m);

double entropy_bits(std::span<const double> pmf);

}  // namespace pcs
