#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pcs {

/// Bijection from codeword positions to (symbol, label position) slots;
/// slot = symbol * bits_per_symbol + position. The part acting on the
/// systematic positions is the interleaver in front of the encoder, the full
/// map the interleaver between encoder and modulator.
class BitMapper {
 public:
  static BitMapper identity(std::size_t n, int bits_per_symbol);
  static BitMapper from_slots(std::vector<std::uint32_t> slot_of_bit, int bits_per_symbol);

  /// Parity bits (positions k..n-1) go to the label positions whose
  /// marginal P(1) is closest to 0.5 (stable in position order), filling one
  /// position across all symbols before moving to the next. Systematic bits
  /// take the remaining slots in symbol-major order.
  static BitMapper shaping_preserving(std::size_t n, std::size_t k, std::span<const double> p_one);

  std::size_t length() const { return slot_of_bit_.size(); }
  int bits_per_symbol() const { return bps_; }
  std::size_t symbols() const { return length() / bps_; }
  std::uint32_t slot_of(std::size_t bit) const { return slot_of_bit_[bit]; }
  std::uint32_t bit_at(std::size_t slot) const { return bit_at_slot_[slot]; }

  /// Codeword -> slot-ordered bits.
  std::vector<std::uint8_t> map_bits(std::span<const std::uint8_t> codeword) const;
  /// Codeword -> one label per symbol (first label position most significant).
  std::vector<std::uint32_t> map_labels(std::span<const std::uint8_t> codeword) const;
  /// Slot-ordered LLRs -> codeword order.
  std::vector<double> unmap_llrs(std::span<const double> slot_llrs) const;

 private:
  BitMapper(std::vector<std::uint32_t> slot_of_bit, int bps);
  std::vector<std::uint32_t> slot_of_bit_, bit_at_slot_;
  int bps_ = 1;
};

}  // namespace pcs
