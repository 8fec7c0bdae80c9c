#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcs/constellation.hpp"
#include "pcs/rng.hpp"

namespace pcs {

/// An n-type: letter counts summing to the block length.
struct Composition {
  std::vector<std::uint32_t> counts;

  std::size_t alphabet_size() const { return counts.size(); }
  std::uint32_t length() const;
  /// log2 of the multinomial coefficient n! / prod(c_i!).
  double log2_sequences() const;
  /// floor(log2(multinomial)): the largest admissible matcher input.
  std::size_t max_input_bits() const;
  std::vector<double> frequencies() const;
};

/// KL-minimising n-type for pmf: largest-remainder rounding followed by
/// single-unit transfers until none improves D(c/n || pmf). Requires n >= |pmf|.
Composition composition_from_pmf(std::span<const double> pmf, std::uint32_t n);

/// D(c/n || pmf) in nats; infinite when c puts mass where pmf has none.
double type_divergence(const Composition& comp, std::span<const double> pmf);

class DmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constant-composition distribution matcher.
///
/// Input bits are read as a k-bit integer (first bit most significant) and
/// mapped to the sequence of that lexicographic rank among all sequences of
/// the composition. This is arithmetic coding over the shrinking multiset
/// carried out in exact integer arithmetic, so the map is injective for every
/// n and rank >= 2^k identifies a sequence outside the image.
class Ccdm {
 public:
  explicit Ccdm(Composition comp);
  Ccdm(Composition comp, std::size_t input_bits);

  const Composition& composition() const { return comp_; }
  std::size_t input_bits() const { return k_; }
  std::size_t output_length() const { return comp_.length(); }
  double rate() const;

  std::vector<std::uint32_t> encode(std::span<const std::uint8_t> bits) const;
  /// Throws DmError on a composition mismatch or an out-of-image sequence.
  std::vector<std::uint8_t> decode(std::span<const std::uint32_t> letters) const;
  std::optional<std::vector<std::uint8_t>> try_decode(std::span<const std::uint32_t> letters) const;

 private:
  Composition comp_;
  std::size_t k_ = 0;
};

/// Serialised matcher frame. Little-endian layout:
///   "CCDM" | u32 n | u32 A | A x u32 counts | u32 k |
///   ceil(k/8) bytes of input bits (MSB first) | n bytes of letters.
struct DmFrame {
  Composition composition;
  std::size_t input_bits = 0;
  std::vector<std::uint8_t> data;
  std::vector<std::uint32_t> letters;
};

std::vector<std::uint8_t> write_dm_frame(const DmFrame& frame);
DmFrame read_dm_frame(std::span<const std::uint8_t> bytes);

/// Inverse-CDF sampler over a pmf driven by a 64-bit Mersenne Twister; the
/// draw sequence is identical on every platform for a given seed.
class PmfSampler {
 public:
  explicit PmfSampler(std::span<const double> pmf);
  std::uint32_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<double> cdf_;
};


/// Label bits of i.i.d. symbols drawn from a constellation's pmf.
struct ShapedBitStream {
  std::vector<std::uint32_t> symbols;
  std::vector<std::uint8_t> bits;  ///< symbol-major, label position order
  int bits_per_symbol = 0;
  std::vector<double> target_marginals;
  std::size_t frame_length = 0;  ///< symbols
};

/// Stand-in for a matcher: draws `count` symbols i.i.d. from c.pmf().
ShapedBitStream emulate_shaped_bits(const Constellation& c, std::size_t count, std::uint64_t seed);

}  // namespace pcs
