#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcs/bitmapper.hpp"
#include "pcs/constellation.hpp"
#include "pcs/distmatch.hpp"
#include "pcs/ldpc.hpp"

namespace pcs {

enum class InputMode { uniform, shaped };
enum class MatcherMode { emulate, ccdm };

std::string mode_name(InputMode m);
InputMode parse_mode(std::string_view s);
std::string matcher_name(MatcherMode m);
MatcherMode parse_matcher(std::string_view s);

/// Rate plan of a coded-modulation chain. The shaped chain feeds
/// `matcher_in` data bits per symbol to a matcher that emits `matcher_out`
/// shaped bits per symbol, which must exactly fill the systematic part of
/// the code.
struct ChainSpec {
  InputMode mode = InputMode::uniform;
  CodeRate rate = CodeRate::r3_4;
  int order = 16;
  double matcher_in = 3.0;
  double matcher_out = 3.2;

  /// Data bits per QAM symbol per polarisation.
  double information_rate() const;
  /// Throws std::invalid_argument unless the plan is consistent and carries
  /// exactly `target` bits per symbol.
  void validate(double target = 3.0) const;
};

/// Uniform: 16-QAM with the rate-3/4 code. Shaped: matcher 3 -> 3.2 bits
/// with the rate-4/5 code.
ChainSpec default_chain(InputMode m);

/// Per-frame bit budget.
struct FrameLayout {
  std::size_t symbols = 0;
  std::size_t data_bits = 0;       ///< uniform data entering the chain
  std::size_t matcher_bits = 0;    ///< part of data_bits going through the matcher
  std::size_t sign_data_bits = 0;  ///< part of data_bits carried on sign slots
  std::size_t parity_bits = 0;
  double bits_per_symbol() const { return static_cast<double>(data_bits) / static_cast<double>(symbols); }
};

/// MB pmf on the template whose amplitude-class composition over `letters`
/// symbols admits at least `matcher_bits` input bits, with the largest such
/// nu. Letters are the (|I|, |Q|) amplitude pairs; sign bits stay uniform.
std::vector<double> rate_matched_pmf(const Constellation& tmpl, std::size_t letters, std::size_t matcher_bits);

/// Amplitude letter of a 16-QAM point: 2 * (I amplitude bit) + (Q amplitude bit).
std::uint32_t amplitude_letter(const Constellation& c, std::size_t point);

/// Shared, lazily built long-frame code.
const LdpcCode& shared_code(CodeRate r);

/// One LDPC frame of a chain: uniform bits -> (matcher) -> encoder ->
/// mapper -> symbols, and back from received samples with prior-aware LLRs.
class CodedChain {
 public:
  explicit CodedChain(const ChainSpec& spec, MatcherMode matcher = MatcherMode::emulate);

  const ChainSpec& spec() const { return spec_; }
  MatcherMode matcher_mode() const { return matcher_; }
  const Constellation& constellation() const { return constellation_; }
  const LdpcCode& code() const { return *code_; }
  const BitMapper& mapper() const { return mapper_; }
  const FrameLayout& layout() const { return layout_; }
  std::size_t symbols_per_frame() const { return layout_.symbols; }

  struct TxFrame {
    std::vector<std::uint8_t> reference;  ///< bits the BER is measured on
    std::vector<std::uint32_t> symbols;   ///< constellation indices
  };
  struct RxFrame {
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    bool converged = false;
    int iterations = 0;
    bool matcher_failure = false;
  };

  /// Emulation and uniform chains measure BER on the k code information
  /// bits; the matcher chain on the data bits after dematching.
  TxFrame transmit(std::uint64_t seed) const;
  RxFrame receive(const TxFrame& tx, std::span<const cplx> rx, double noise_variance, BpDecoder& decoder) const;

 private:
  std::vector<std::uint8_t> info_from_symbols(std::span<const std::uint32_t> symbols) const;

  ChainSpec spec_;
  MatcherMode matcher_;
  const LdpcCode* code_;
  Constellation constellation_;
  BitMapper mapper_;
  FrameLayout layout_;
  std::optional<Ccdm> ccdm_;
};

}  // namespace pcs
