#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcs {

enum class CodeRate { r3_4, r4_5 };

double rate_value(CodeRate r);
std::string rate_name(CodeRate r);
CodeRate parse_rate(std::string_view s);

/// Systematic IRA LDPC code in the DVB-S2 long-frame layout: codeword =
/// [info (k) | parity (n-k)], parity produced by an accumulator from the
/// 360-periodic address table.
///
/// Parity check c involves the info bits whose expanded addresses contain c,
/// plus parity bits c and c-1.
class LdpcCode {
 public:
  static constexpr std::uint32_t kGroup = 360;

  /// Parses an address table (one row of parity addresses per group of 360
  /// info bits; '#' starts a comment line).
  static LdpcCode from_address_table(std::string_view table, std::uint32_t n, std::uint32_t k);

  std::uint32_t n() const { return n_; }
  std::uint32_t k() const { return k_; }
  std::uint32_t m() const { return n_ - k_; }
  double rate() const { return static_cast<double>(k_) / n_; }
  std::size_t edges() const { return edge_var_.size(); }

  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const;
  std::size_t syndrome_weight(std::span<const std::uint8_t> codeword) const;
  bool is_codeword(std::span<const std::uint8_t> codeword) const {
    return syndrome_weight(codeword) == 0;
  }

  /// Tanner graph, check-major CSR: the variables of check c are
  /// edge_var()[check_ptr()[c] .. check_ptr()[c+1]).
  std::span<const std::uint32_t> check_ptr() const { return check_ptr_; }
  std::span<const std::uint32_t> edge_var() const { return edge_var_; }
  std::vector<std::uint32_t> variable_degrees() const;

 private:
  std::uint32_t n_ = 0, k_ = 0;
  std::vector<std::uint32_t> info_ptr_, info_addr_;  // info bit -> parity addresses
  std::vector<std::uint32_t> check_ptr_, edge_var_;
};

/// Long-frame code (n = 64800) from the bundled address tables.
LdpcCode build_long_frame_code(CodeRate r);

/// Bundled address-table text for a rate.
std::string_view bundled_address_table(CodeRate r);

struct DecodeResult {
  std::vector<std::uint8_t> codeword;  ///< hard decisions, all n positions
  std::vector<std::uint8_t> info;      ///< first k positions
  int iterations = 0;
  bool converged = false;
};

/// Flooding sum-product decoder. LLR convention: positive favours bit 0.
/// Stops early once the hard decisions satisfy every check. A posterior LLR of
/// exactly zero is treated as undecided and prevents convergence.
/// One instance holds per-frame scratch and is not shareable across threads.
class BpDecoder {
 public:
  explicit BpDecoder(const LdpcCode& code, int max_iterations = 50);

  DecodeResult decode(std::span<const double> llr);
  int max_iterations() const { return max_iter_; }

 private:
  const LdpcCode* code_;
  int max_iter_;
  std::vector<float> c2v_, v2c_;
  std::vector<double> total_;
};

}  // namespace pcs
