#include "pcs/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pcs/bitmapper.hpp"

namespace pcs {

namespace tables {
extern const char* const kRate34;
extern const char* const kRate45;
}  // namespace tables

double rate_value(CodeRate r) { return r == CodeRate::r3_4 ? 0.75 : 0.8; }

std::string rate_name(CodeRate r) { return r == CodeRate::r3_4 ? "3/4" : "4/5"; }

CodeRate parse_rate(std::string_view s) {
  if (s == "3/4" || s == "3_4") return CodeRate::r3_4;
  if (s == "4/5" || s == "4_5") return CodeRate::r4_5;
  throw std::invalid_argument("unsupported code rate '" + std::string(s) + "' (supported: 3/4, 4/5)");
}

std::string_view bundled_address_table(CodeRate r) {
  return r == CodeRate::r3_4 ? tables::kRate34 : tables::kRate45;
}

LdpcCode LdpcCode::from_address_table(std::string_view table, std::uint32_t n, std::uint32_t k) {
  if (k == 0 || k >= n || k % kGroup != 0 || (n - k) % kGroup != 0)
    throw std::invalid_argument("code dimensions must be positive multiples of 360 with k < n");
  LdpcCode code;
  code.n_ = n;
  code.k_ = k;
  const std::uint32_t m = n - k;
  const std::uint32_t q = m / kGroup;

  std::vector<std::vector<std::uint32_t>> rows;
  std::istringstream in{std::string(table)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::uint32_t> row;
    long long v;
    while (ls >> v) {
      if (v < 0 || v >= m) throw std::invalid_argument("address out of range in LDPC table");
      row.push_back(static_cast<std::uint32_t>(v));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != k / kGroup)
    throw std::invalid_argument("LDPC table has " + std::to_string(rows.size()) + " rows, expected " +
                                std::to_string(k / kGroup));

  code.info_ptr_.reserve(k + 1);
  code.info_ptr_.push_back(0);
  for (const auto& row : rows) {
    for (std::uint32_t j = 0; j < kGroup; ++j) {
      for (auto x : row) code.info_addr_.push_back((x + j * q) % m);
      std::sort(code.info_addr_.end() - row.size(), code.info_addr_.end());
      if (std::adjacent_find(code.info_addr_.end() - row.size(), code.info_addr_.end()) !=
          code.info_addr_.end())
        throw std::invalid_argument("LDPC table expands to a repeated parity address");
      code.info_ptr_.push_back(static_cast<std::uint32_t>(code.info_addr_.size()));
    }
  }

  std::vector<std::uint32_t> deg(m, 0);
  for (auto c : code.info_addr_) ++deg[c];
  for (std::uint32_t c = 0; c < m; ++c) deg[c] += (c == 0 ? 1 : 2);
  code.check_ptr_.assign(m + 1, 0);
  for (std::uint32_t c = 0; c < m; ++c) code.check_ptr_[c + 1] = code.check_ptr_[c] + deg[c];
  code.edge_var_.assign(code.check_ptr_[m], 0);
  std::vector<std::uint32_t> fill(code.check_ptr_.begin(), code.check_ptr_.end() - 1);
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t e = code.info_ptr_[i]; e < code.info_ptr_[i + 1]; ++e)
      code.edge_var_[fill[code.info_addr_[e]]++] = i;
  for (std::uint32_t c = 0; c < m; ++c) {
    if (c > 0) code.edge_var_[fill[c]++] = k + c - 1;
    code.edge_var_[fill[c]++] = k + c;
  }
  return code;
}

LdpcCode build_long_frame_code(CodeRate r) {
  constexpr std::uint32_t n = 64800;
  const std::uint32_t k = r == CodeRate::r3_4 ? 48600 : 51840;
  return LdpcCode::from_address_table(bundled_address_table(r), n, k);
}

std::vector<std::uint8_t> LdpcCode::encode(std::span<const std::uint8_t> info) const {
  if (info.size() != k_)
    throw std::invalid_argument("encoder expects " + std::to_string(k_) + " info bits, got " +
                                std::to_string(info.size()));
  std::vector<std::uint8_t> cw(n_, 0);
  std::copy(info.begin(), info.end(), cw.begin());
  std::uint8_t* parity = cw.data() + k_;
  for (std::uint32_t i = 0; i < k_; ++i) {
    if (!(info[i] & 1u)) continue;
    for (std::uint32_t e = info_ptr_[i]; e < info_ptr_[i + 1]; ++e) parity[info_addr_[e]] ^= 1u;
  }
  for (std::uint32_t c = 1; c < m(); ++c) parity[c] ^= parity[c - 1];
  return cw;
}

std::size_t LdpcCode::syndrome_weight(std::span<const std::uint8_t> codeword) const {
  if (codeword.size() != n_) throw std::invalid_argument("codeword length mismatch");
  std::size_t w = 0;
  for (std::uint32_t c = 0; c < m(); ++c) {
    std::uint8_t s = 0;
    for (std::uint32_t e = check_ptr_[c]; e < check_ptr_[c + 1]; ++e) s ^= codeword[edge_var_[e]] & 1u;
    w += s;
  }
  return w;
}

std::vector<std::uint32_t> LdpcCode::variable_degrees() const {
  std::vector<std::uint32_t> d(n_, 0);
  for (auto v : edge_var_) ++d[v];
  return d;
}

BpDecoder::BpDecoder(const LdpcCode& code, int max_iterations)
    : code_(&code), max_iter_(max_iterations) {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  c2v_.assign(code.edges(), 0.0f);
  v2c_.assign(code.edges(), 0.0f);
  total_.assign(code.n(), 0.0);
}

DecodeResult BpDecoder::decode(std::span<const double> llr) {
  const LdpcCode& code = *code_;
  const std::uint32_t n = code.n();
  if (llr.size() != n) throw std::invalid_argument("LLR vector length does not match the code");
  for (double l : llr)
    if (!std::isfinite(l)) throw std::invalid_argument("non-finite LLR");

  const auto ptr = code.check_ptr();
  const auto ev = code.edge_var();
  const std::size_t m = code.m();
  constexpr float kLlrCap = 30.0f;
  constexpr float kMaxTanh = 1.0f - 1e-7f;  // caps |c2v| near 16.6

  std::fill(c2v_.begin(), c2v_.end(), 0.0f);
  std::copy(llr.begin(), llr.end(), total_.begin());
  const std::size_t edges = ev.size();
  float* const c2v = c2v_.data();
  float* const t = v2c_.data();

  DecodeResult res;
  res.codeword.assign(n, 0);
  for (int it = 1; it <= max_iter_; ++it) {
    // Variable-to-check messages, stored directly as tanh(m/2).
    for (std::size_t e = 0; e < edges; ++e) t[e] = static_cast<float>(total_[ev[e]]) - c2v[e];
    for (std::size_t e = 0; e < edges; ++e) {
      const float x = std::clamp(t[e], -kLlrCap, kLlrCap);
      const float z = std::exp(-std::abs(x));
      t[e] = std::copysign((1.0f - z) / (1.0f + z), x);
    }
    // Extrinsic products, leaving tanh(c2v/2) in c2v.
    for (std::size_t c = 0; c < m; ++c) {
      const std::uint32_t b = ptr[c], d = ptr[c + 1] - b;
      float acc = 1.0f;
      for (std::uint32_t i = 0; i < d; ++i) {
        c2v[b + i] = acc;
        acc *= t[b + i];
      }
      acc = 1.0f;
      for (std::uint32_t i = d; i-- > 0;) {
        c2v[b + i] *= acc;
        acc *= t[b + i];
      }
    }
    for (std::size_t e = 0; e < edges; ++e) {
      const float y = std::min(std::abs(c2v[e]), kMaxTanh);
      c2v[e] = std::copysign(std::log((1.0f + y) / (1.0f - y)), c2v[e]);
    }

    std::copy(llr.begin(), llr.end(), total_.begin());
    for (std::size_t e = 0; e < edges; ++e) total_[ev[e]] += c2v[e];

    bool decided = true;
    for (std::uint32_t v = 0; v < n; ++v) {
      res.codeword[v] = total_[v] < 0.0 ? 1 : 0;
      if (total_[v] == 0.0) decided = false;
    }
    res.iterations = it;
    if (decided && code.is_codeword(res.codeword)) {
      res.converged = true;
      break;
    }
  }
  res.info.assign(res.codeword.begin(), res.codeword.begin() + code.k());
  return res;
}

BitMapper::BitMapper(std::vector<std::uint32_t> slot_of_bit, int bps)
    : slot_of_bit_(std::move(slot_of_bit)), bps_(bps) {
  if (bps < 1) throw std::invalid_argument("bits per symbol must be positive");
  if (slot_of_bit_.size() % bps != 0)
    throw std::invalid_argument("codeword length is not a multiple of the bits per symbol");
  bit_at_slot_.assign(slot_of_bit_.size(), static_cast<std::uint32_t>(slot_of_bit_.size()));
  for (std::size_t i = 0; i < slot_of_bit_.size(); ++i) {
    const auto s = slot_of_bit_[i];
    if (s >= slot_of_bit_.size() || bit_at_slot_[s] != slot_of_bit_.size())
      throw std::invalid_argument("bit mapper is not a bijection");
    bit_at_slot_[s] = static_cast<std::uint32_t>(i);
  }
}

BitMapper BitMapper::identity(std::size_t n, int bits_per_symbol) {
  std::vector<std::uint32_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<std::uint32_t>(i);
  return BitMapper(std::move(s), bits_per_symbol);
}

BitMapper BitMapper::from_slots(std::vector<std::uint32_t> slot_of_bit, int bits_per_symbol) {
  return BitMapper(std::move(slot_of_bit), bits_per_symbol);
}

BitMapper BitMapper::shaping_preserving(std::size_t n, std::size_t k, std::span<const double> p_one) {
  const int bps = static_cast<int>(p_one.size());
  if (bps < 1 || n % bps != 0) throw std::invalid_argument("codeword length is not a multiple of the label size");
  if (k > n) throw std::invalid_argument("k exceeds n");
  const std::size_t symbols = n / bps;
  std::vector<int> order(bps);
  for (int b = 0; b < bps; ++b) order[b] = b;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(p_one[a] - 0.5) < std::abs(p_one[b] - 0.5);
  });

  std::vector<std::uint32_t> slot_of_bit(n);
  std::vector<std::uint8_t> taken(n, 0);
  std::size_t parity = k;
  for (int pos : order) {
    for (std::size_t s = 0; s < symbols && parity < n; ++s) {
      const auto slot = static_cast<std::uint32_t>(s * bps + pos);
      slot_of_bit[parity++] = slot;
      taken[slot] = 1;
    }
  }
  std::size_t info = 0;
  for (std::size_t slot = 0; slot < n; ++slot)
    if (!taken[slot]) slot_of_bit[info++] = static_cast<std::uint32_t>(slot);
  return BitMapper(std::move(slot_of_bit), bps);
}

std::vector<std::uint8_t> BitMapper::map_bits(std::span<const std::uint8_t> codeword) const {
  if (codeword.size() != length()) throw std::invalid_argument("codeword length does not match the mapper");
  std::vector<std::uint8_t> out(length());
  for (std::size_t i = 0; i < length(); ++i) out[slot_of_bit_[i]] = codeword[i];
  return out;
}

std::vector<std::uint32_t> BitMapper::map_labels(std::span<const std::uint8_t> codeword) const {
  const auto bits = map_bits(codeword);
  std::vector<std::uint32_t> labels(symbols(), 0);
  for (std::size_t s = 0; s < labels.size(); ++s)
    for (int b = 0; b < bps_; ++b) labels[s] = (labels[s] << 1) | (bits[s * bps_ + b] & 1u);
  return labels;
}

std::vector<double> BitMapper::unmap_llrs(std::span<const double> slot_llrs) const {
  if (slot_llrs.size() != length()) throw std::invalid_argument("LLR length does not match the mapper");
  std::vector<double> out(length());
  for (std::size_t i = 0; i < length(); ++i) out[i] = slot_llrs[slot_of_bit_[i]];
  return out;
}

}  // namespace pcs
