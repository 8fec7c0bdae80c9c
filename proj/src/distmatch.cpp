#include "pcs/distmatch.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pcs {

std::uint32_t Composition::length() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint32_t{0});
}

double Composition::log2_sequences() const {
  double v = std::lgamma(static_cast<double>(length()) + 1.0);
  for (auto c : counts) v -= std::lgamma(static_cast<double>(c) + 1.0);
  return v / std::log(2.0);
}

namespace {

mpz_class multinomial(const std::vector<std::uint32_t>& counts) {
  std::uint32_t n = 0;
  for (auto c : counts) n += c;
  mpz_class num, den, f;
  mpz_fac_ui(num.get_mpz_t(), n);
  den = 1;
  for (auto c : counts) {
    mpz_fac_ui(f.get_mpz_t(), c);
    den *= f;
  }
  mpz_class r;
  mpz_divexact(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return r;
}

}  // namespace

std::size_t Composition::max_input_bits() const {
  const mpz_class m = multinomial(counts);
  return mpz_sizeinbase(m.get_mpz_t(), 2) - 1;
}

std::vector<double> Composition::frequencies() const {
  const double n = length();
  std::vector<double> f;
  for (auto c : counts) f.push_back(c / n);
  return f;
}

double type_divergence(const Composition& comp, std::span<const double> pmf) {
  const double n = comp.length();
  double d = 0.0;
  for (std::size_t i = 0; i < comp.counts.size(); ++i) {
    if (comp.counts[i] == 0) continue;
    if (pmf[i] <= 0.0) return std::numeric_limits<double>::infinity();
    const double f = comp.counts[i] / n;
    d += f * std::log(f / pmf[i]);
  }
  return d;
}

Composition composition_from_pmf(std::span<const double> pmf, std::uint32_t n) {
  const std::size_t a = pmf.size();
  if (a == 0) throw std::invalid_argument("empty pmf");
  if (n < a) throw std::invalid_argument("block length must be at least the alphabet size");
  Composition comp;
  comp.counts.assign(a, 0);
  std::vector<double> rem(a);
  std::uint32_t used = 0;
  for (std::size_t i = 0; i < a; ++i) {
    if (pmf[i] < 0.0) throw std::invalid_argument("negative probability");
    const double x = pmf[i] * n;
    comp.counts[i] = static_cast<std::uint32_t>(std::floor(x));
    rem[i] = x - comp.counts[i];
    used += comp.counts[i];
  }
  std::vector<std::size_t> order(a);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return rem[x] > rem[y]; });
  for (std::size_t j = 0; used < n; j = (j + 1) % a) {
    if (pmf[order[j]] <= 0.0) continue;
    ++comp.counts[order[j]];
    ++used;
  }

  // Each term f(c) = (c/n) ln(c/(n p)) is convex in c, so a composition that
  // no single-unit transfer improves is a global minimiser.
  auto term = [&](std::size_t i, double c) {
    return c <= 0.0 ? 0.0 : (c / n) * std::log(c / (n * pmf[i]));
  };
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t i = 0; i < a; ++i) {
      if (comp.counts[i] == 0) continue;
      const double loss = term(i, comp.counts[i] - 1.0) - term(i, comp.counts[i]);
      for (std::size_t j = 0; j < a; ++j) {
        if (j == i || pmf[j] <= 0.0) continue;
        const double gain = term(j, comp.counts[j] + 1.0) - term(j, comp.counts[j]);
        if (loss + gain < -1e-15) {
          --comp.counts[i];
          ++comp.counts[j];
          improved = true;
          break;
        }
      }
      if (comp.counts[i] == 0) continue;
    }
  }
  return comp;
}

Ccdm::Ccdm(Composition comp) : comp_(std::move(comp)) {
  if (comp_.counts.empty() || comp_.length() == 0)
    throw std::invalid_argument("composition must be nonempty");
  k_ = comp_.max_input_bits();
}

Ccdm::Ccdm(Composition comp, std::size_t input_bits) : Ccdm(std::move(comp)) {
  if (input_bits > k_)
    throw std::invalid_argument("matcher input of " + std::to_string(input_bits) +
                                " bits exceeds the " + std::to_string(k_) +
                                " bits supported by the composition");
  k_ = input_bits;
}

double Ccdm::rate() const { return static_cast<double>(k_) / comp_.length(); }

std::vector<std::uint32_t> Ccdm::encode(std::span<const std::uint8_t> bits) const {
  if (bits.size() != k_)
    throw std::invalid_argument("matcher expects " + std::to_string(k_) + " input bits, got " +
                                std::to_string(bits.size()));
  mpz_class index = 0;
  for (auto b : bits) {
    index <<= 1;
    if (b) index += 1;
  }
  std::vector<std::uint32_t> remaining = comp_.counts;
  std::uint32_t left = comp_.length();
  mpz_class total = multinomial(remaining);
  mpz_class branch;
  std::vector<std::uint32_t> out;
  out.reserve(left);
  for (; left > 0; --left) {
    std::size_t letter = 0;
    for (; letter < remaining.size(); ++letter) {
      if (remaining[letter] == 0) continue;
      // Sequences starting with `letter`: total * c_letter / left (exact).
      branch = total * remaining[letter];
      mpz_divexact_ui(branch.get_mpz_t(), branch.get_mpz_t(), left);
      if (index < branch) break;
      index -= branch;
    }
    out.push_back(static_cast<std::uint32_t>(letter));
    --remaining[letter];
    total = branch;
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> Ccdm::try_decode(
    std::span<const std::uint32_t> letters) const {
  try {
    return decode(letters);
  } catch (const DmError&) {
    return std::nullopt;
  }
}

std::vector<std::uint8_t> Ccdm::decode(std::span<const std::uint32_t> letters) const {
  if (letters.size() != comp_.length()) throw DmError("matcher frame has wrong length");
  std::vector<std::uint32_t> hist(comp_.counts.size(), 0);
  for (auto l : letters) {
    if (l >= hist.size()) throw DmError("letter outside the matcher alphabet");
    ++hist[l];
  }
  if (hist != comp_.counts) throw DmError("matcher frame composition mismatch");

  std::vector<std::uint32_t> remaining = comp_.counts;
  std::uint32_t left = comp_.length();
  mpz_class total = multinomial(remaining);
  mpz_class index = 0, branch;
  for (auto l : letters) {
    for (std::uint32_t b = 0; b < l; ++b) {
      if (remaining[b] == 0) continue;
      branch = total * remaining[b];
      mpz_divexact_ui(branch.get_mpz_t(), branch.get_mpz_t(), left);
      index += branch;
    }
    total *= remaining[l];
    mpz_divexact_ui(total.get_mpz_t(), total.get_mpz_t(), left);
    --remaining[l];
    --left;
  }
  if (mpz_sizeinbase(index.get_mpz_t(), 2) > k_ && index != 0)
    throw DmError("sequence is not in the matcher image");
  std::vector<std::uint8_t> bits(k_);
  for (std::size_t i = 0; i < k_; ++i)
    bits[k_ - 1 - i] = static_cast<std::uint8_t>(mpz_tstbit(index.get_mpz_t(), i));
  return bits;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw DmError("truncated matcher frame");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

std::vector<std::uint8_t> write_dm_frame(const DmFrame& frame) {
  const auto& counts = frame.composition.counts;
  if (counts.size() > 256) throw std::invalid_argument("frame format supports at most 256 letters");
  if (frame.data.size() != frame.input_bits)
    throw std::invalid_argument("frame data length does not match k");
  std::vector<std::uint8_t> out = {'C', 'C', 'D', 'M'};
  put_u32(out, frame.composition.length());
  put_u32(out, static_cast<std::uint32_t>(counts.size()));
  for (auto c : counts) put_u32(out, c);
  put_u32(out, static_cast<std::uint32_t>(frame.input_bits));
  std::vector<std::uint8_t> packed((frame.input_bits + 7) / 8, 0);
  for (std::size_t i = 0; i < frame.input_bits; ++i)
    if (frame.data[i]) packed[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  out.insert(out.end(), packed.begin(), packed.end());
  for (auto l : frame.letters) out.push_back(static_cast<std::uint8_t>(l));
  return out;
}

DmFrame read_dm_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'C' || bytes[1] != 'C' || bytes[2] != 'D' || bytes[3] != 'M')
    throw DmError("bad matcher frame magic");
  std::size_t pos = 4;
  DmFrame f;
  const std::uint32_t n = get_u32(bytes, pos);
  const std::uint32_t a = get_u32(bytes, pos);
  for (std::uint32_t i = 0; i < a; ++i) f.composition.counts.push_back(get_u32(bytes, pos));
  if (f.composition.length() != n) throw DmError("frame counts do not sum to n");
  f.input_bits = get_u32(bytes, pos);
  const std::size_t nbytes = (f.input_bits + 7) / 8;
  if (pos + nbytes + n != bytes.size()) throw DmError("matcher frame payload size mismatch");
  f.data.resize(f.input_bits);
  for (std::size_t i = 0; i < f.input_bits; ++i)
    f.data[i] = (bytes[pos + i / 8] >> (7 - i % 8)) & 1u;
  pos += nbytes;
  for (std::uint32_t i = 0; i < n; ++i) f.letters.push_back(bytes[pos + i]);
  return f;
}

PmfSampler::PmfSampler(std::span<const double> pmf) {
  double acc = 0.0;
  for (double p : pmf) {
    acc += p;
    cdf_.push_back(acc);
  }
  if (cdf_.empty() || !(acc > 0.0)) throw std::invalid_argument("pmf has no mass");
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::uint32_t PmfSampler::operator()(std::mt19937_64& rng) const {
  const double u = unit_uniform(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  // Skip zero-mass letters sharing the same cdf value.
  return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
}

ShapedBitStream emulate_shaped_bits(const Constellation& c, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("symbol count must be positive");
  ShapedBitStream s;
  s.bits_per_symbol = c.bits_per_symbol();
  s.target_marginals = c.bit_marginals().p_one;
  s.frame_length = count;
  std::mt19937_64 rng(seed);
  PmfSampler sample(c.pmf());
  s.symbols.reserve(count);
  s.bits.reserve(count * s.bits_per_symbol);
  for (std::size_t i = 0; i < count; ++i) {
    const auto sym = sample(rng);
    s.symbols.push_back(sym);
    for (int b = 0; b < s.bits_per_symbol; ++b) s.bits.push_back(static_cast<std::uint8_t>(c.bit(sym, b)));
  }
  return s;
}

}  // namespace pcs
