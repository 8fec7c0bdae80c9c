#include "pcs/chain.hpp"

#include <cmath>
#include <stdexcept>

#include "pcs/metrics.hpp"
#include "pcs/rng.hpp"
#include "pcs/shaping.hpp"

namespace pcs {

namespace {

constexpr int kSignA = 0, kAmpA = 1, kSignB = 2, kAmpB = 3;  // 16-QAM label positions

bool is_sign(int pos) { return pos == kSignA || pos == kSignB; }

std::vector<double> letter_pmf(const Constellation& c) {
  std::vector<double> p(4, 0.0);
  for (int i = 0; i < c.order(); ++i) p[amplitude_letter(c, i)] += c.pmf()[i];
  return p;
}

BitMapper mapper_for(const Constellation& c, const LdpcCode& code) {
  return BitMapper::shaping_preserving(code.n(), code.k(), c.bit_marginals().p_one);
}

}  // namespace

std::string mode_name(InputMode m) { return m == InputMode::uniform ? "uniform" : "shaped"; }

InputMode parse_mode(std::string_view s) {
  if (s == "uniform") return InputMode::uniform;
  if (s == "shaped") return InputMode::shaped;
  throw std::invalid_argument("unknown input mode '" + std::string(s) + "' (uniform | shaped)");
}

std::string matcher_name(MatcherMode m) { return m == MatcherMode::emulate ? "emulate" : "ccdm"; }

MatcherMode parse_matcher(std::string_view s) {
  if (s == "emulate") return MatcherMode::emulate;
  if (s == "ccdm") return MatcherMode::ccdm;
  throw std::invalid_argument("unknown matcher mode '" + std::string(s) + "' (emulate | ccdm)");
}

double ChainSpec::information_rate() const {
  const double coded = rate_value(rate) * std::log2(static_cast<double>(order));
  return mode == InputMode::uniform ? coded : coded * matcher_in / matcher_out;
}

void ChainSpec::validate(double target) const {
  if (order != 16) throw std::invalid_argument("coded chains are defined for 16-QAM only");
  if (mode == InputMode::shaped) {
    if (!(matcher_in > 0.0) || !(matcher_out >= matcher_in))
      throw std::invalid_argument("matcher must map data bits to at least as many shaped bits");
    const double systematic = rate_value(rate) * std::log2(static_cast<double>(order));
    if (std::abs(systematic - matcher_out) > 1e-9)
      throw std::invalid_argument("matcher output of " + std::to_string(matcher_out) +
                                  " bits/symbol does not fill the " + std::to_string(systematic) +
                                  " systematic bits/symbol of the rate-" + rate_name(rate) + " code");
  }
  const double r = information_rate();
  if (std::abs(r - target) > 1e-9)
    throw std::invalid_argument("information rate " + std::to_string(r) + " bits/symbol differs from the target " +
                                std::to_string(target) + " (" + mode_name(mode) + " chain, rate " + rate_name(rate) + ")");
}

ChainSpec default_chain(InputMode m) {
  ChainSpec s;
  s.mode = m;
  s.rate = m == InputMode::uniform ? CodeRate::r3_4 : CodeRate::r4_5;
  return s;
}

std::uint32_t amplitude_letter(const Constellation& c, std::size_t point) {
  return static_cast<std::uint32_t>(2 * c.bit(point, kAmpA) + c.bit(point, kAmpB));
}

std::vector<double> rate_matched_pmf(const Constellation& tmpl, std::size_t letters, std::size_t matcher_bits) {
  if (tmpl.order() != 16) throw std::invalid_argument("rate matching is defined for 16-QAM");
  auto bits_at = [&](double nu) {
    const auto letters_pmf = letter_pmf(tmpl.with_pmf(mb_pmf(tmpl, nu)));
    return composition_from_pmf(letters_pmf, static_cast<std::uint32_t>(letters)).max_input_bits();
  };
  if (bits_at(0.0) < matcher_bits)
    throw std::invalid_argument("matcher rate exceeds what uniform amplitudes can carry");
  double lo = 0.0, hi = 1.0;
  while (bits_at(hi) >= matcher_bits) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bits_at(mid) >= matcher_bits ? lo : hi) = mid;
  }
  return mb_pmf(tmpl, lo);
}

const LdpcCode& shared_code(CodeRate r) {
  static const LdpcCode r34 = build_long_frame_code(CodeRate::r3_4);
  static const LdpcCode r45 = build_long_frame_code(CodeRate::r4_5);
  return r == CodeRate::r3_4 ? r34 : r45;
}

CodedChain::CodedChain(const ChainSpec& spec, MatcherMode matcher)
    : spec_(spec),
      matcher_(matcher),
      code_(&shared_code(spec.rate)),
      mapper_(BitMapper::identity(code_->n(), 4)) {
  spec_.validate();
  const Constellation tmpl = Constellation::qam(spec_.order);
  const std::size_t bps = static_cast<std::size_t>(tmpl.bits_per_symbol());
  layout_.symbols = code_->n() / bps;
  layout_.parity_bits = code_->m();
  layout_.data_bits = static_cast<std::size_t>(std::llround(spec_.information_rate() * static_cast<double>(layout_.symbols)));
  if (spec_.mode == InputMode::uniform) {
    constellation_ = tmpl;
  } else {
    const std::size_t sign_slots = 2 * layout_.symbols;
    if (layout_.parity_bits > sign_slots) throw std::invalid_argument("parity does not fit on the sign slots");
    layout_.sign_data_bits = sign_slots - layout_.parity_bits;
    layout_.matcher_bits = layout_.data_bits - layout_.sign_data_bits;
    constellation_ = tmpl.with_pmf(rate_matched_pmf(tmpl, layout_.symbols, layout_.matcher_bits)).with_power(1.0);
    if (matcher_ == MatcherMode::ccdm)
      ccdm_.emplace(composition_from_pmf(letter_pmf(constellation_), static_cast<std::uint32_t>(layout_.symbols)),
                    layout_.matcher_bits);
  }
  mapper_ = mapper_for(constellation_, *code_);
  if (spec_.mode == InputMode::shaped) {
    // Every parity bit must sit on a sign slot for the pmf to survive encoding.
    for (std::size_t i = code_->k(); i < code_->n(); ++i)
      if (!is_sign(static_cast<int>(mapper_.slot_of(i) % bps)))
        throw std::logic_error("parity bit mapped onto an amplitude slot");
  }
}

std::vector<std::uint8_t> CodedChain::info_from_symbols(std::span<const std::uint32_t> symbols) const {
  const int bps = constellation_.bits_per_symbol();
  std::vector<std::uint8_t> info(code_->k());
  for (std::size_t i = 0; i < info.size(); ++i) {
    const auto slot = mapper_.slot_of(i);
    info[i] = static_cast<std::uint8_t>(constellation_.bit(symbols[slot / bps], static_cast<int>(slot % bps)));
  }
  return info;
}

CodedChain::TxFrame CodedChain::transmit(std::uint64_t seed) const {
  const int bps = constellation_.bits_per_symbol();
  const std::size_t k = code_->k();
  std::mt19937_64 rng(seed);
  TxFrame tx;
  std::vector<std::uint8_t> info;

  if (spec_.mode == InputMode::uniform) {
    info.resize(k);
    for (auto& b : info) b = static_cast<std::uint8_t>(rng() >> 63);
    tx.reference = info;
  } else if (matcher_ == MatcherMode::emulate) {
    PmfSampler sample(constellation_.pmf());
    std::vector<std::uint32_t> drawn(layout_.symbols);
    for (auto& s : drawn) s = sample(rng);
    info = info_from_symbols(drawn);
    tx.reference = info;
  } else {
    std::vector<std::uint8_t> data(layout_.data_bits);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng() >> 63);
    const std::span<const std::uint8_t> signs(data.data(), layout_.sign_data_bits);
    const auto letters = ccdm_->encode(std::span(data).subspan(layout_.sign_data_bits));
    info.resize(k);
    std::size_t next_sign = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto slot = mapper_.slot_of(i);
      const int pos = static_cast<int>(slot % bps);
      const auto letter = letters[slot / bps];
      if (is_sign(pos)) info[i] = signs[next_sign++];
      else info[i] = static_cast<std::uint8_t>(pos == kAmpA ? (letter >> 1) & 1u : letter & 1u);
    }
    tx.reference = std::move(data);
  }

  const auto cw = code_->encode(info);
  const auto labels = mapper_.map_labels(cw);
  tx.symbols.reserve(labels.size());
  for (auto l : labels) tx.symbols.push_back(static_cast<std::uint32_t>(constellation_.index_of_label(l)));
  return tx;
}

CodedChain::RxFrame CodedChain::receive(const TxFrame& tx, std::span<const cplx> rx, double noise_variance,
                                        BpDecoder& decoder) const {
  if (rx.size() != layout_.symbols) throw std::invalid_argument("received frame has the wrong symbol count");
  const auto llr = mapper_.unmap_llrs(compute_llrs(rx, constellation_, noise_variance));
  const auto dec = decoder.decode(llr);
  RxFrame out;
  out.converged = dec.converged;
  out.iterations = dec.iterations;
  if (spec_.mode == InputMode::uniform || matcher_ == MatcherMode::emulate) {
    out.bits = dec.info.size();
    out.bit_errors = count_bit_errors(dec.info, tx.reference);
    return out;
  }

  const int bps = constellation_.bits_per_symbol();
  std::vector<std::uint8_t> data;
  data.reserve(layout_.data_bits);
  std::vector<std::uint32_t> letters(layout_.symbols, 0);
  for (std::size_t i = 0; i < dec.info.size(); ++i) {
    const auto slot = mapper_.slot_of(i);
    const int pos = static_cast<int>(slot % bps);
    if (is_sign(pos)) data.push_back(dec.info[i]);
    else letters[slot / bps] |= static_cast<std::uint32_t>(dec.info[i]) << (pos == kAmpA ? 1 : 0);
  }
  auto dm = ccdm_->try_decode(letters);
  if (!dm) {
    out.matcher_failure = true;
    dm.emplace(layout_.matcher_bits, 0);
  }
  data.insert(data.end(), dm->begin(), dm->end());
  out.bits = data.size();
  out.bit_errors = count_bit_errors(data, tx.reference);
  return out;
}

}  // namespace pcs
