#include <doctest.h>

#include <cmath>
#include <random>

#include "pcs/chain.hpp"
#include "pcs/metrics.hpp"
#include "pcs/rng.hpp"
#include "pcs/shaping.hpp"

using namespace pcs;

namespace {

constexpr double kChi2Df15 = 30.578;  // upper 1% point

std::vector<cplx> noisy(const CodedChain& chain, const CodedChain::TxFrame& tx, double var, std::uint64_t seed) {
  NormalSource g(seed);
  const double sd = std::sqrt(var / 2.0);
  std::vector<cplx> rx;
  for (auto s : tx.symbols) {
    const double re = g(), im = g();
    rx.push_back(chain.constellation().point(s) + sd * cplx(re, im));
  }
  return rx;
}

}  // namespace

TEST_CASE("both chains carry exactly 3 data bits per symbol") {
  for (auto m : {InputMode::uniform, InputMode::shaped}) {
    const auto spec = default_chain(m);
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.information_rate() == doctest::Approx(3.0).epsilon(1e-12));
    const CodedChain chain(spec);
    CHECK(chain.layout().symbols == 16200);
    CHECK(chain.layout().data_bits == 48600);
    CHECK(chain.layout().bits_per_symbol() == 3.0);
  }
  const CodedChain shaped(default_chain(InputMode::shaped), MatcherMode::ccdm);
  CHECK(shaped.layout().sign_data_bits == 19440);
  CHECK(shaped.layout().matcher_bits == 29160);
  CHECK(shaped.layout().parity_bits == 12960);
  CHECK(shaped.layout().sign_data_bits + shaped.layout().matcher_bits == 48600);
}

TEST_CASE("misconfigured rate plans are rejected") {
  ChainSpec swapped_u = default_chain(InputMode::uniform);
  swapped_u.rate = CodeRate::r4_5;
  CHECK_THROWS_WITH_AS(swapped_u.validate(), doctest::Contains("information rate"), std::invalid_argument);
  ChainSpec swapped_s = default_chain(InputMode::shaped);
  swapped_s.rate = CodeRate::r3_4;
  CHECK_THROWS_AS(swapped_s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(CodedChain{swapped_s}, std::invalid_argument);
  ChainSpec big = default_chain(InputMode::uniform);
  big.order = 64;
  CHECK_THROWS_AS(big.validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode("gaussian"), std::invalid_argument);
  CHECK(parse_matcher("ccdm") == MatcherMode::ccdm);
}

TEST_CASE("rate-matched pmf admits the matcher input and no more shaping than needed") {
  const auto pmf = rate_matched_pmf(build_qam(16), 16200, 29160);
  const auto c = build_qam(16).with_pmf(pmf);
  CHECK(c.entropy() > 3.8);
  CHECK(c.entropy() < 3.81);
  // Amplitude entropy per symbol must cover 29160 / 16200 = 1.8 bits.
  CHECK(c.entropy() - 2.0 >= 1.8);
  for (std::size_t i = 0; i < 16; ++i) CHECK(amplitude_letter(c, i) < 4);
}

TEST_CASE("shaped chain keeps parity on sign slots and the pmf at the modulator") {
  for (auto mm : {MatcherMode::emulate, MatcherMode::ccdm}) {
    const CodedChain chain(default_chain(InputMode::shaped), mm);
    const auto& code = chain.code();
    for (std::size_t b = code.k(); b < code.n(); ++b) {
      const int pos = static_cast<int>(chain.mapper().slot_of(b) % 4);
      REQUIRE((pos == 0 || pos == 2));
    }
    std::vector<double> obs(16, 0.0);
    for (int f = 0; f < 2; ++f)
      for (auto s : chain.transmit(100 + f).symbols) ++obs[s];
    double chi2 = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double e = chain.constellation().pmf()[i] * 2 * 16200;
      chi2 += (obs[i] - e) * (obs[i] - e) / e;
    }
    CAPTURE(matcher_name(mm));
    CHECK(chi2 < kChi2Df15);
  }
}

TEST_CASE("clean channel decodes without errors in every mode") {
  for (auto [mode, mm] : {std::pair{InputMode::uniform, MatcherMode::emulate},
                          std::pair{InputMode::shaped, MatcherMode::emulate},
                          std::pair{InputMode::shaped, MatcherMode::ccdm}}) {
    const CodedChain chain(default_chain(mode), mm);
    BpDecoder dec(chain.code());
    const auto tx = chain.transmit(7);
    const auto rx = noisy(chain, tx, db_to_linear(-15.0), 8);
    const auto r = chain.receive(tx, rx, db_to_linear(-15.0), dec);
    CAPTURE(mode_name(mode));
    CAPTURE(matcher_name(mm));
    CHECK(r.converged);
    CHECK(r.bit_errors == 0);
    CHECK_FALSE(r.matcher_failure);
    CHECK(r.bits == (mm == MatcherMode::ccdm ? 48600u : chain.code().k()));
  }
}

TEST_CASE("a hopeless channel reports errors and matcher failures") {
  const CodedChain chain(default_chain(InputMode::shaped), MatcherMode::ccdm);
  BpDecoder dec(chain.code(), 5);
  const auto tx = chain.transmit(9);
  const auto rx = noisy(chain, tx, 10.0, 10);
  const auto r = chain.receive(tx, rx, 10.0, dec);
  CHECK_FALSE(r.converged);
  CHECK(r.bit_errors > 0);
  CHECK(r.matcher_failure);
  CHECK_THROWS_AS(chain.receive(tx, std::span(rx).first(100), 1.0, dec), std::invalid_argument);
}

TEST_CASE("transmit is reproducible per seed") {
  const CodedChain chain(default_chain(InputMode::shaped));
  CHECK(chain.transmit(1).symbols == chain.transmit(1).symbols);
  CHECK(chain.transmit(1).symbols != chain.transmit(2).symbols);
}
