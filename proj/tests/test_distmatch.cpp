#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "pcs/distmatch.hpp"
#include "pcs/shaping.hpp"

using namespace pcs;

namespace {

// Upper 1% points of the chi-square distribution.
constexpr double kChi2Df3 = 11.345;
constexpr double kChi2Df15 = 30.578;

double kl(const std::vector<std::uint32_t>& counts, const std::vector<double>& pmf) {
  double n = 0.0;
  for (auto c : counts) n += c;
  double d = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) d += counts[i] / n * std::log(counts[i] / n / pmf[i]);
  return d;
}

double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
  double x = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    if (expected[i] > 0.0) x += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  return x;
}

std::vector<std::uint8_t> bits_of(std::uint64_t v, std::size_t k) {
  std::vector<std::uint8_t> b(k);
  for (std::size_t i = 0; i < k; ++i) b[i] = (v >> (k - 1 - i)) & 1u;
  return b;
}

std::vector<double> operating_pmf() { return optimize_shaping(build_qam(16), db_to_linear(9.5)).pmf; }

}  // namespace

TEST_CASE("n-type quantisation examples") {
  CHECK(composition_from_pmf(std::vector<double>{0.5, 0.5}, 4).counts == std::vector<std::uint32_t>{2, 2});
  CHECK(composition_from_pmf(std::vector<double>(4, 0.25), 8).counts == std::vector<std::uint32_t>{2, 2, 2, 2});
  CHECK_THROWS_AS(composition_from_pmf(std::vector<double>(4, 0.25), 3), std::invalid_argument);
}

TEST_CASE("n-type is the KL minimiser among all compositions (exhaustive)") {
  const std::vector<double> pmf = {0.4, 0.3, 0.2, 0.1};
  const auto got = composition_from_pmf(pmf, 10);
  CHECK(got.length() == 10);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t a = 0; a <= 10; ++a)
    for (std::uint32_t b = 0; a + b <= 10; ++b)
      for (std::uint32_t c = 0; a + b + c <= 10; ++c) best = std::min(best, kl({a, b, c, 10 - a - b - c}, pmf));
  CHECK(kl(got.counts, pmf) == doctest::Approx(best).epsilon(1e-12));
  CHECK(type_divergence(got, pmf) == doctest::Approx(best).epsilon(1e-12));

  // Same check over random pmfs on 3 letters and several lengths.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(3);
    double s = 0.0;
    for (double& v : p) s += (v = unit_uniform(rng) + 0.01);
    for (double& v : p) v /= s;
    const std::uint32_t n = 3 + trial % 17;
    double opt = std::numeric_limits<double>::infinity();
    for (std::uint32_t a = 0; a <= n; ++a)
      for (std::uint32_t b = 0; a + b <= n; ++b) opt = std::min(opt, kl({a, b, n - a - b}, p));
    CHECK(kl(composition_from_pmf(p, n).counts, p) == doctest::Approx(opt).epsilon(1e-12));
  }
}

TEST_CASE("two-letter matcher with one bit reaches both orderings") {
  const Ccdm dm(Composition{{1, 1}});
  REQUIRE(dm.input_bits() == 1);
  const auto a = dm.encode(std::vector<std::uint8_t>{0});
  const auto b = dm.encode(std::vector<std::uint8_t>{1});
  CHECK(a != b);
  CHECK(std::set<std::vector<std::uint32_t>>{a, b} ==
        std::set<std::vector<std::uint32_t>>{{0, 1}, {1, 0}});
}

TEST_CASE("exhaustive round trip and image check at n = 8, composition (5, 3)") {
  const Ccdm dm(Composition{{5, 3}});
  REQUIRE(dm.input_bits() == 5);  // floor(log2 56)
  std::set<std::vector<std::uint32_t>> image;
  for (std::uint64_t v = 0; v < 32; ++v) {
    const auto bits = bits_of(v, 5);
    const auto seq = dm.encode(bits);
    CHECK(std::count(seq.begin(), seq.end(), 0u) == 5);
    CHECK(dm.decode(seq) == bits);
    image.insert(seq);
  }
  CHECK(image.size() == 32);

  int outside = 0;
  for (unsigned mask = 0; mask < 256; ++mask) {
    if (__builtin_popcount(mask) != 3) continue;
    std::vector<std::uint32_t> seq(8);
    for (int i = 0; i < 8; ++i) seq[i] = (mask >> i) & 1u;
    if (image.count(seq)) continue;
    ++outside;
    CHECK_THROWS_AS(dm.decode(seq), DmError);
    CHECK_FALSE(dm.try_decode(seq).has_value());
  }
  CHECK(outside == 24);
}

TEST_CASE("matcher rejects corrupted frames and oversized inputs") {
  const Ccdm dm(Composition{{5, 3}});
  CHECK_THROWS_AS(dm.decode(std::vector<std::uint32_t>{0, 0, 0, 0, 0, 0, 1, 1}), DmError);
  CHECK_THROWS_AS(dm.decode(std::vector<std::uint32_t>{0, 0, 0}), DmError);
  CHECK_THROWS_AS(dm.decode(std::vector<std::uint32_t>{0, 0, 0, 0, 0, 1, 1, 2}), DmError);
  CHECK_THROWS_AS(Ccdm(Composition{{5, 3}}, 6), std::invalid_argument);
  CHECK_THROWS_AS(dm.encode(std::vector<std::uint8_t>(4, 0)), std::invalid_argument);
}

TEST_CASE("single-letter alphabet carries no data") {
  const Ccdm dm(Composition{{8}});
  CHECK(dm.input_bits() == 0);
  const auto seq = dm.encode({});
  CHECK(seq == std::vector<std::uint32_t>(8, 0));
  CHECK(dm.decode(seq).empty());
}

TEST_CASE("random round trips at the operating distribution") {
  const auto comp = composition_from_pmf(operating_pmf(), 1024);
  const Ccdm dm(comp);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::uint8_t> bits(dm.input_bits());
    for (auto& b : bits) b = rng() & 1u;
    const auto seq = dm.encode(bits);
    std::vector<std::uint32_t> hist(16, 0);
    for (auto l : seq) ++hist[l];
    REQUIRE(hist == comp.counts);
    CHECK(dm.decode(seq) == bits);
  }
}

TEST_CASE("matcher rate approaches the composition entropy") {
  const auto pmf = operating_pmf();
  double prev = 0.0;
  for (std::uint32_t n : {64u, 256u, 1024u}) {
    const auto comp = composition_from_pmf(pmf, n);
    const Ccdm dm(comp);
    const double h = entropy_bits(comp.frequencies());
    CAPTURE(n);
    CHECK(dm.rate() <= h);
    CHECK(dm.rate() >= prev - 1e-3);
    CHECK(h - dm.rate() < 0.8 * std::log2(static_cast<double>(n)) * 15 / n);
    CHECK(comp.max_input_bits() == static_cast<std::size_t>(std::floor(comp.log2_sequences() + 1e-9)));
    prev = dm.rate();
  }
}

TEST_CASE("matcher frame serialisation") {
  const Ccdm dm(Composition{{5, 3}});
  DmFrame f;
  f.composition = dm.composition();
  f.input_bits = dm.input_bits();
  f.data = {1, 0, 1, 1, 0};
  f.letters = dm.encode(f.data);
  const auto bytes = write_dm_frame(f);
  CHECK(bytes.size() == 4 + 4 + 4 + 2 * 4 + 4 + 1 + 8);
  const auto g = read_dm_frame(bytes);
  CHECK(g.composition.counts == f.composition.counts);
  CHECK(g.input_bits == f.input_bits);
  CHECK(g.data == f.data);
  CHECK(g.letters == f.letters);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(read_dm_frame(bad), DmError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(read_dm_frame(bad), DmError);
}

TEST_CASE("emulated matcher output") {
  SUBCASE("uniform input gives balanced bits") {
    const auto s = emulate_shaped_bits(build_qam(16), 1 << 16, 5);
    const double n = static_cast<double>(s.symbols.size());
    for (int b = 0; b < 4; ++b) {
      double ones = 0.0;
      for (std::size_t i = 0; i < s.symbols.size(); ++i) ones += s.bits[i * 4 + b];
      CHECK(std::abs(ones / n - 0.5) < 4.0 * std::sqrt(0.25 / n));
    }
  }
  SUBCASE("a degenerate pmf gives a constant pattern") {
    std::vector<double> p(16, 0.0);
    p[9] = 1.0;
    const auto c = build_qam(16).with_pmf(p);
    const auto s = emulate_shaped_bits(c, 100, 1);
    for (std::size_t i = 0; i < 100; ++i) {
      CHECK(s.symbols[i] == 9);
      for (int b = 0; b < 4; ++b) CHECK(s.bits[i * 4 + b] == c.bit(9, b));
    }
  }
  SUBCASE("operating pmf passes a chi-square test over 2^16 symbols") {
    const auto c = build_qam(16).with_pmf(operating_pmf());
    const auto s = emulate_shaped_bits(c, 1 << 16, 77);
    std::vector<double> obs(16, 0.0), exp(16);
    for (auto x : s.symbols) ++obs[x];
    for (int i = 0; i < 16; ++i) exp[i] = c.pmf()[i] * s.symbols.size();
    CHECK(chi_square(obs, exp) < kChi2Df15);
    for (std::size_t b = 0; b < 4; ++b) CHECK(s.target_marginals[b] == c.bit_marginals().p_one[b]);
  }
  SUBCASE("same seed, same stream") {
    const auto c = build_qam(16).with_pmf(operating_pmf());
    CHECK(emulate_shaped_bits(c, 1000, 9).bits == emulate_shaped_bits(c, 1000, 9).bits);
    CHECK(emulate_shaped_bits(c, 1000, 9).bits != emulate_shaped_bits(c, 1000, 10).bits);
  }
}

TEST_CASE("emulation and matcher streams agree in distribution") {
  const auto pmf = operating_pmf();
  const auto comp = composition_from_pmf(pmf, 1024);
  const Ccdm dm(comp);
  std::mt19937_64 rng(21);
  std::vector<double> ccdm_hist(16, 0.0);
  for (int f = 0; f < 16; ++f) {
    std::vector<std::uint8_t> bits(dm.input_bits());
    for (auto& b : bits) b = rng() & 1u;
    for (auto l : dm.encode(bits)) ++ccdm_hist[l];
  }
  const auto s = emulate_shaped_bits(build_qam(16).with_pmf(pmf), 16 * 1024, 22);
  std::vector<double> emu(16, 0.0), exp(16);
  for (auto x : s.symbols) ++emu[x];
  for (int i = 0; i < 16; ++i) exp[i] = ccdm_hist[i];
  CHECK(chi_square(emu, exp) < kChi2Df15);

  // Amplitude classes pooled per rail: a coarser test with more mass per cell.
  std::vector<double> emu_rail(4, 0.0), dm_rail(4, 0.0);
  for (int i = 0; i < 16; ++i) {
    emu_rail[i / 4] += emu[i];
    dm_rail[i / 4] += ccdm_hist[i];
  }
  CHECK(chi_square(emu_rail, dm_rail) < kChi2Df3);
}

TEST_CASE("pmf sampler") {
  const std::vector<double> p = {0.0, 0.5, 0.0, 0.5};
  PmfSampler s(p);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto x = s(rng);
    CHECK((x == 1 || x == 3));
  }
  CHECK_THROWS_AS(PmfSampler(std::vector<double>(4, 0.0)), std::invalid_argument);
}
