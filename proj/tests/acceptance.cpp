// Acceptance suite: one PASS/FAIL line per criterion. `--criterion N` runs
// a single criterion; the exit code is nonzero if any selected one fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "pcs/chain.hpp"
#include "pcs/distmatch.hpp"
#include "pcs/experiment.hpp"
#include "pcs/fiber.hpp"
#include "pcs/ldpc.hpp"
#include "pcs/linkmodel.hpp"
#include "pcs/metrics.hpp"
#include "pcs/rng.hpp"
#include "pcs/shaping.hpp"

using namespace pcs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_l2(const WaveformFrame& a, const WaveformFrame& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.x[i] - b.x[i]) + std::norm(a.y[i] - b.y[i]);
    den += std::norm(b.x[i]) + std::norm(b.y[i]);
  }
  return std::sqrt(num / den);
}

Outcome awgn_shaping_gain() {
  const auto cfg = make_config(Preset::desk);
  const auto s = run_awgn_validation(cfg);
  const double ber_gap = s.crossing_db[0] - s.crossing_db[1];
  const double mi_gap = s.mi_threshold_db[0] - s.mi_threshold_db[1];
  const bool pass = std::isfinite(ber_gap) && ber_gap > 0.1 && std::abs(ber_gap - mi_gap) <= 0.2;
  return {pass, fmt("BER 1.3e-3 at uniform %.3f dB, shaped %.3f dB (gap %.3f dB); MI = 3 gap %.3f dB; "
                    "|difference| %.3f dB (<= 0.2), gap > 0.1",
                    s.crossing_db[0], s.crossing_db[1], ber_gap, mi_gap, std::abs(ber_gap - mi_gap))};
}

Outcome fiber_mi_ordering() {
  auto cfg = make_config(Preset::desk);
  cfg.spans = {10, 30, 40, 50, 60};
  cfg.launch_dbm = {-1.0};
  const auto rows = run_mi_sweep(cfg);
  std::map<int, std::map<InputMode, double>> mi;
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.ok;
    mi[r.spans][r.mode] = r.mi;
  }
  auto gain = [&](int n) { return mi[n][InputMode::shaped] - mi[n][InputMode::uniform]; };
  bool pass = ok && std::abs(gain(10)) <= 0.05;
  for (int n : {40, 50, 60}) pass = pass && gain(n) >= 0.0;
  pass = pass && gain(50) >= gain(40) && gain(60) >= gain(50);
  std::string detail = "launch -1 dBm; shaped - uniform MI:";
  for (int n : cfg.spans) detail += fmt(" %d spans %+.4f", n, gain(n));
  return {pass, detail + " (|10 spans| <= 0.05, >= 0 and nondecreasing from 40)"};
}

Outcome gn_launch_power() {
  LinkConfig link;
  link.num_spans = 40;
  const auto opt = optimal_launch_power(link);
  const bool pass = !opt.at_boundary && opt.power_dbm >= -2.6 && opt.power_dbm <= -0.6;
  return {pass, fmt("optimum %.3f dBm, SNR %.2f dB at %d spans (window [-2.6, -0.6])", opt.power_dbm,
                    linear_to_db(opt.snr), link.num_spans)};
}

Outcome shaping_geometry() {
  const auto tmpl = build_qam(16);
  const double d_uniform = tmpl.min_distance();
  auto ratio = [&](double db) { return optimize_shaping(tmpl, db_to_linear(db)).constellation.min_distance() / d_uniform; };
  // Coarse scan for a bracket of the 1.18 crossing, then bisection.
  double lo = NAN, hi = NAN;
  double prev_db = 4.0, prev = ratio(prev_db);
  for (double db = 5.0; db <= 16.0; db += 1.0) {
    const double r = ratio(db);
    if ((prev - 1.18) * (r - 1.18) <= 0.0) {
      lo = prev_db;
      hi = db;
      break;
    }
    prev_db = db;
    prev = r;
  }
  if (std::isnan(lo)) return {false, "no SNR in [4, 16] dB brackets a 1.18 distance ratio"};
  const bool falling = ratio(lo) > ratio(hi);
  for (int i = 0; i < 10; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((ratio(mid) > 1.18) == falling ? lo : hi) = mid;
  }
  const double db = 0.5 * (lo + hi);
  const auto sol = optimize_shaping(tmpl, db_to_linear(db));
  const double r = sol.constellation.min_distance() / d_uniform;
  const double mi_u = awgn_mi(tmpl, db_to_linear(db));
  const bool pass = std::abs(r - 1.18) <= 0.02 && sol.predicted_mi > mi_u;
  return {pass, fmt("at %.3f dB: distance ratio %.4f (1.18 +- 0.02), nu %.4f, H %.4f, MI shaped %.4f > uniform %.4f",
                    db, r, sol.nu, sol.constellation.entropy(), sol.predicted_mi, mi_u)};
}

Outcome ssfm_suite() {
  const auto cfg = make_config(Preset::desk);
  const auto& link = cfg.link;
  const double amp = std::sqrt(link.launch_power_w() / 2.0);
  const auto c = build_qam(16);
  std::mt19937_64 rng(17);
  std::vector<WaveformFrame> channels;
  for (int ch = 0; ch < link.wdm_channels; ++ch) {
    std::vector<cplx> sx(cfg.symbols), sy(cfg.symbols);
    for (auto& v : sx) v = amp * c.point(rng() % 16);
    for (auto& v : sy) v = amp * c.point(rng() % 16);
    channels.push_back(modulate(sx, sy, cfg.ssfm.oversampling, link.rolloff, link.baud));
  }
  const auto in = wdm_mux(channels, wdm_grid(link.wdm_channels, link.wdm_spacing_hz), (1.0 + link.rolloff) * link.baud);
  const double span = link.span_length_km * 1e3;
  const auto full = fiber_params(link);

  FiberParams cd_only = full;
  cd_only.alpha_db_per_km = 0.0;
  cd_only.gamma_per_w_km = 0.0;
  const double cd_err = rel_l2(cd_compensate(ssfm_propagate(in, cd_only, cfg.ssfm, span), cd_only, span), in);

  FiberParams spm_only = full;
  spm_only.alpha_db_per_km = 0.0;
  spm_only.dispersion_ps_nm_km = 0.0;
  WaveformFrame strong = in;
  for (auto& v : strong.x) v *= 10.0;
  for (auto& v : strong.y) v *= 10.0;
  WaveformFrame spm_ref = strong;
  for (std::size_t i = 0; i < strong.size(); ++i) {
    const double phase = 8.0 / 9.0 * spm_only.gamma_per_w_m() * (std::norm(strong.x[i]) + std::norm(strong.y[i])) * span;
    spm_ref.x[i] *= std::polar(1.0, phase);
    spm_ref.y[i] *= std::polar(1.0, phase);
  }
  const double spm_err = rel_l2(ssfm_propagate(strong, spm_only, cfg.ssfm, span), spm_ref);

  FiberParams loss = full;
  loss.gamma_per_w_km = 0.0;
  const double loss_db = -10.0 * std::log10(ssfm_propagate(in, loss, cfg.ssfm, span).power() / in.power());

  SsfmConfig half = cfg.ssfm;
  half.step_m /= 2.0;
  const double drift = rel_l2(ssfm_propagate(in, full, cfg.ssfm, span), ssfm_propagate(in, full, half, span));

  const bool pass = cd_err <= 1e-6 && spm_err <= 1e-6 && std::abs(loss_db - 20.0) <= 1e-9 && drift < 1e-4;
  return {pass, fmt("desk field (%d ch, %zu symbols): CD inversion %.2e, SPM %.2e (<= 1e-6), loss %.12f dB (20), "
                    "%.0f vs %.0f m drift %.2e (< 1e-4)",
                    link.wdm_channels, cfg.symbols, cd_err, spm_err, loss_db, cfg.ssfm.step_m, half.step_m, drift)};
}

Outcome mi_calibration() {
  const std::size_t n = std::size_t{1} << 16;
  const auto tmpl = build_qam(16);
  bool pass = true;
  std::string detail = "KDE - quadrature:";
  for (double db : {5.0, 10.0, 15.0}) {
    const double snr = db_to_linear(db);
    for (bool shaped : {false, true}) {
      const Constellation c = shaped ? optimize_shaping(tmpl, snr).constellation : tmpl;
      const PmfSampler draw(c.pmf());
      std::mt19937_64 rng(derive_seed(23, static_cast<std::uint64_t>(db) * 2 + shaped));
      NormalSource noise(derive_seed(29, static_cast<std::uint64_t>(db) * 2 + shaped));
      const double sd = std::sqrt(c.average_power() / snr / 2.0);
      std::vector<SymbolRecord> records(n);
      for (auto& r : records) {
        r.tx = draw(rng);
        const double re = noise(), im = noise();
        r.rx = c.point(r.tx) + sd * cplx(re, im);
      }
      const double delta = estimate_mi(records, c) - awgn_mi(c, snr);
      pass = pass && std::abs(delta) <= 0.02;
      detail += fmt(" %s@%.0fdB %+.4f", shaped ? "shaped" : "uniform", db, delta);
    }
  }
  return {pass, detail + " (|delta| <= 0.02)"};
}

Outcome chain_integrity() {
  std::string detail;
  bool pass = true;
  for (auto r : {CodeRate::r3_4, CodeRate::r4_5}) {
    const auto& code = shared_code(r);
    std::mt19937_64 rng(31);
    int clean = 0;
    for (int f = 0; f < 100; ++f) {
      std::vector<std::uint8_t> info(code.k());
      for (auto& b : info) b = static_cast<std::uint8_t>(rng() & 1u);
      clean += code.is_codeword(code.encode(info));
    }
    pass = pass && clean == 100 && code.n() == 64800;
    detail += fmt("(%u, %u) %d/100 zero syndrome; ", code.n(), code.k(), clean);
  }

  // Every input of each toy matcher round-trips, and exactly the type-class
  // members outside the image are rejected.
  for (const std::vector<std::uint32_t>& counts : {std::vector<std::uint32_t>{5, 3}, {2, 2, 1, 1}, {3, 2, 2, 1}}) {
    const Ccdm dm(Composition{counts});
    std::set<std::vector<std::uint32_t>> image;
    bool ok = true;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << dm.input_bits()); ++v) {
      std::vector<std::uint8_t> bits(dm.input_bits());
      for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (v >> (bits.size() - 1 - i)) & 1u;
      const auto seq = dm.encode(bits);
      ok = ok && dm.decode(seq) == bits;
      image.insert(seq);
    }
    std::vector<std::uint32_t> seq;
    for (std::uint32_t a = 0; a < counts.size(); ++a) seq.insert(seq.end(), counts[a], a);
    std::size_t members = 0;
    do {
      ++members;
      ok = ok && dm.try_decode(seq).has_value() == image.contains(seq);
    } while (std::next_permutation(seq.begin(), seq.end()));
    ok = ok && image.size() == (std::size_t{1} << dm.input_bits());
    pass = pass && ok;
    detail += fmt("CCDM n=%u k=%zu %zu/%zu sequences %s; ", dm.composition().length(), dm.input_bits(), image.size(),
                  members, ok ? "exact" : "MISMATCH");
  }

  for (auto mode : {InputMode::uniform, InputMode::shaped}) {
    const CodedChain chain(default_chain(mode), MatcherMode::ccdm);
    const auto& l = chain.layout();
    const bool exact = l.data_bits == 3 * l.symbols;
    pass = pass && exact;
    detail += fmt("%s %zu/%zu = %.3f bits/symbol/pol; ", mode_name(mode).c_str(), l.data_bits, l.symbols,
                  l.bits_per_symbol());
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-7)")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "AWGN shaping gain", awgn_shaping_gain},
      {2, "desk fiber MI ordering", fiber_mi_ordering},
      {3, "GN launch power", gn_launch_power},
      {4, "shaping geometry", shaping_geometry},
      {5, "SSFM analytic suite", ssfm_suite},
      {6, "MI estimator calibration", mi_calibration},
      {7, "code and chain integrity", chain_integrity},
  };
  int failures = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s | %s | %.1f s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
