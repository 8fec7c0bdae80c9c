#include "pcs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pcs/metrics.hpp"
#include "pcs/rng.hpp"
#include "pcs/shaping.hpp"

namespace pcs {

namespace {

constexpr double kSnrCeiling = 1e6;      // stands in for a noiseless link
constexpr double kNoiseFloor = 1e-12;    // demapper variance floor

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a number");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long d = 0;
  try {
    d = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config key '" + key + "': '" + v + "' is not an integer");
  return d;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split(v, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(static_cast<int>(to_int(key, item)));
    } else if (parts.size() == 3) {
      const auto a = to_int(key, parts[0]), step = to_int(key, parts[1]), b = to_int(key, parts[2]);
      if (step <= 0) throw std::invalid_argument("config key '" + key + "': range step must be positive");
      for (auto x = a; x <= b; x += step) out.push_back(static_cast<int>(x));
    } else {
      throw std::invalid_argument("config key '" + key + "': ranges are start:step:stop");
    }
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': expected true or false");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t point_seed(std::uint64_t seed, int spans, std::size_t launch_idx) {
  return derive_seed(seed, static_cast<std::uint64_t>(spans) * 1000003ull + launch_idx);
}

void write_header(std::ostream& os, std::string_view command, const ExperimentConfig& cfg) {
  os << "# pcsim " << command << '\n';
  os << "# preset=" << preset_name(cfg.preset) << " seed=" << cfg.seed << " config_hash=" << cfg.hash() << '\n';
  std::istringstream lines(cfg.canonical());
  std::string line;
  while (std::getline(lines, line)) os << "#   " << line << '\n';
}

std::string provenance(const ExperimentConfig& cfg) {
  return cfg.hash() + ',' + std::to_string(cfg.seed) + ',' + preset_name(cfg.preset);
}

}  // namespace

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::desk: return "desk";
    case Preset::paper: return "paper";
    case Preset::custom: return "custom";
  }
  return "?";
}

Preset parse_preset(std::string_view s) {
  if (s == "desk") return Preset::desk;
  if (s == "paper") return Preset::paper;
  if (s == "custom") return Preset::custom;
  throw std::invalid_argument("unknown preset '" + std::string(s) + "' (desk | paper | custom)");
}

void apply_preset(ExperimentConfig& cfg, Preset p) {
  cfg.preset = p;
  if (p == Preset::desk) {
    cfg.link.wdm_channels = 5;
    cfg.symbols = 4096;
    cfg.ssfm.oversampling = 8;
    cfg.ssfm.step_m = 500.0;
    cfg.frames = std::max(cfg.frames, 20);
  } else if (p == Preset::paper) {
    cfg.link.wdm_channels = 15;
    cfg.symbols = 65536;
    cfg.ssfm.oversampling = 32;
    cfg.ssfm.step_m = 100.0;
    cfg.frames = std::max(cfg.frames, 20);
  }
}

ExperimentConfig make_config(Preset p) {
  ExperimentConfig cfg;
  apply_preset(cfg, p);
  return cfg;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid experiment configuration: " + m); };
  if (order != 16 && order != 64) fail("order must be 16 or 64");
  if (modes.empty()) fail("modes must name at least one input mode");
  if (spans.empty()) fail("span list is empty");
  for (int s : spans)
    if (s < 0) fail("span counts must be nonnegative");
  if (launch_dbm.empty()) fail("launch power list is empty");
  if (frames < 1) fail("frames must be at least 1");
  if (mi_runs < 1) fail("mi_runs must be at least 1");
  if (symbols < 16) fail("symbols must be at least 16");
  if (stop_after_clean < 1) fail("stop_after_clean must be at least 1");
  link.validate();
  if (ssfm.oversampling < 1) fail("oversampling must be at least 1");
  if (!(ssfm.step_m > 0.0)) fail("step_m must be positive");
  const double steps = link.span_length_km * 1e3 / ssfm.step_m;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) fail("step_m must divide the span length");
  const double occupied = (link.wdm_channels - 1) * link.wdm_spacing_hz + (1.0 + link.rolloff) * link.baud;
  if (occupied > ssfm.oversampling * link.baud)
    fail("WDM ensemble (" + fmt(occupied / 1e9) + " GHz) exceeds the sample rate (" +
         fmt(ssfm.oversampling * link.baud / 1e9) + " GHz)");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17);
  auto list = [&](const auto& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  os << "preset=" << preset_name(preset) << '\n' << "order=" << order << '\n' << "modes=";
  for (std::size_t i = 0; i < modes.size(); ++i) os << (i ? "," : "") << mode_name(modes[i]);
  os << "\nspans=";
  list(spans);
  os << "\nlaunch_dbm=";
  list(launch_dbm);
  os << "\nsnr_db=";
  list(snr_db);
  os << "\nframes=" << frames << "\nmi_runs=" << mi_runs << "\nsymbols=" << symbols
     << "\nstop_after_clean=" << stop_after_clean << "\nmatcher=" << matcher_name(matcher) << "\nseed=" << seed
     << "\nase=" << (ase ? "true" : "false") << "\nspan_length_km=" << link.span_length_km
     << "\nalpha_db_per_km=" << link.alpha_db_per_km << "\ngamma_per_w_km=" << link.gamma_per_w_km
     << "\ndispersion_ps_nm_km=" << link.dispersion_ps_nm_km << "\nnf_db=" << link.nf_db << "\nbaud=" << link.baud
     << "\nrolloff=" << link.rolloff << "\nwdm_channels=" << link.wdm_channels
     << "\nwdm_spacing_hz=" << link.wdm_spacing_hz << "\nwavelength_m=" << link.wavelength_m
     << "\nstep_m=" << ssfm.step_m << "\noversampling=" << ssfm.oversampling << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical());
  return os.str();
}

ExperimentConfig parse_config(std::istream& is, const ExperimentConfig& base) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }

  ExperimentConfig cfg = base;
  for (const auto& [k, v] : kv)
    if (k == "preset") apply_preset(cfg, parse_preset(v));

  for (const auto& [k, v] : kv) {
    const bool fidelity = k == "wdm_channels" || k == "symbols" || k == "oversampling" || k == "step_m";
    if (fidelity && cfg.preset != Preset::custom)
      throw std::invalid_argument("config key '" + k + "' is fixed by the " + preset_name(cfg.preset) +
                                  " preset (use preset = custom)");
    if (k == "preset") continue;
    else if (k == "order") cfg.order = static_cast<int>(to_int(k, v));
    else if (k == "modes") {
      cfg.modes.clear();
      for (const auto& m : split(v, ',')) cfg.modes.push_back(parse_mode(m));
    } else if (k == "spans") cfg.spans = to_ints(k, v);
    else if (k == "launch_dbm") cfg.launch_dbm = to_doubles(k, v);
    else if (k == "snr_db") cfg.snr_db = to_doubles(k, v);
    else if (k == "frames") cfg.frames = static_cast<int>(to_int(k, v));
    else if (k == "mi_runs") cfg.mi_runs = static_cast<int>(to_int(k, v));
    else if (k == "symbols") cfg.symbols = static_cast<std::size_t>(to_int(k, v));
    else if (k == "stop_after_clean") cfg.stop_after_clean = static_cast<int>(to_int(k, v));
    else if (k == "matcher") cfg.matcher = parse_matcher(v);
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "threads") cfg.threads = static_cast<int>(to_int(k, v));
    else if (k == "ase") cfg.ase = to_bool(k, v);
    else if (k == "span_length_km") cfg.link.span_length_km = to_double(k, v);
    else if (k == "alpha_db_per_km") cfg.link.alpha_db_per_km = to_double(k, v);
    else if (k == "gamma_per_w_km") cfg.link.gamma_per_w_km = to_double(k, v);
    else if (k == "dispersion_ps_nm_km") cfg.link.dispersion_ps_nm_km = to_double(k, v);
    else if (k == "nf_db") cfg.link.nf_db = to_double(k, v);
    else if (k == "baud") cfg.link.baud = to_double(k, v);
    else if (k == "rolloff") cfg.link.rolloff = to_double(k, v);
    else if (k == "wdm_channels") cfg.link.wdm_channels = static_cast<int>(to_int(k, v));
    else if (k == "wdm_spacing_hz") cfg.link.wdm_spacing_hz = to_double(k, v);
    else if (k == "wavelength_m") cfg.link.wavelength_m = to_double(k, v);
    else if (k == "step_m") cfg.ssfm.step_m = to_double(k, v);
    else if (k == "oversampling") cfg.ssfm.oversampling = static_cast<int>(to_int(k, v));
    else throw std::invalid_argument("unknown config key '" + k + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in, base);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(n, threads > 0 ? static_cast<std::size_t>(threads) : hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::vector<std::uint32_t> composition_symbols(std::span<const double> pmf, std::size_t count, std::uint64_t seed) {
  const auto comp = composition_from_pmf(pmf, static_cast<std::uint32_t>(count));
  std::vector<std::uint32_t> s;
  s.reserve(count);
  for (std::uint32_t a = 0; a < comp.counts.size(); ++a) s.insert(s.end(), comp.counts[a], a);
  std::mt19937_64 rng(seed);
  for (std::size_t i = s.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
    std::swap(s[i - 1], s[std::min(j, i - 1)]);
  }
  return s;
}

std::vector<MiPoint> run_mi_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Constellation tmpl = Constellation::qam(cfg.order);
  std::vector<MiPoint> rows;
  std::vector<std::size_t> launch_idx;
  for (int s : cfg.spans)
    for (std::size_t l = 0; l < cfg.launch_dbm.size(); ++l)
      for (auto m : cfg.modes) {
        MiPoint p;
        p.spans = s;
        p.launch_dbm = cfg.launch_dbm[l];
        p.mode = m;
        rows.push_back(p);
        launch_idx.push_back(l);
      }

  parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    MiPoint& p = rows[i];
    try {
      LinkConfig link = cfg.link;
      link.num_spans = p.spans;
      link.launch_power_dbm = p.launch_dbm;
      const double snr = std::min(gn_snr(link), kSnrCeiling);
      p.gn_snr_db = linear_to_db(snr);
      Constellation c = tmpl;
      if (p.mode == InputMode::shaped) {
        const auto sol = optimize_shaping(tmpl, snr);
        c = sol.constellation;
        p.nu = sol.nu;
      }
      p.entropy = c.entropy();

      const std::uint64_t base = point_seed(cfg.seed, p.spans, launch_idx[i]);
      std::vector<SymbolRecord> records;
      double noise = 0.0;
      for (int r = 0; r < cfg.mi_runs; ++r) {
        const std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(r));
        ChannelSymbols tx;
        tx.x = composition_symbols(c.pmf(), cfg.symbols, derive_seed(s, 1));
        tx.y = composition_symbols(c.pmf(), cfg.symbols, derive_seed(s, 2));
        const auto rx = simulate_wdm_link(link, cfg.ssfm, c, tx, s, cfg.ase);
        for (const auto& [idx, got, pol] : {std::tuple{&tx.x, &rx.x, 0}, std::tuple{&tx.y, &rx.y, 1}}) {
          auto rec = make_records(*idx, *got, pol);
          records.insert(records.end(), rec.begin(), rec.end());
          std::vector<cplx> ref;
          for (auto k : *idx) ref.push_back(c.point(k));
          noise += estimate_noise_variance(*got, ref);
        }
      }
      noise /= 2.0 * cfg.mi_runs;
      p.effective_snr_db = noise > 0.0 ? linear_to_db(c.average_power() / noise) : linear_to_db(kSnrCeiling);
      p.mi = estimate_mi(records, c);
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });
  return rows;
}

std::vector<BerPoint> run_ber_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::map<InputMode, CodedChain> chains;
  for (auto m : cfg.modes) chains.try_emplace(m, default_chain(m), cfg.matcher);

  std::vector<BerPoint> rows;
  std::vector<std::size_t> launch_idx;
  for (int s : cfg.spans)
    for (std::size_t l = 0; l < cfg.launch_dbm.size(); ++l)
      for (auto m : cfg.modes) {
        BerPoint p;
        p.spans = s;
        p.launch_dbm = cfg.launch_dbm[l];
        p.mode = m;
        rows.push_back(p);
        launch_idx.push_back(l);
      }

  parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    BerPoint& p = rows[i];
    try {
      const CodedChain& chain = chains.at(p.mode);
      const Constellation& c = chain.constellation();
      LinkConfig link = cfg.link;
      link.num_spans = p.spans;
      link.launch_power_dbm = p.launch_dbm;
      const std::uint64_t base = point_seed(cfg.seed, p.spans, launch_idx[i]);

      std::vector<CodedChain::TxFrame> frames;
      std::vector<std::uint32_t> stream;
      for (int f = 0; f < cfg.frames; ++f) {
        frames.push_back(chain.transmit(derive_seed(base, static_cast<std::uint64_t>(f))));
        stream.insert(stream.end(), frames.back().symbols.begin(), frames.back().symbols.end());
      }

      // Fill fibre frames x then y; the tail of the last one is padding.
      const std::size_t per_run = 2 * cfg.symbols;
      const std::size_t runs = (stream.size() + per_run - 1) / per_run;
      std::vector<cplx> rx_stream;
      rx_stream.reserve(runs * per_run);
      PmfSampler pad(c.pmf());
      for (std::size_t r = 0; r < runs; ++r) {
        const std::uint64_t s = derive_seed(base, 1000000 + r);
        std::mt19937_64 rng(derive_seed(s, 3));
        std::vector<std::uint32_t> chunk(per_run);
        for (std::size_t j = 0; j < per_run; ++j) {
          const std::size_t at = r * per_run + j;
          chunk[j] = at < stream.size() ? stream[at] : pad(rng);
        }
        ChannelSymbols tx;
        tx.x.assign(chunk.begin(), chunk.begin() + cfg.symbols);
        tx.y.assign(chunk.begin() + cfg.symbols, chunk.end());
        const auto rx = simulate_wdm_link(link, cfg.ssfm, c, tx, s, cfg.ase);
        rx_stream.insert(rx_stream.end(), rx.x.begin(), rx.x.end());
        rx_stream.insert(rx_stream.end(), rx.y.begin(), rx.y.end());
      }
      rx_stream.resize(stream.size());
      std::vector<cplx> ref;
      ref.reserve(stream.size());
      for (auto k : stream) ref.push_back(c.point(k));
      const double noise = std::max(estimate_noise_variance(rx_stream, ref), kNoiseFloor);

      BpDecoder decoder(chain.code());
      const std::size_t sym = chain.symbols_per_frame();
      for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto r = chain.receive(frames[f], std::span(rx_stream).subspan(f * sym, sym), noise, decoder);
        p.bit_errors += r.bit_errors;
        p.bits += r.bits;
        p.frame_errors += r.bit_errors > 0;
        p.matcher_failures += r.matcher_failure;
        ++p.frames;
      }
      p.ber = static_cast<double>(p.bit_errors) / static_cast<double>(p.bits);
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });
  return rows;
}

double mi_threshold_snr_db(const Constellation& c, double bits) {
  double lo = -10.0, hi = 40.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (awgn_mi(c, db_to_linear(mid)) < bits ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ber_crossing(const std::vector<AwgnPoint>& points, double level) {
  auto value = [](const AwgnPoint& p) {
    return p.bit_errors > 0 ? p.ber : 0.5 / static_cast<double>(std::max<std::size_t>(p.bits, 1));
  };
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = value(points[i]), b = value(points[i + 1]);
    if (a >= level && b < level) {
      const double t = (std::log10(a) - std::log10(level)) / (std::log10(a) - std::log10(b));
      return points[i].snr_db + t * (points[i + 1].snr_db - points[i].snr_db);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AwgnSummary run_awgn_validation(const ExperimentConfig& cfg) {
  cfg.validate();
  AwgnSummary out;
  for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
    const CodedChain chain(default_chain(cfg.modes[mi]), cfg.matcher);
    const Constellation& c = chain.constellation();
    const double threshold = mi_threshold_snr_db(c, chain.spec().information_rate());
    out.mi_threshold_db.push_back(threshold);

    std::vector<double> grid = cfg.snr_db;
    if (grid.empty())
      for (int k = 4; k <= 30; ++k) grid.push_back(std::round((threshold + 0.05 * k) * 100.0) / 100.0);
    std::sort(grid.begin(), grid.end());

    std::vector<AwgnPoint> pts;
    int clean = 0;
    for (double db : grid) {
      const double var = c.average_power() / db_to_linear(db);
      std::vector<CodedChain::RxFrame> res(static_cast<std::size_t>(cfg.frames));
      parallel_for(res.size(), cfg.threads, [&](std::size_t f) {
        const auto tx = chain.transmit(derive_seed(cfg.seed, f));
        NormalSource noise(derive_seed(cfg.seed, 1000000 + f));
        const double sd = std::sqrt(var / 2.0);
        std::vector<cplx> rx;
        rx.reserve(tx.symbols.size());
        for (auto s : tx.symbols) {
          const double re = noise();
          const double im = noise();
          rx.push_back(c.point(s) + cplx(sd * re, sd * im));
        }
        BpDecoder decoder(chain.code());
        res[f] = chain.receive(tx, rx, var, decoder);
      });
      AwgnPoint p;
      p.mode = cfg.modes[mi];
      p.snr_db = db;
      p.mi = awgn_mi(c, db_to_linear(db));
      for (const auto& r : res) {
        p.bit_errors += r.bit_errors;
        p.bits += r.bits;
        p.frame_errors += r.bit_errors > 0;
        ++p.frames;
      }
      p.ber = static_cast<double>(p.bit_errors) / static_cast<double>(p.bits);
      pts.push_back(p);
      clean = p.bit_errors == 0 ? clean + 1 : 0;
      if (clean >= cfg.stop_after_clean) break;
    }
    out.crossing_db.push_back(ber_crossing(pts));
    out.points.insert(out.points.end(), pts.begin(), pts.end());
  }
  return out;
}

void write_mi_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<MiPoint>& rows) {
  write_header(os, "mi-sweep", cfg);
  os << "spans,distance_km,launch_dbm,mode,gn_snr_db,nu,entropy,effective_snr_db,mi,status,config_hash,seed,preset\n";
  const std::string prov = provenance(cfg);
  for (const auto& r : rows)
    os << r.spans << ',' << fmt(r.spans * cfg.link.span_length_km) << ',' << fmt(r.launch_dbm) << ','
       << mode_name(r.mode) << ',' << fmt(r.gn_snr_db) << ',' << fmt(r.nu) << ',' << fmt(r.entropy) << ','
       << fmt(r.effective_snr_db) << ',' << fmt(r.mi) << ',' << (r.ok ? "ok" : "aborted") << ',' << prov << '\n';
}

void write_ber_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<BerPoint>& rows) {
  write_header(os, "ber-sweep", cfg);
  os << "spans,distance_km,launch_dbm,mode,ber,bit_errors,bits,frames,frame_errors,matcher_failures,status,"
        "config_hash,seed,preset\n";
  const std::string prov = provenance(cfg);
  for (const auto& r : rows)
    os << r.spans << ',' << fmt(r.spans * cfg.link.span_length_km) << ',' << fmt(r.launch_dbm) << ','
       << mode_name(r.mode) << ',' << fmt(r.ber) << ',' << r.bit_errors << ',' << r.bits << ',' << r.frames << ','
       << r.frame_errors << ',' << r.matcher_failures << ',' << (r.ok ? "ok" : "aborted") << ',' << prov << '\n';
}

void write_awgn_csv(std::ostream& os, const ExperimentConfig& cfg, const AwgnSummary& s) {
  write_header(os, "awgn-validate", cfg);
  os << "mode,snr_db,mi,ber,bit_errors,bits,frames,frame_errors,config_hash,seed,preset\n";
  const std::string prov = provenance(cfg);
  for (const auto& p : s.points)
    os << mode_name(p.mode) << ',' << fmt(p.snr_db) << ',' << fmt(p.mi) << ',' << fmt(p.ber) << ',' << p.bit_errors
       << ',' << p.bits << ',' << p.frames << ',' << p.frame_errors << ',' << prov << '\n';
  for (std::size_t i = 0; i < s.crossing_db.size(); ++i)
    os << "# " << mode_name(cfg.modes[i]) << ": ber_crossing_db=" << fmt(s.crossing_db[i])
       << " mi_threshold_db=" << fmt(s.mi_threshold_db[i]) << '\n';
}

}  // namespace pcs
