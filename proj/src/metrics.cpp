#include "pcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pcs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kCutoff = 7.0;  // kernel support, in bandwidths

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Records of one input symbol, bucketed on a square grid of half the kernel
// support so a query touches at most 5 x 5 cells.
class ClassDensity {
 public:
  ClassDensity(std::vector<cplx> pts, double h) : h_(h), inv2h2_(1.0 / (2.0 * h * h)) {
    cell_ = kCutoff * h / 2.0;
    lo_ = cplx(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    hi_ = -lo_;
    for (auto p : pts) {
      lo_ = cplx(std::min(lo_.real(), p.real()), std::min(lo_.imag(), p.imag()));
      hi_ = cplx(std::max(hi_.real(), p.real()), std::max(hi_.imag(), p.imag()));
    }
    std::vector<std::pair<std::uint64_t, cplx>> keyed;
    keyed.reserve(pts.size());
    for (auto p : pts) keyed.emplace_back(key_of(p), p);
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [k, p] : keyed) {
      keys_.push_back(k);
      pts_.push_back(p);
      re_.push_back(p.real());
      im_.push_back(p.imag());
    }
    log_norm_ = std::log(2.0 * std::numbers::pi * h * h);
  }

  std::size_t size() const { return pts_.size(); }

  /// log Σ_j exp(-|y - p_j|^2 / 2h^2) over kernels within the cutoff. With
  /// `skip_self` the query is one of the points and its own kernel (exactly 1)
  /// is removed.
  double log_kernel_sum(cplx y, bool skip_self) const {
    const double r = kCutoff * h_;
    if (y.real() < lo_.real() - r || y.real() > hi_.real() + r || y.imag() < lo_.imag() - r ||
        y.imag() > hi_.imag() + r)
      return skip_self ? exact(y, true) : kNegInf;
    const double r2 = r * r;
    const double yr = y.real(), yi = y.imag();
    double sum = 0.0;
    const auto [cx, cy] = cell_of(y);
    for (std::int64_t ix = cx - 2; ix <= cx + 2; ++ix) {
      if (ix < 0 || ix >= kSpan) continue;
      // Cells (ix, cy-2 .. cy+2) are contiguous in key order.
      const std::int64_t y0 = std::max<std::int64_t>(cy - 2, 0), y1 = std::min<std::int64_t>(cy + 2, kSpan - 1);
      if (y0 > y1) continue;
      const std::uint64_t base = static_cast<std::uint64_t>(ix) * kSpan;
      const auto b = std::lower_bound(keys_.begin(), keys_.end(), base + static_cast<std::uint64_t>(y0)) - keys_.begin();
      const auto e = std::upper_bound(keys_.begin(), keys_.end(), base + static_cast<std::uint64_t>(y1)) - keys_.begin();
      const double* re = re_.data();
      const double* im = im_.data();
      for (auto j = b; j < e; ++j) {
        const double dr = yr - re[j], di = yi - im[j];
        const double d2 = dr * dr + di * di;
        const double k = std::exp(-std::min(d2, r2) * inv2h2_);
        sum += d2 < r2 ? k : 0.0;
      }
    }
    if (!skip_self) return sum > 0.0 ? std::log(sum) : kNegInf;
    // Removing the unit self kernel cancels badly for isolated records.
    sum -= 1.0;
    return sum > 1e-6 ? std::log(sum) : exact(y, true);
  }

  double log_density(cplx y, bool own) const {
    const double n = static_cast<double>(pts_.size()) - (own ? 1.0 : 0.0);
    return log_kernel_sum(y, own) - log_norm_ - std::log(n);
  }

 private:
  static constexpr std::int64_t kSpan = std::int64_t{1} << 31;

  std::pair<std::int64_t, std::int64_t> cell_of(cplx p) const {
    auto c = [&](double v, double lo) {
      const double q = std::floor((v - lo) / cell_);
      return static_cast<std::int64_t>(std::clamp(q, -4.0, static_cast<double>(kSpan + 4)));
    };
    return {c(p.real(), lo_.real()), c(p.imag(), lo_.imag())};
  }

  std::uint64_t key_of(cplx p) const {
    const auto [x, y] = cell_of(p);
    return static_cast<std::uint64_t>(std::clamp<std::int64_t>(x, 0, kSpan - 1)) * kSpan +
           static_cast<std::uint64_t>(std::clamp<std::int64_t>(y, 0, kSpan - 1));
  }

  double exact(cplx y, bool skip_self) const {
    double m = kNegInf;
    bool skipped = false;
    std::vector<double> e;
    e.reserve(pts_.size());
    for (auto p : pts_) {
      if (skip_self && !skipped && p == y) {
        skipped = true;
        continue;
      }
      e.push_back(-std::norm(y - p) * inv2h2_);
      m = std::max(m, e.back());
    }
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : e) s += std::exp(v - m);
    return m + std::log(s);
  }

  double h_, inv2h2_, cell_ = 1.0, log_norm_ = 0.0;
  cplx lo_, hi_;
  std::vector<std::uint64_t> keys_;
  std::vector<cplx> pts_;
  std::vector<double> re_, im_;
};

}  // namespace

std::vector<SymbolRecord> make_records(std::span<const std::uint32_t> tx, std::span<const cplx> rx, int pol) {
  if (tx.size() != rx.size()) throw std::invalid_argument("transmitted and received lengths differ");
  std::vector<SymbolRecord> r;
  r.reserve(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i) r.push_back({tx[i], rx[i], pol});
  return r;
}

MiEstimate estimate_mi_detailed(std::span<const SymbolRecord> records, const Constellation& c) {
  const std::size_t m = static_cast<std::size_t>(c.order());
  const auto pmf = c.pmf();
  std::vector<std::vector<cplx>> by_class(m);
  double scale = 0.0;
  for (const auto& r : records) {
    if (r.tx >= m) throw std::invalid_argument("record symbol index out of range");
    if (!std::isfinite(r.rx.real()) || !std::isfinite(r.rx.imag()))
      throw std::invalid_argument("record holds a non-finite sample");
    if (pmf[r.tx] <= 0.0) throw std::invalid_argument("record carries a symbol with zero probability");
    by_class[r.tx].push_back(r.rx);
    scale = std::max(scale, std::abs(r.rx));
  }

  MiEstimate est;
  std::vector<std::size_t> kept;
  std::vector<ClassDensity> dens;
  std::vector<int> slot(m, -1);
  const double h_floor = 1e-9 * std::max(scale, 1e-300);
  double kept_mass = 0.0;
  for (std::size_t x = 0; x < m; ++x) {
    if (pmf[x] <= 0.0) continue;
    auto& pts = by_class[x];
    if (pts.size() < 2) {
      est.dropped_symbols.push_back(static_cast<std::uint32_t>(x));
      continue;
    }
    if (pts.size() < 100) est.sparse_symbols.push_back(static_cast<std::uint32_t>(x));
    cplx mean = 0.0;
    for (auto p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    double ss = 0.0;
    for (auto p : pts) ss += std::norm(p - mean);
    const double n = static_cast<double>(pts.size());
    const double sd = std::sqrt(ss / (n - 1.0) / 2.0);
    const double h = std::max(sd * std::pow(n, -1.0 / 6.0), h_floor);
    slot[x] = static_cast<int>(dens.size());
    kept.push_back(x);
    kept_mass += pmf[x];
    dens.emplace_back(std::move(pts), h);
  }
  if (dens.empty()) throw std::invalid_argument("no symbol has enough records for an MI estimate");

  std::vector<double> log_w;
  for (auto x : kept) log_w.push_back(std::log(pmf[x] / kept_mass));

  double acc = 0.0;
  for (const auto& r : records) {
    const int own = slot[r.tx];
    if (own < 0) continue;
    double log_own = kNegInf, log_mix = kNegInf;
    for (std::size_t k = 0; k < dens.size(); ++k) {
      const bool self = static_cast<int>(k) == own;
      const double ld = dens[k].log_density(r.rx, self);
      if (self) log_own = ld;
      log_mix = log_sum_exp(log_mix, log_w[k] + ld);
    }
    acc += log_own - log_mix;
    ++est.records_used;
  }
  est.bits = acc / static_cast<double>(est.records_used) / std::numbers::ln2;
  return est;
}

double estimate_mi(std::span<const SymbolRecord> records, const Constellation& c) {
  return estimate_mi_detailed(records, c).bits;
}

std::vector<double> compute_llrs(std::span<const cplx> rx, const Constellation& c, double noise_variance) {
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw std::invalid_argument("noise variance must be positive and finite");
  const int bps = c.bits_per_symbol();
  const std::size_t m = static_cast<std::size_t>(c.order());
  std::vector<double> log_prior(m);
  for (std::size_t i = 0; i < m; ++i) log_prior[i] = c.pmf()[i] > 0.0 ? std::log(c.pmf()[i]) : kNegInf;
  const double inv = 1.0 / noise_variance;

  std::vector<double> out(rx.size() * bps);
  std::vector<double> metric(m);
  for (std::size_t s = 0; s < rx.size(); ++s) {
    for (std::size_t i = 0; i < m; ++i) metric[i] = log_prior[i] - std::norm(rx[s] - c.point(i)) * inv;
    for (int b = 0; b < bps; ++b) {
      // Each hypothesis gets its own log-sum-exp shift, so the ratio stays
      // finite even when one side underflows relative to the other.
      double peak[2] = {kNegInf, kNegInf};
      for (std::size_t i = 0; i < m; ++i) peak[c.bit(i, b)] = std::max(peak[c.bit(i, b)], metric[i]);
      double sum[2] = {0.0, 0.0};
      for (std::size_t i = 0; i < m; ++i) {
        const int v = c.bit(i, b);
        if (metric[i] != kNegInf) sum[v] += std::exp(metric[i] - peak[v]);
      }
      out[s * bps + b] = (peak[0] + std::log(sum[0])) - (peak[1] + std::log(sum[1]));
    }
  }
  return out;
}

std::vector<double> prior_llrs(const Constellation& c) {
  const auto p1 = c.bit_marginals().p_one;
  std::vector<double> out;
  for (double p : p1) out.push_back(std::log(1.0 - p) - std::log(p));
  return out;
}

std::size_t count_bit_errors(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference) {
  if (decided.size() != reference.size()) throw std::invalid_argument("bit streams differ in length");
  std::size_t e = 0;
  for (std::size_t i = 0; i < decided.size(); ++i) e += (decided[i] & 1u) != (reference[i] & 1u);
  return e;
}

double measure_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference) {
  if (reference.empty()) throw std::invalid_argument("BER needs at least one bit");
  return static_cast<double>(count_bit_errors(decided, reference)) / static_cast<double>(reference.size());
}

double estimate_noise_variance(std::span<const cplx> rx, std::span<const cplx> tx) {
  if (rx.size() != tx.size()) throw std::invalid_argument("noise estimate: length mismatch");
  if (rx.empty()) throw std::invalid_argument("noise estimate needs at least one symbol");
  double s = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) s += std::norm(rx[i] - tx[i]);
  return s / static_cast<double>(rx.size());
}

void write_mi_csv(std::ostream& os, std::span<const MiRow> rows) {
  os << "distance_km,launch_dbm,mi\n";
  for (const auto& r : rows) os << r.distance_km << ',' << r.launch_dbm << ',' << r.mi << '\n';
}

void write_ber_csv(std::ostream& os, std::span<const BerRow> rows) {
  os << "distance_km,ber\n";
  for (const auto& r : rows) os << r.distance_km << ',' << r.ber << '\n';
}

}  // namespace pcs
