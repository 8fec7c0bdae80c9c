#include "pcs/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "pcs/quadrature.hpp"

namespace pcs {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

std::vector<double> mb_pmf(const Constellation& tmpl, double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("Maxwell-Boltzmann parameter must be finite and nonnegative");
  const auto pts = tmpl.template_points();
  double emin = std::numeric_limits<double>::infinity();
  for (const auto& x : pts) emin = std::min(emin, std::norm(x));
  std::vector<double> pmf(pts.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // Shift by the minimum energy so large nu does not underflow to 0/0.
    pmf[i] = std::exp(-nu * (std::norm(pts[i]) - emin));
    sum += pmf[i];
  }
  for (double& p : pmf) p /= sum;
  return pmf;
}

double awgn_mi_fixed(const Constellation& c, double snr, int nodes) {
  if (!(snr > 0.0)) throw std::invalid_argument("SNR must be positive");
  const auto& gh = gauss_hermite(nodes);
  const double n0 = c.average_power() / snr;
  const double sigma = std::sqrt(n0);
  const auto pts = c.points();
  const auto pmf = c.pmf();
  const std::size_t m = pts.size();

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < m; ++i)
    if (pmf[i] > 0.0) support.push_back(i);
  std::vector<double> log_p(m);
  for (std::size_t i = 0; i < m; ++i) log_p[i] = pmf[i] > 0.0 ? std::log(pmf[i]) : 0.0;

  // I = -sum_x p(x) E_z log2 sum_x' p(x') exp(-(|x - x' + z|^2 - |z|^2)/N0)
  std::vector<double> expo(support.size());
  double acc = 0.0;
  for (std::size_t xi : support) {
    double ex = 0.0;
    for (int a = 0; a < nodes; ++a) {
      for (int b = 0; b < nodes; ++b) {
        const cplx z(sigma * gh.nodes[a], sigma * gh.nodes[b]);
        const double zz = std::norm(z);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < support.size(); ++j) {
          const std::size_t xj = support[j];
          expo[j] = log_p[xj] - (std::norm(pts[xi] - pts[xj] + z) - zz) / n0;
          mx = std::max(mx, expo[j]);
        }
        double s = 0.0;
        for (double e : expo) s += std::exp(e - mx);
        ex += gh.weights[a] * gh.weights[b] * (mx + std::log(s));
      }
    }
    acc += pmf[xi] * ex / std::numbers::pi;
  }
  return std::max(0.0, -acc / std::numbers::ln2);
}

double awgn_mi(const Constellation& c, double snr) {
  int nodes = 32;
  double prev = awgn_mi_fixed(c, snr, nodes);
  while (nodes < 512) {
    nodes *= 2;
    const double cur = awgn_mi_fixed(c, snr, nodes);
    if (std::abs(cur - prev) < 1e-5) return cur;
    prev = cur;
  }
  return prev;
}

double mb_nu_limit(const Constellation& tmpl) {
  std::vector<double> energies;
  for (const auto& x : tmpl.template_points()) energies.push_back(std::norm(x));
  std::sort(energies.begin(), energies.end());
  energies.erase(std::unique(energies.begin(), energies.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12 * b; }),
                 energies.end());
  if (energies.size() < 2) return 0.0;
  // exp(-nu (E2 - E1)) * M <= 1e-6 bounds the mass outside the innermost ring.
  return std::log(1e6 * tmpl.order()) / (energies[1] - energies[0]);
}

namespace {

struct Candidate {
  double nu;
  double mi;
  Constellation c;
};

Candidate evaluate(const Constellation& tmpl, double nu, double snr, double power) {
  Constellation c = tmpl.with_pmf(mb_pmf(tmpl, nu)).with_power(power);
  const double mi = awgn_mi(c, snr);
  return {nu, mi, std::move(c)};
}

}  // namespace

ShapingSolution optimize_shaping(const Constellation& tmpl, double snr, double power) {
  if (!(snr > 0.0)) throw std::invalid_argument("SNR must be positive");
  const double nu_max = mb_nu_limit(tmpl);
  constexpr int kGrid = 24;

  std::vector<Candidate> grid;
  grid.reserve(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) grid.push_back(evaluate(tmpl, nu_max * i / kGrid, snr, power));
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i].mi > grid[best].mi) best = i;

  Candidate result = grid[best];
  if (nu_max > 0.0) {
    double lo = grid[best == 0 ? 0 : best - 1].nu;
    double hi = grid[std::min(best + 1, grid.size() - 1)].nu;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    Candidate f1 = evaluate(tmpl, x1, snr, power), f2 = evaluate(tmpl, x2, snr, power);
    while (hi - lo > 1e-5) {
      if (f1.mi >= f2.mi) {
        hi = x2;
        x2 = x1;
        f2 = std::move(f1);
        x1 = hi - r * (hi - lo);
        f1 = evaluate(tmpl, x1, snr, power);
      } else {
        lo = x1;
        x1 = x2;
        f1 = std::move(f2);
        x2 = lo + r * (hi - lo);
        f2 = evaluate(tmpl, x2, snr, power);
      }
    }
    for (Candidate* c : {&f1, &f2})
      if (c->mi > result.mi) result = *c;
  }
  // nu = 0 is always feasible.
  if (grid.front().mi >= result.mi) result = grid.front();

  ShapingSolution s{result.nu,          result.c.scaling(), std::vector<double>(result.c.pmf().begin(), result.c.pmf().end()),
                    result.mi,          snr,                power,
                    std::move(result.c)};
  return s;
}

ShapedBitRate shaped_bit_rate(const Constellation& c) {
  ShapedBitRate r;
  r.entropy = c.entropy();
  for (double p : c.bit_marginals().p_one) {
    double h = 0.0;
    if (p > 0.0 && p < 1.0) h = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
    r.bit_entropies.push_back(h);
  }
  return r;
}

ShapedBitRate shaped_bit_rate(const ShapingSolution& s) { return shaped_bit_rate(s.constellation); }

void write_shaping_csv(std::ostream& os, std::span<const ShapingSolution> rows) {
  os << "snr_db,nu,scaling,predicted_mi,entropy\n";
  const auto prec = os.precision(10);
  for (const auto& s : rows)
    os << linear_to_db(s.target_snr) << ',' << s.nu << ',' << s.scaling << ',' << s.predicted_mi
       << ',' << s.constellation.entropy() << '\n';
  os.precision(prec);
}

}  // namespace pcs
