#include "pcs/linkmodel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace pcs {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid link configuration: ") + what);
}

}  // namespace

void LinkConfig::validate() const {
  require(span_length_km > 0.0, "span_length_km must be positive");
  require(num_spans >= 0, "num_spans must be nonnegative");
  require(alpha_db_per_km >= 0.0, "alpha_db_per_km must be nonnegative");
  require(gamma_per_w_km >= 0.0, "gamma_per_w_km must be nonnegative");
  require(nf_db >= 0.0, "nf_db must be nonnegative");
  require(baud > 0.0, "baud must be positive");
  require(rolloff >= 0.0 && rolloff <= 1.0, "rolloff must lie in [0, 1]");
  require(wdm_channels >= 1, "wdm_channels must be at least 1");
  require(wdm_spacing_hz > 0.0, "wdm_spacing_hz must be positive");
  require(wavelength_m > 0.0, "wavelength_m must be positive");
  require(std::isfinite(launch_power_dbm), "launch_power_dbm must be finite");
}

double LinkConfig::alpha_per_m() const { return alpha_db_per_km / (10.0 * std::log10(std::exp(1.0))) * 1e-3; }

double LinkConfig::beta2() const {
  const double d = dispersion_ps_nm_km * 1e-6;  // ps/(nm km) -> s/m^2
  return -d * wavelength_m * wavelength_m / (2.0 * std::numbers::pi * phys::kLightSpeed);
}

double LinkConfig::span_gain() const { return std::pow(10.0, alpha_db_per_km * span_length_km / 10.0); }

double LinkConfig::launch_power_w() const { return 1e-3 * std::pow(10.0, launch_power_dbm / 10.0); }

double ase_power(const LinkConfig& link) {
  link.validate();
  const double f = std::pow(10.0, link.nf_db / 10.0);
  return link.num_spans * (link.span_gain() - 1.0) * phys::kPlanck * link.carrier_frequency() * f * link.baud;
}

double nli_coefficient_per_span(const LinkConfig& link) {
  link.validate();
  const double gamma = link.gamma_per_w_m();
  if (gamma == 0.0) return 0.0;
  const double a = link.alpha_per_m();
  const double len = link.span_length_km * 1e3;
  const double leff = a > 0.0 ? (1.0 - std::exp(-a * len)) / a : len;
  const double leff_a = a > 0.0 ? 1.0 / a : len;
  const double b2 = std::abs(link.beta2());
  const double bw = link.wdm_channels * link.wdm_spacing_hz;
  const double pi = std::numbers::pi;
  if (b2 == 0.0) throw std::invalid_argument("GN closed form requires nonzero dispersion");
  return (8.0 / 27.0) * gamma * gamma * leff * leff *
         std::asinh(0.5 * pi * pi * b2 * leff_a * bw * bw) /
         (pi * b2 * leff_a * link.baud * link.baud);
}

double nli_power(const LinkConfig& link) {
  const double p = link.launch_power_w();
  return link.num_spans * nli_coefficient_per_span(link) * p * p * p;
}

double gn_snr(const LinkConfig& link) {
  const double noise = ase_power(link) + nli_power(link);
  return link.launch_power_w() / noise;
}

LaunchPowerOptimum optimal_launch_power(const LinkConfig& link, double lo_dbm, double hi_dbm) {
  auto snr_at = [&](double dbm) {
    LinkConfig l = link;
    l.launch_power_dbm = dbm;
    return gn_snr(l);
  };
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = lo_dbm, hi = hi_dbm;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = snr_at(x1), f2 = snr_at(x2);
  while (hi - lo > 1e-6) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = snr_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = snr_at(x2);
    }
  }
  LaunchPowerOptimum opt;
  opt.power_dbm = 0.5 * (lo + hi);
  opt.snr = snr_at(opt.power_dbm);
  opt.at_boundary = opt.power_dbm - lo_dbm < 1e-3 || hi_dbm - opt.power_dbm < 1e-3;
  return opt;
}

void write_snr_grid_csv(std::ostream& os, const LinkConfig& base, std::span<const int> spans,
                        std::span<const double> launch_dbm) {
  os << "spans,distance_km,launch_dbm,snr_db\n";
  for (int n : spans) {
    for (double p : launch_dbm) {
      LinkConfig l = base;
      l.num_spans = n;
      l.launch_power_dbm = p;
      os << n << ',' << n * l.span_length_km << ',' << p << ',' << 10.0 * std::log10(gn_snr(l)) << '\n';
    }
  }
}

}  // namespace pcs
