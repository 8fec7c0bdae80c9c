#pragma once

#include <iosfwd>
#include <span>

namespace pcs {

namespace phys {
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kLightSpeed = 299792458.0;    // m/s
}  // namespace phys

/// Multi-span WDM link. Defaults are the reference system: SSMF, 100 km
/// spans with EDFAs, 15 x 28 GBaud channels on a 30 GHz grid.
struct LinkConfig {
  double span_length_km = 100.0;
  int num_spans = 1;
  double alpha_db_per_km = 0.2;
  double gamma_per_w_km = 1.3;
  double dispersion_ps_nm_km = 17.0;
  double nf_db = 4.0;
  double baud = 28e9;
  double rolloff = 0.05;
  int wdm_channels = 15;
  double wdm_spacing_hz = 30e9;
  double launch_power_dbm = -1.6;  ///< per channel, both polarisations
  double wavelength_m = 1550e-9;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  double carrier_frequency() const { return phys::kLightSpeed / wavelength_m; }
  double alpha_per_m() const;  ///< power attenuation, 1/m
  double beta2() const;        ///< s^2/m
  double gamma_per_w_m() const { return gamma_per_w_km * 1e-3; }
  double span_gain() const;    ///< linear, compensates one span exactly
  double launch_power_w() const;
};

/// ASE power in a bandwidth of `baud`, both polarisations, accumulated over
/// all spans: N (G - 1) h f F B.
double ase_power(const LinkConfig& link);

/// GN-model NLI coefficient of one span for the centre channel, W^-2:
/// (8/27) γ² L_eff² asinh((π²/2)|β2| L_eff,a B²) / (π |β2| L_eff,a R²),
/// B = channels × spacing.
double nli_coefficient_per_span(const LinkConfig& link);

/// η P³ N with incoherent accumulation over spans.
double nli_power(const LinkConfig& link);

double gn_snr(const LinkConfig& link);

struct LaunchPowerOptimum {
  double power_dbm = 0.0;
  double snr = 0.0;       ///< linear
  bool at_boundary = false;  ///< no interior optimum in the search range
};

/// Golden-section search of gn_snr over launch power in dB, within
/// [lo_dbm, hi_dbm].
LaunchPowerOptimum optimal_launch_power(const LinkConfig& link, double lo_dbm = -20.0,
                                        double hi_dbm = 20.0);

struct LinkGridPoint {
  int spans = 0;
  double launch_dbm = 0.0;
  double snr_db = 0.0;
};

/// CSV with header "spans,distance_km,launch_dbm,snr_db".
void write_snr_grid_csv(std::ostream& os, const LinkConfig& base, std::span<const int> spans,
                        std::span<const double> launch_dbm);

}  // namespace pcs
