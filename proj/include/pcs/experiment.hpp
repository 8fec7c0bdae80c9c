#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pcs/chain.hpp"
#include "pcs/fiber.hpp"
#include "pcs/linkmodel.hpp"

namespace pcs {

enum class Preset { desk, paper, custom };
std::string preset_name(Preset p);
Preset parse_preset(std::string_view s);

struct ExperimentConfig {
  Preset preset = Preset::desk;
  int order = 16;
  std::vector<InputMode> modes = {InputMode::uniform, InputMode::shaped};
  std::vector<int> spans = {10, 30, 40, 50, 60};
  std::vector<double> launch_dbm = {-1.0};
  std::vector<double> snr_db;            ///< AWGN validation grid
  int frames = 20;                       ///< LDPC frames per BER point
  int mi_runs = 1;                       ///< fibre frames pooled per MI point
  std::size_t symbols = 4096;            ///< per polarisation and fibre frame
  int stop_after_clean = 2;              ///< AWGN sweep stops after this many zero-BER points
  MatcherMode matcher = MatcherMode::emulate;
  std::uint64_t seed = 1;
  int threads = 0;                       ///< 0: hardware concurrency
  LinkConfig link;
  SsfmConfig ssfm;
  bool ase = true;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Canonical key=value text; equal configs give equal text.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

/// Fills the fidelity-dependent fields (channels, symbols, oversampling,
/// step) of a preset; other fields are left alone.
void apply_preset(ExperimentConfig& cfg, Preset p);
ExperimentConfig make_config(Preset p);

/// key = value lines, '#' comments. Lists are comma separated; integer lists
/// also accept start:step:stop. Fidelity keys (wdm_channels, symbols,
/// oversampling, step_m) are only accepted with preset = custom.
ExperimentConfig parse_config(std::istream& is, const ExperimentConfig& base = make_config(Preset::desk));
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = make_config(Preset::desk));

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; the first exception is rethrown after all
/// workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Center-channel symbols with the exact composition closest to the pmf, in
/// seeded random order (what a constant-composition matcher emits).
std::vector<std::uint32_t> composition_symbols(std::span<const double> pmf, std::size_t count, std::uint64_t seed);

struct MiPoint {
  int spans = 0;
  double launch_dbm = 0.0;
  InputMode mode = InputMode::uniform;
  double gn_snr_db = 0.0;
  double nu = 0.0;
  double entropy = 0.0;
  double mi = 0.0;
  double effective_snr_db = 0.0;  ///< 1 / measured noise variance
  bool ok = false;
  std::string error;
};

struct BerPoint {
  int spans = 0;
  double launch_dbm = 0.0;
  InputMode mode = InputMode::uniform;
  double ber = 0.0;
  std::size_t bit_errors = 0, bits = 0;
  int frames = 0, frame_errors = 0, matcher_failures = 0;
  bool ok = false;
  std::string error;
};

struct AwgnPoint {
  InputMode mode = InputMode::uniform;
  double snr_db = 0.0;
  double ber = 0.0;
  double mi = 0.0;  ///< the chain's own AWGN MI at this SNR
  std::size_t bit_errors = 0, bits = 0;
  int frames = 0, frame_errors = 0;
};

struct AwgnSummary {
  std::vector<AwgnPoint> points;
  /// SNR at BER 1.3e-3 per mode (NaN if not bracketed), same order as modes.
  std::vector<double> crossing_db;
  /// SNR at which each chain's AWGN MI equals its information rate.
  std::vector<double> mi_threshold_db;
};

inline constexpr double kBerThreshold = 1.3e-3;

std::vector<MiPoint> run_mi_sweep(const ExperimentConfig& cfg);
std::vector<BerPoint> run_ber_sweep(const ExperimentConfig& cfg);
AwgnSummary run_awgn_validation(const ExperimentConfig& cfg);

/// SNR (dB) where a BER curve crosses `level`, by log-linear interpolation
/// between the last point above and the first point below it. A zero BER is
/// taken as half an error over the bits simulated. NaN if not bracketed.
double ber_crossing(const std::vector<AwgnPoint>& points, double level = kBerThreshold);

/// SNR (dB) where the AWGN MI of c reaches `bits`, by bisection.
double mi_threshold_snr_db(const Constellation& c, double bits);

void write_mi_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<MiPoint>& rows);
void write_ber_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<BerPoint>& rows);
void write_awgn_csv(std::ostream& os, const ExperimentConfig& cfg, const AwgnSummary& s);

}  // namespace pcs
