#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pcs/constellation.hpp"
#include "pcs/linkmodel.hpp"

namespace pcs {

/// Dual-polarisation complex baseband field in sqrt(W). Frames are cyclic:
/// every filter and fibre operator acts by circular convolution.
struct WaveformFrame {
  std::vector<cplx> x, y;
  double sample_rate = 0.0;       ///< Hz
  double center_offset = 0.0;     ///< Hz, relative to the reference carrier

  std::size_t size() const { return x.size(); }
  /// Mean of |x|^2 + |y|^2 over samples.
  double power() const;
  /// Sum of |x|^2 + |y|^2.
  double energy() const;
};

struct FiberParams {
  double alpha_db_per_km = 0.2;
  double gamma_per_w_km = 1.3;
  double dispersion_ps_nm_km = 17.0;
  double wavelength_m = 1550e-9;

  double alpha_per_m() const;
  double beta2() const;  ///< s^2/m
  double gamma_per_w_m() const { return gamma_per_w_km * 1e-3; }
};

FiberParams fiber_params(const LinkConfig& link);

struct SsfmConfig {
  double step_m = 1000.0;
  int oversampling = 8;
};

/// Raised-cosine spectrum with unit passband.
double raised_cosine(double f, double baud, double rolloff);

/// Zero-insert upsampling followed by a root-raised-cosine filter scaled so
/// that the waveform power equals the symbol power. An empty `sy` leaves the
/// y polarisation silent.
WaveformFrame modulate(std::span<const cplx> sx, std::span<const cplx> sy, int oversampling,
                       double rolloff, double baud);

/// Shifts frame i by offsets[i] (rounded to the nearest DFT bin) and sums.
/// Rejects mismatched frames and ensembles whose extent, including
/// `channel_bandwidth`, exceeds the sample rate.
WaveformFrame wdm_mux(std::span<const WaveformFrame> frames, std::span<const double> offsets,
                      double channel_bandwidth = 0.0);

/// Evenly spaced grid around the centre: channel i sits at
/// (i - channels/2) * spacing.
std::vector<double> wdm_grid(int channels, double spacing);

/// Ideal rectangular bandpass |f| <= bandwidth/2 around the reference carrier.
WaveformFrame wdm_demux_center(const WaveformFrame& frame, double bandwidth);

/// Symmetric split-step solution of the Manakov equation over one span:
/// loss and dispersion in the frequency domain, Kerr phase
/// (8/9) γ (|x|^2 + |y|^2) L_eff at the step midpoints. Throws
/// std::runtime_error if the field stops being finite.
WaveformFrame ssfm_propagate(const WaveformFrame& frame, const FiberParams& fiber,
                             const SsfmConfig& cfg, double span_length_m);

struct EdfaOptions {
  double carrier_frequency = phys::kLightSpeed / 1550e-9;
  bool add_noise = true;
};

/// Field gain sqrt(G) plus circular white ASE. The complex noise variance per
/// sample and polarisation is (G - 1) h f F / 2 * sample_rate, split equally
/// between the two quadratures.
WaveformFrame edfa(const WaveformFrame& frame, double gain_db, double nf_db, std::uint64_t seed,
                   const EdfaOptions& opt = {});

/// All-pass inverse of the dispersion accumulated over `length_m`.
WaveformFrame cd_compensate(const WaveformFrame& frame, const FiberParams& fiber, double length_m);

struct DualPolSymbols {
  std::vector<cplx> x, y;
};

/// Unit-gain RRC matched filter, then symbol-rate sampling at the timing
/// phase with the largest energy.
DualPolSymbols matched_filter_downsample(const WaveformFrame& frame, double rolloff, int oversampling);

/// Removes a constant complex gain: rx / c with c = <tx, rx> / <tx, tx>.
std::vector<cplx> normalize(std::span<const cplx> rx, std::span<const cplx> tx);

/// Binary frame dump (little-endian):
///   "PCSW" | u32 version (1) | u32 pols (2) | u64 length | f64 sample_rate |
///   f64 center_offset | x then y as interleaved re/im f64 pairs.
void write_frame(std::ostream& os, const WaveformFrame& frame);
WaveformFrame read_frame(std::istream& is);

/// Transmitted symbol indices of the centre channel, one list per
/// polarisation.
struct ChannelSymbols {
  std::vector<std::uint32_t> x, y;
};

/// End-to-end WDM link: every channel carries i.i.d. draws from c's pmf
/// except the centre one, which carries `center`; launch power per channel is
/// split equally between polarisations. Each span is fibre then an EDFA
/// restoring the span loss. The receiver compensates dispersion, selects the
/// centre channel with a (1 + rolloff) baud bandpass, matched-filters, and
/// normalises each polarisation against the transmitted symbols.
DualPolSymbols simulate_wdm_link(const LinkConfig& link, const SsfmConfig& ssfm,
                                 const Constellation& c, const ChannelSymbols& center,
                                 std::uint64_t seed, bool add_noise = true);

}  // namespace pcs
