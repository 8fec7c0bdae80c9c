#include "pcs/fiber.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "pcs/distmatch.hpp"
#include "pcs/fft.hpp"
#include "pcs/rng.hpp"

namespace pcs {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_size(const WaveformFrame& f) {
  if (f.x.size() != f.y.size()) throw std::invalid_argument("polarisation lengths differ");
  if (!(f.sample_rate > 0.0)) throw std::invalid_argument("frame sample rate must be positive");
}

// Multiplies both polarisations by a per-bin transfer function.
template <typename F>
WaveformFrame filter(const WaveformFrame& in, F&& response) {
  require_same_size(in);
  WaveformFrame out = in;
  const std::size_t n = in.size();
  std::vector<cplx> h(n);
  for (std::size_t j = 0; j < n; ++j) h[j] = response(fft_bin_frequency(j, n, in.sample_rate));
  for (auto* pol : {&out.x, &out.y}) {
    fft_forward(*pol);
    for (std::size_t j = 0; j < n; ++j) (*pol)[j] *= h[j];
    fft_inverse(*pol);
  }
  return out;
}

long shift_bins(double offset, std::size_t n, double fs) {
  return std::lround(offset * static_cast<double>(n) / fs);
}

}  // namespace

double WaveformFrame::energy() const {
  double e = 0.0;
  for (auto v : x) e += std::norm(v);
  for (auto v : y) e += std::norm(v);
  return e;
}

double WaveformFrame::power() const { return x.empty() ? 0.0 : energy() / static_cast<double>(x.size()); }

double FiberParams::alpha_per_m() const { return alpha_db_per_km * std::log(10.0) / 10.0 * 1e-3; }

double FiberParams::beta2() const {
  const double d = dispersion_ps_nm_km * 1e-6;
  return -d * wavelength_m * wavelength_m / (2.0 * kPi * phys::kLightSpeed);
}

FiberParams fiber_params(const LinkConfig& link) {
  return {link.alpha_db_per_km, link.gamma_per_w_km, link.dispersion_ps_nm_km, link.wavelength_m};
}

double raised_cosine(double f, double baud, double rolloff) {
  const double a = std::abs(f);
  const double lo = (1.0 - rolloff) * baud / 2.0;
  const double hi = (1.0 + rolloff) * baud / 2.0;
  if (a <= lo) return 1.0;
  if (a > hi) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi / (rolloff * baud) * (a - lo)));
}

WaveformFrame modulate(std::span<const cplx> sx, std::span<const cplx> sy, int oversampling,
                       double rolloff, double baud) {
  if (sx.empty()) throw std::invalid_argument("at least one symbol is required");
  if (!sy.empty() && sy.size() != sx.size()) throw std::invalid_argument("polarisation symbol counts differ");
  if (oversampling < 1) throw std::invalid_argument("oversampling must be at least 1");
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("rolloff must lie in [0, 1]");
  WaveformFrame f;
  f.sample_rate = baud * oversampling;
  const std::size_t n = sx.size() * oversampling;
  f.x.assign(n, 0.0);
  f.y.assign(n, 0.0);
  for (std::size_t k = 0; k < sx.size(); ++k) {
    f.x[k * oversampling] = sx[k];
    if (!sy.empty()) f.y[k * oversampling] = sy[k];
  }
  const double gain = oversampling;
  return filter(f, [&](double fr) { return cplx(gain * std::sqrt(raised_cosine(fr, baud, rolloff))); });
}

std::vector<double> wdm_grid(int channels, double spacing) {
  if (channels < 1) throw std::invalid_argument("at least one channel is required");
  std::vector<double> g;
  for (int i = 0; i < channels; ++i) g.push_back((i - channels / 2) * spacing);
  return g;
}

WaveformFrame wdm_mux(std::span<const WaveformFrame> frames, std::span<const double> offsets,
                      double channel_bandwidth) {
  if (frames.empty()) throw std::invalid_argument("no channels to multiplex");
  if (frames.size() != offsets.size()) throw std::invalid_argument("one offset per channel is required");
  const std::size_t n = frames[0].size();
  const double fs = frames[0].sample_rate;
  for (const auto& f : frames) {
    require_same_size(f);
    if (f.size() != n || f.sample_rate != fs) throw std::invalid_argument("channel frames differ in length or rate");
  }
  const auto [lo, hi] = std::minmax_element(offsets.begin(), offsets.end());
  if (*hi - *lo + channel_bandwidth > fs)
    throw std::invalid_argument("WDM ensemble of " + std::to_string((*hi - *lo + channel_bandwidth) / 1e9) +
                                " GHz aliases at a sample rate of " + std::to_string(fs / 1e9) + " GHz");
  WaveformFrame out;
  out.sample_rate = fs;
  out.x.assign(n, 0.0);
  out.y.assign(n, 0.0);
  std::vector<cplx> phasor(n);
  for (std::size_t c = 0; c < frames.size(); ++c) {
    const long k = shift_bins(offsets[c], n, fs);
    const long nn = static_cast<long>(n);
    for (std::size_t t = 0; t < n; ++t) {
      const long r = ((k % nn) * static_cast<long>(t)) % nn;
      phasor[t] = std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n));
    }
    for (std::size_t t = 0; t < n; ++t) {
      out.x[t] += frames[c].x[t] * phasor[t];
      out.y[t] += frames[c].y[t] * phasor[t];
    }
  }
  return out;
}

WaveformFrame wdm_demux_center(const WaveformFrame& frame, double bandwidth) {
  require_same_size(frame);
  if (!(bandwidth > 0.0) || bandwidth > frame.sample_rate)
    throw std::invalid_argument("demux bandwidth must be positive and within the sample rate");
  const double half = bandwidth / 2.0;
  return filter(frame, [&](double f) { return cplx(std::abs(f) <= half ? 1.0 : 0.0); });
}

WaveformFrame ssfm_propagate(const WaveformFrame& frame, const FiberParams& fiber, const SsfmConfig& cfg,
                             double span_length_m) {
  require_same_size(frame);
  if (!(cfg.step_m > 0.0) || !(span_length_m >= 0.0)) throw std::invalid_argument("step and span length must be positive");
  const double ratio = span_length_m / cfg.step_m;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("SSFM step must divide the span length");
  WaveformFrame out = frame;
  if (steps == 0) return out;

  const std::size_t n = frame.size();
  const double h = cfg.step_m;
  const double alpha = fiber.alpha_per_m();
  const double b2 = fiber.beta2();
  const double leff = alpha > 0.0 ? 2.0 / alpha * std::sinh(alpha * h / 2.0) : h;
  const double kerr = 8.0 / 9.0 * fiber.gamma_per_w_m() * leff;

  std::vector<cplx> half(n), full(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 2.0 * kPi * fft_bin_frequency(j, n, frame.sample_rate);
    const cplx g(-alpha / 2.0, b2 / 2.0 * w * w);
    half[j] = std::exp(g * (h / 2.0));
    full[j] = std::exp(g * h);
  }

  auto& x = out.x;
  auto& y = out.y;
  fft_forward(x);
  fft_forward(y);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] *= half[j];
    y[j] *= half[j];
  }
  for (long s = 0; s < steps; ++s) {
    fft_inverse(x);
    fft_inverse(y);
    if (kerr != 0.0) {
      for (std::size_t t = 0; t < n; ++t) {
        const double phi = kerr * (std::norm(x[t]) + std::norm(y[t]));
        const cplx rot(std::cos(phi), std::sin(phi));
        x[t] *= rot;
        y[t] *= rot;
      }
    }
    fft_forward(x);
    fft_forward(y);
    const auto& op = s + 1 == steps ? half : full;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] *= op[j];
      y[j] *= op[j];
    }
  }
  fft_inverse(x);
  fft_inverse(y);

  if (!std::isfinite(out.energy()))
    throw std::runtime_error("split-step propagation diverged (non-finite field) over a " +
                             std::to_string(span_length_m / 1e3) + " km span with " +
                             std::to_string(h) + " m steps");
  return out;
}

WaveformFrame edfa(const WaveformFrame& frame, double gain_db, double nf_db, std::uint64_t seed,
                   const EdfaOptions& opt) {
  require_same_size(frame);
  if (!(gain_db >= 0.0)) throw std::invalid_argument("amplifier gain must be nonnegative");
  const double g = std::pow(10.0, gain_db / 10.0);
  const double f = std::pow(10.0, nf_db / 10.0);
  WaveformFrame out = frame;
  const double a = std::sqrt(g);
  for (auto& v : out.x) v *= a;
  for (auto& v : out.y) v *= a;
  if (!opt.add_noise || g == 1.0) return out;
  const double var = (g - 1.0) * phys::kPlanck * opt.carrier_frequency * f / 2.0 * frame.sample_rate;
  const double sd = std::sqrt(var / 2.0);
  NormalSource normal(seed);
  for (auto* pol : {&out.x, &out.y})
    for (auto& v : *pol) {
      const double re = normal();
      const double im = normal();
      v += cplx(sd * re, sd * im);
    }
  return out;
}

WaveformFrame cd_compensate(const WaveformFrame& frame, const FiberParams& fiber, double length_m) {
  const double b2 = fiber.beta2();
  return filter(frame, [&](double f) {
    const double w = 2.0 * kPi * f;
    return std::exp(cplx(0.0, -b2 / 2.0 * w * w * length_m));
  });
}

DualPolSymbols matched_filter_downsample(const WaveformFrame& frame, double rolloff, int oversampling) {
  require_same_size(frame);
  if (oversampling < 1 || frame.size() % oversampling != 0)
    throw std::invalid_argument("frame length must be a multiple of the oversampling factor");
  const double baud = frame.sample_rate / oversampling;
  const WaveformFrame f =
      filter(frame, [&](double fr) { return cplx(std::sqrt(raised_cosine(fr, baud, rolloff))); });
  const std::size_t symbols = frame.size() / oversampling;
  int best = 0;
  double best_e = -1.0;
  for (int p = 0; p < oversampling; ++p) {
    double e = 0.0;
    for (std::size_t k = 0; k < symbols; ++k)
      e += std::norm(f.x[k * oversampling + p]) + std::norm(f.y[k * oversampling + p]);
    if (e > best_e) {
      best_e = e;
      best = p;
    }
  }
  DualPolSymbols out;
  out.x.reserve(symbols);
  out.y.reserve(symbols);
  for (std::size_t k = 0; k < symbols; ++k) {
    out.x.push_back(f.x[k * oversampling + best]);
    out.y.push_back(f.y[k * oversampling + best]);
  }
  return out;
}

std::vector<cplx> normalize(std::span<const cplx> rx, std::span<const cplx> tx) {
  if (rx.size() != tx.size()) throw std::invalid_argument("normalize: length mismatch");
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += std::conj(tx[i]) * rx[i];
    den += std::norm(tx[i]);
  }
  if (!(den > 0.0)) throw std::invalid_argument("normalize: reference has no energy");
  const cplx c = num / den;
  if (c == cplx(0.0)) throw std::runtime_error("normalize: received signal is orthogonal to the reference");
  std::vector<cplx> out(rx.begin(), rx.end());
  for (auto& v : out) v /= c;
  return out;
}

namespace {

// Fixed little-endian byte order whatever the host.
template <typename T>
void put(std::ostream& os, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(b, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  char b[sizeof(T)];
  if (!is.read(b, sizeof(T))) throw std::runtime_error("truncated waveform frame");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_frame(std::ostream& os, const WaveformFrame& frame) {
  require_same_size(frame);
  os.write("PCSW", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, 2);
  put<std::uint64_t>(os, frame.size());
  put<double>(os, frame.sample_rate);
  put<double>(os, frame.center_offset);
  for (const auto* pol : {&frame.x, &frame.y})
    for (auto v : *pol) {
      put<double>(os, v.real());
      put<double>(os, v.imag());
    }
}

WaveformFrame read_frame(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "PCSW", 4) != 0) throw std::runtime_error("bad waveform frame magic");
  if (get<std::uint32_t>(is) != 1) throw std::runtime_error("unsupported waveform frame version");
  if (get<std::uint32_t>(is) != 2) throw std::runtime_error("waveform frame must hold two polarisations");
  const auto n = get<std::uint64_t>(is);
  WaveformFrame f;
  f.sample_rate = get<double>(is);
  f.center_offset = get<double>(is);
  for (auto* pol : {&f.x, &f.y}) {
    pol->resize(n);
    for (auto& v : *pol) {
      const double re = get<double>(is);
      v = cplx(re, get<double>(is));
    }
  }
  return f;
}

DualPolSymbols simulate_wdm_link(const LinkConfig& link, const SsfmConfig& ssfm, const Constellation& c,
                                 const ChannelSymbols& center, std::uint64_t seed, bool add_noise) {
  link.validate();
  if (center.x.empty() || center.x.size() != center.y.size())
    throw std::invalid_argument("centre channel needs equal, nonempty symbol lists per polarisation");
  const std::size_t count = center.x.size();
  const int centre = link.wdm_channels / 2;
  const double amp = std::sqrt(link.launch_power_w() / 2.0 / c.average_power());

  auto to_points = [&](std::span<const std::uint32_t> idx) {
    std::vector<cplx> s;
    s.reserve(idx.size());
    for (auto i : idx) {
      if (i >= static_cast<std::uint32_t>(c.order())) throw std::invalid_argument("symbol index out of range");
      s.push_back(amp * c.point(i));
    }
    return s;
  };

  std::vector<WaveformFrame> channels;
  std::vector<cplx> tx_x, tx_y;
  PmfSampler sample(c.pmf());
  for (int ch = 0; ch < link.wdm_channels; ++ch) {
    std::vector<cplx> sx, sy;
    if (ch == centre) {
      sx = to_points(center.x);
      sy = to_points(center.y);
      for (auto i : center.x) tx_x.push_back(c.point(i));
      for (auto i : center.y) tx_y.push_back(c.point(i));
    } else {
      std::mt19937_64 rng(derive_seed(seed, 1000 + ch));
      std::vector<std::uint32_t> ix(count), iy(count);
      for (auto& v : ix) v = sample(rng);
      for (auto& v : iy) v = sample(rng);
      sx = to_points(ix);
      sy = to_points(iy);
    }
    channels.push_back(modulate(sx, sy, ssfm.oversampling, link.rolloff, link.baud));
  }
  const auto offsets = wdm_grid(link.wdm_channels, link.wdm_spacing_hz);
  WaveformFrame field = wdm_mux(channels, offsets, (1.0 + link.rolloff) * link.baud);
  channels.clear();

  const FiberParams fiber = fiber_params(link);
  const double span_m = link.span_length_km * 1e3;
  const double gain_db = link.alpha_db_per_km * link.span_length_km;
  EdfaOptions amp_opt;
  amp_opt.carrier_frequency = link.carrier_frequency();
  amp_opt.add_noise = add_noise;
  for (int s = 0; s < link.num_spans; ++s) {
    field = ssfm_propagate(field, fiber, ssfm, span_m);
    field = edfa(field, gain_db, link.nf_db, derive_seed(seed, s), amp_opt);
  }
  field = cd_compensate(field, fiber, span_m * link.num_spans);
  field = wdm_demux_center(field, (1.0 + link.rolloff) * link.baud);
  DualPolSymbols rx = matched_filter_downsample(field, link.rolloff, ssfm.oversampling);
  rx.x = normalize(rx.x, tx_x);
  rx.y = normalize(rx.y, tx_y);
  return rx;
}

}  // namespace pcs
