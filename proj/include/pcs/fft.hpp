#pragma once

#include <complex>
#include <span>

namespace pcs {

/// In-place unnormalised DFT through FFTW. Plans are created once per
/// (length, direction) under a lock and executed on caller buffers, so
/// concurrent calls on distinct buffers are safe.
void fft_forward(std::span<std::complex<double>> data);
/// Inverse transform including the 1/N factor.
void fft_inverse(std::span<std::complex<double>> data);

/// Frequency of DFT bin j for n bins at sample rate fs (negative above n/2).
inline double fft_bin_frequency(std::size_t j, std::size_t n, double fs) {
  const auto jj = static_cast<double>(j);
  const auto nn = static_cast<double>(n);
  return (j < (n + 1) / 2 ? jj : jj - nn) * fs / nn;
}

}  // namespace pcs
