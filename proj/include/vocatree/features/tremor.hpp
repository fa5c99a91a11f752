#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vocatree/common.hpp"
#include "vocatree/dsp.hpp"

namespace vocatree {

// ---------------------------------------------------------------------------
// Tremor features: strength of 10-20 Hz modulation in the amplitude
// envelope and the F0 contour, 4 values per contour. Contours are
// mean-centered and analyzed through one-sided DFT amplitudes restricted
// to the band.
// ---------------------------------------------------------------------------

struct TremorBand {
  double lo_hz = 10.0;
  double hi_hz = 20.0;
};

struct ContourModulation {
  double band_rms = 0.0;
  double peak_hz = 0.0;
  double peak_mag = 0.0;
  double mod_index = 0.0;
};

struct TremorFeatures {
  ContourModulation amplitude;
  ContourModulation f0;

  static constexpr std::size_t kCount = 8;

  std::vector<double> as_vector() const {
    return {amplitude.band_rms, amplitude.peak_hz, amplitude.peak_mag,
            amplitude.mod_index, f0.band_rms, f0.peak_hz, f0.peak_mag,
            f0.mod_index};
  }

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "amp_mod_band_rms", "amp_mod_peak_hz", "amp_mod_peak_mag",
        "amp_mod_index",    "f0_mod_band_rms", "f0_mod_peak_hz",
        "f0_mod_peak_mag",  "f0_mod_index"};
    return n;
  }
};

namespace detail {

inline ContourModulation contour_modulation(const std::vector<double>& contour,
                                            double rate_hz,
                                            const TremorBand& band) {
  const std::size_t n = contour.size();
  double mean = 0.0;
  for (const double x : contour) mean += x;
  mean /= static_cast<double>(n);

  // One-sided DFT amplitudes A_k = 2|X_k|/N over band bins only.
  const std::size_t k_lo = static_cast<std::size_t>(
      std::ceil(band.lo_hz * n / rate_hz));
  const std::size_t k_hi = std::min<std::size_t>(
      n / 2, static_cast<std::size_t>(std::floor(band.hi_hz * n / rate_hz)));

  ContourModulation out;
  double band_power = 0.0;
  for (std::size_t k = k_lo; k <= k_hi && k_lo <= k_hi; ++k) {
    double re = 0.0, im = 0.0;
    const double w = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = contour[i] - mean;
      re += c * std::cos(w * static_cast<double>(i));
      im += c * std::sin(w * static_cast<double>(i));
    }
    const double amp = 2.0 * std::sqrt(re * re + im * im) / static_cast<double>(n);
    band_power += amp * amp / 2.0;  // RMS contribution of one sinusoid
    if (amp > out.peak_mag) {
      out.peak_mag = amp;
      out.peak_hz = static_cast<double>(k) * rate_hz / static_cast<double>(n);
    }
  }
  if (out.peak_mag == 0.0 && k_lo <= k_hi) {
    out.peak_hz = static_cast<double>(k_lo) * rate_hz / static_cast<double>(n);
  }
  out.band_rms = std::sqrt(band_power);
  const double denom = std::abs(mean);
  out.mod_index = denom > 1e-9 ? out.band_rms / denom : 0.0;
  return out;
}

}  // namespace detail

/// Contours must be sampled at the frame rate and cover at least one
/// second of frames.
inline TremorFeatures tremor_features(const std::vector<double>& f0_contour,
                                      const std::vector<double>& amp_envelope,
                                      double contour_rate_hz,
                                      const TremorBand& band = {}) {
  if (contour_rate_hz <= 0.0)
    throw ValidationError("tremor_features: contour rate must be positive");
  const std::size_t min_len = static_cast<std::size_t>(contour_rate_hz);
  if (amp_envelope.size() < min_len || f0_contour.size() < min_len)
    throw InsufficientDataError(
        "tremor_features: contour shorter than 1 s of frames");
  if (f0_contour.size() != amp_envelope.size())
    throw ShapeError("tremor_features: contour lengths differ");

  TremorFeatures out;
  out.amplitude = detail::contour_modulation(amp_envelope, contour_rate_hz, band);
  out.f0 = detail::contour_modulation(f0_contour, contour_rate_hz, band);
  return out;
}

}  // namespace vocatree
