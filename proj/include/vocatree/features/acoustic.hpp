#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "vocatree/dsp.hpp"
#include "vocatree/vad.hpp"

namespace vocatree {

// ---------------------------------------------------------------------------
// Per-frame acoustic descriptors and their functionals: {log-energy, ZCR,
// F0, spectral centroid, 13 MFCCs} x {mean, std, min, max, median} plus
// jitter, 86 values. F0 functionals and jitter are computed over voiced
// frames only; with no voiced frame they are zero and flagged.
// ---------------------------------------------------------------------------

struct AcousticConfig {
  int n_mel_filters = 26;
  int n_mfcc = 13;
  double f0_min_hz = 60.0;
  double f0_max_hz = 400.0;
  double log_floor = 1e-10;
  double low_band_hz = 500.0;  // split for the low-frequency energy ratio
};

struct FrameDescriptors {
  std::vector<double> energy;        // raw short-time energy
  std::vector<double> log_energy;
  std::vector<double> zcr;
  std::vector<double> centroid_hz;
  std::vector<std::vector<double>> mfcc;  // n_frames x n_mfcc
  std::vector<double> f0_hz;         // 0 where unvoiced
  std::vector<bool> voiced;
  std::vector<double> spectral_energy;      // per-frame total |X|^2
  std::vector<double> low_band_energy;      // per-frame |X|^2 below low_band_hz
  std::vector<double> frame_center_s;
  double frame_rate_hz = 0.0;
};

namespace detail {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular mel filterbank as (bin -> weight) rows over an FFT of
/// fft_size at the given sample rate.
inline std::vector<std::vector<double>> mel_filterbank(int n_filters,
                                                       std::size_t fft_size,
                                                       int sample_rate_hz) {
  const std::size_t n_bins = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(sample_rate_hz / 2.0);
  std::vector<double> edges(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * i / (n_filters + 1);
    edges[i] = mel_to_hz(mel);
  }
  std::vector<std::vector<double>> bank(n_filters, std::vector<double>(n_bins, 0.0));
  const double bin_hz = static_cast<double>(sample_rate_hz) / fft_size;
  for (int m = 0; m < n_filters; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      if (f <= lo || f >= hi) continue;
      bank[m][k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }
  return bank;
}

/// F0 of one frame by the peak of the normalized autocorrelation within
/// the configured lag band; 0 when no usable peak.
inline double frame_f0(const std::vector<double>& frame, int sample_rate_hz,
                       const AcousticConfig& cfg) {
  const std::size_t len = frame.size();
  const std::size_t lag_min = std::max<std::size_t>(
      2, static_cast<std::size_t>(sample_rate_hz / cfg.f0_max_hz));
  const std::size_t lag_max = std::min<std::size_t>(
      len - 1, static_cast<std::size_t>(sample_rate_hz / cfg.f0_min_hz));
  if (lag_min >= lag_max) return 0.0;

  std::vector<double> sq_prefix(len + 1, 0.0);
  for (std::size_t n = 0; n < len; ++n)
    sq_prefix[n + 1] = sq_prefix[n] + frame[n] * frame[n];
  const double total_sq = sq_prefix[len];
  if (total_sq < 1e-14) return 0.0;

  double best_r = 0.0;
  std::size_t best_lag = 0;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    double num = 0.0;
    const std::size_t span = len - lag;
    for (std::size_t n = 0; n < span; ++n) num += frame[n] * frame[n + lag];
    const double e1 = sq_prefix[span];
    const double e2 = total_sq - sq_prefix[lag];
    const double den = std::sqrt(e1 * e2);
    if (den < 1e-14) continue;
    const double r = num / den;
    if (r > best_r) {
      best_r = r;
      best_lag = lag;
    }
  }
  if (best_lag == 0 || best_r < 0.3) return 0.0;
  return static_cast<double>(sample_rate_hz) / static_cast<double>(best_lag);
}

inline bool frame_is_voiced(const FrameSequence& frames, std::size_t t,
                            const Segmentation& seg) {
  const double center = frames.frame_center_s(t);
  for (const auto& iv : seg.intervals) {
    if (iv.kind != IntervalKind::voiced) continue;
    if (center >= iv.start_s && center < iv.end_s) return true;
  }
  return false;
}

}  // namespace detail

inline FrameDescriptors compute_frame_descriptors(const FrameSequence& frames,
                                                  const Segmentation& seg,
                                                  const AcousticConfig& cfg = {}) {
  if (frames.n_frames() == 0)
    throw EmptyInputError("compute_frame_descriptors: no frames");
  const std::size_t n = frames.n_frames();
  const std::size_t fft_size = next_pow2(frames.frame_len);
  const double bin_hz = static_cast<double>(frames.sample_rate_hz) / fft_size;
  const auto bank =
      detail::mel_filterbank(cfg.n_mel_filters, fft_size, frames.sample_rate_hz);

  FrameDescriptors d;
  d.energy = short_time_energy(frames);
  d.zcr = zero_crossing_rate(frames);
  d.log_energy.resize(n);
  d.centroid_hz.resize(n);
  d.mfcc.assign(n, std::vector<double>(cfg.n_mfcc, 0.0));
  d.f0_hz.assign(n, 0.0);
  d.voiced.assign(n, false);
  d.spectral_energy.resize(n);
  d.low_band_energy.resize(n);
  d.frame_center_s.resize(n);
  d.frame_rate_hz =
      static_cast<double>(frames.sample_rate_hz) / static_cast<double>(frames.hop);

  for (std::size_t t = 0; t < n; ++t) {
    d.frame_center_s[t] = frames.frame_center_s(t);
    d.log_energy[t] = std::log(std::max(d.energy[t], cfg.log_floor));
    d.voiced[t] = detail::frame_is_voiced(frames, t, seg);

    const auto mag = magnitude_spectrum(frames.frames[t], fft_size);
    double mag_sum = 0.0, weighted = 0.0, power = 0.0, low_power = 0.0;
    for (std::size_t k = 0; k < mag.size(); ++k) {
      const double f = k * bin_hz;
      mag_sum += mag[k];
      weighted += f * mag[k];
      const double p = mag[k] * mag[k];
      power += p;
      if (f < cfg.low_band_hz) low_power += p;
    }
    d.centroid_hz[t] = mag_sum > 1e-12 ? weighted / mag_sum : 0.0;
    d.spectral_energy[t] = power;
    d.low_band_energy[t] = low_power;

    // Mel filter energies -> log -> DCT-II, keeping coefficients 1..n_mfcc.
    std::vector<double> mel_log(cfg.n_mel_filters);
    for (int m = 0; m < cfg.n_mel_filters; ++m) {
      double e = 0.0;
      const auto& row = bank[m];
      for (std::size_t k = 0; k < mag.size(); ++k)
        e += row[k] * mag[k] * mag[k];
      mel_log[m] = std::log(std::max(e, cfg.log_floor));
    }
    for (int c = 1; c <= cfg.n_mfcc; ++c) {
      double acc = 0.0;
      for (int m = 0; m < cfg.n_mel_filters; ++m)
        acc += mel_log[m] *
               std::cos(kPi * c * (m + 0.5) / cfg.n_mel_filters);
      d.mfcc[t][c - 1] = acc;
    }

    if (d.voiced[t])
      d.f0_hz[t] = detail::frame_f0(frames.frames[t], frames.sample_rate_hz, cfg);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Functionals.
// ---------------------------------------------------------------------------

struct Functionals {
  double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0, median = 0.0;
};

inline Functionals functionals_of(const std::vector<double>& xs) {
  Functionals f;
  if (xs.empty()) return f;
  double sum = 0.0;
  f.min = xs[0];
  f.max = xs[0];
  for (const double x : xs) {
    sum += x;
    f.min = std::min(f.min, x);
    f.max = std::max(f.max, x);
  }
  f.mean = sum / xs.size();
  double var = 0.0;
  for (const double x : xs) var += (x - f.mean) * (x - f.mean);
  f.stddev = std::sqrt(var / xs.size());
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  f.median = (n % 2 == 1) ? sorted[n / 2]
                          : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return f;
}

struct AcousticFeatures {
  std::vector<double> values;  // 86, in names() order
  bool no_voiced_frames = false;

  static constexpr std::size_t kCount = 86;

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = [] {
      std::vector<std::string> out;
      std::vector<std::string> descriptors = {"log_energy", "zcr", "f0",
                                              "spectral_centroid"};
      for (int c = 1; c <= 13; ++c) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "mfcc_%02d", c);
        descriptors.push_back(buf);
      }
      const char* fns[5] = {"mean", "std", "min", "max", "median"};
      for (const auto& desc : descriptors)
        for (const char* fn : fns) out.push_back(desc + "_" + fn);
      out.push_back("jitter");
      return out;
    }();
    return n;
  }
};

/// Mean absolute relative period-to-period F0 change over consecutive
/// voiced frames.
inline double jitter_of(const std::vector<double>& voiced_f0) {
  std::vector<double> periods;
  for (const double f : voiced_f0)
    if (f > 0.0) periods.push_back(1.0 / f);
  if (periods.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < periods.size(); ++i)
    acc += std::abs(periods[i] - periods[i - 1]) / periods[i - 1];
  return acc / static_cast<double>(periods.size() - 1);
}

inline AcousticFeatures acoustic_features(const FrameDescriptors& d) {
  AcousticFeatures out;
  std::vector<double> voiced_f0;
  for (std::size_t t = 0; t < d.f0_hz.size(); ++t)
    if (d.voiced[t] && d.f0_hz[t] > 0.0) voiced_f0.push_back(d.f0_hz[t]);
  out.no_voiced_frames = voiced_f0.empty();

  auto push = [&](const Functionals& f) {
    out.values.push_back(f.mean);
    out.values.push_back(f.stddev);
    out.values.push_back(f.min);
    out.values.push_back(f.max);
    out.values.push_back(f.median);
  };
  push(functionals_of(d.log_energy));
  push(functionals_of(d.zcr));
  push(functionals_of(voiced_f0));  // all-zero when no voiced frame
  push(functionals_of(d.centroid_hz));
  for (int c = 0; c < 13; ++c) {
    std::vector<double> col(d.mfcc.size());
    for (std::size_t t = 0; t < d.mfcc.size(); ++t) col[t] = d.mfcc[t][c];
    push(functionals_of(col));
  }
  out.values.push_back(jitter_of(voiced_f0));
  return out;
}

}  // namespace vocatree
