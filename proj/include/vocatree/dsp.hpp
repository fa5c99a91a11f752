#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "vocatree/common.hpp"

namespace vocatree {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Pre-emphasis: first-order high-pass 1 - mu*z^-1 with initial rest,
// y[0] = x[0]. mu defaults to 0.97.
// ---------------------------------------------------------------------------

struct PreEmphasisConfig {
  double mu = 0.97;
};

inline std::vector<double> pre_emphasize(const std::vector<double>& signal,
                                         const PreEmphasisConfig& cfg = {}) {
  if (signal.empty()) throw EmptyInputError("pre_emphasize: empty signal");
  if (cfg.mu < 0.0 || cfg.mu >= 1.0)
    throw ValidationError("pre_emphasize: mu must be in [0, 1)");
  std::vector<double> out(signal.size());
  out[0] = signal[0];
  for (std::size_t n = 1; n < signal.size(); ++n) {
    out[n] = signal[n] - cfg.mu * signal[n - 1];
  }
  return out;
}

/// Inverse recursion, x[n] = y[n] + mu*x[n-1]. Used by tests to check that
/// pre-emphasis is invertible to numerical precision.
inline std::vector<double> de_emphasize(const std::vector<double>& signal,
                                        const PreEmphasisConfig& cfg = {}) {
  if (signal.empty()) throw EmptyInputError("de_emphasize: empty signal");
  std::vector<double> out(signal.size());
  out[0] = signal[0];
  for (std::size_t n = 1; n < signal.size(); ++n) {
    out[n] = signal[n] + cfg.mu * out[n - 1];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Windowing and framing.
// ---------------------------------------------------------------------------

enum class WindowKind { hamming, rectangular };

struct FrameSpec {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  WindowKind window = WindowKind::hamming;
};

/// w(n) = 0.54 - 0.46*cos(2*pi*n/(N-1)), 0 <= n <= N-1.
inline std::vector<double> hamming_window(std::size_t n_samples) {
  if (n_samples < 2) throw ValidationError("hamming_window: N must be >= 2");
  std::vector<double> w(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    w[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                  static_cast<double>(n_samples - 1));
  }
  return w;
}

/// Fixed-length frames of the windowed signal. The tail shorter than one
/// full frame is dropped; a signal shorter than one frame yields zero
/// frames with the too_short flag set.
struct FrameSequence {
  std::vector<std::vector<double>> frames;
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  int sample_rate_hz = 0;
  std::size_t signal_len = 0;
  bool too_short = false;

  std::size_t n_frames() const { return frames.size(); }
  /// Center time of frame t in seconds.
  double frame_center_s(std::size_t t) const {
    return (static_cast<double>(t) * static_cast<double>(hop) +
            static_cast<double>(frame_len) / 2.0) /
           static_cast<double>(sample_rate_hz);
  }
};

inline FrameSequence frame_and_window(const std::vector<double>& signal,
                                      int sample_rate_hz,
                                      const FrameSpec& spec = {}) {
  if (sample_rate_hz <= 0)
    throw ValidationError("frame_and_window: sample rate must be positive");
  if (spec.hop_ms <= 0.0 || spec.hop_ms > spec.frame_ms)
    throw ValidationError("frame_and_window: need 0 < hop_ms <= frame_ms");
  FrameSequence seq;
  seq.sample_rate_hz = sample_rate_hz;
  seq.signal_len = signal.size();
  seq.frame_len = static_cast<std::size_t>(
      std::floor(spec.frame_ms * sample_rate_hz / 1000.0));
  seq.hop = static_cast<std::size_t>(
      std::floor(spec.hop_ms * sample_rate_hz / 1000.0));
  if (seq.frame_len == 0 || seq.hop == 0)
    throw ValidationError("frame_and_window: frame or hop shorter than one sample");
  if (signal.size() < seq.frame_len) {
    seq.too_short = true;
    return seq;
  }
  const std::size_t n_frames = (signal.size() - seq.frame_len) / seq.hop + 1;
  std::vector<double> window;
  if (spec.window == WindowKind::hamming) window = hamming_window(seq.frame_len);
  seq.frames.resize(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) {
    auto& frame = seq.frames[t];
    frame.resize(seq.frame_len);
    const std::size_t base = t * seq.hop;
    if (spec.window == WindowKind::hamming) {
      for (std::size_t n = 0; n < seq.frame_len; ++n)
        frame[n] = signal[base + n] * window[n];
    } else {
      for (std::size_t n = 0; n < seq.frame_len; ++n)
        frame[n] = signal[base + n];
    }
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Per-frame descriptors.
// ---------------------------------------------------------------------------

/// E_t = sum of squared samples within frame t.
inline std::vector<double> short_time_energy(const FrameSequence& frames) {
  if (frames.n_frames() == 0)
    throw EmptyInputError("short_time_energy: no frames");
  std::vector<double> energy(frames.n_frames());
  for (std::size_t t = 0; t < frames.n_frames(); ++t) {
    double sum = 0.0;
    for (const double s : frames.frames[t]) sum += s * s;
    energy[t] = sum;
  }
  return energy;
}

/// Sign changes between consecutive samples over (frame_len - 1), with
/// sign(0) treated as positive. Values lie in [0, 1].
inline std::vector<double> zero_crossing_rate(const FrameSequence& frames) {
  if (frames.n_frames() == 0)
    throw EmptyInputError("zero_crossing_rate: no frames");
  std::vector<double> zcr(frames.n_frames());
  for (std::size_t t = 0; t < frames.n_frames(); ++t) {
    const auto& frame = frames.frames[t];
    std::size_t changes = 0;
    for (std::size_t n = 1; n < frame.size(); ++n) {
      const bool prev_neg = frame[n - 1] < 0.0;
      const bool cur_neg = frame[n] < 0.0;
      if (prev_neg != cur_neg) ++changes;
    }
    zcr[t] = frame.size() > 1
                 ? static_cast<double>(changes) / static_cast<double>(frame.size() - 1)
                 : 0.0;
  }
  return zcr;
}

// ---------------------------------------------------------------------------
// Small iterative radix-2 FFT. Sizes are powers of two; callers zero-pad.
// ---------------------------------------------------------------------------

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// Magnitude spectrum of a real vector zero-padded to fft_size
/// (power of two, >= x.size()); returns fft_size/2 + 1 bins.
inline std::vector<double> magnitude_spectrum(const std::vector<double>& x,
                                              std::size_t fft_size) {
  std::vector<std::complex<double>> buf(fft_size, {0.0, 0.0});
  for (std::size_t i = 0; i < x.size() && i < fft_size; ++i) buf[i] = x[i];
  fft_inplace(buf);
  std::vector<double> mag(fft_size / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

}  // namespace vocatree
