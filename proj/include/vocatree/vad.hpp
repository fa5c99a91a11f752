#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocatree/dsp.hpp"

namespace vocatree {

// ---------------------------------------------------------------------------
// Double-threshold endpoint detection. Energy thresholds are multiples of
// the noise-floor energy estimated from the frames inside the leading
// 100 ms; frames above the high threshold seed voiced regions, which are
// extended outward while energy stays above the low threshold or ZCR
// stays above its threshold. Voiced runs shorter than min_voiced_ms are
// reclassified silent, then internal silences shorter than min_pause_ms
// are merged into the surrounding voiced region (the short-pause discard
// rule).
// ---------------------------------------------------------------------------

struct VadConfig {
  double energy_high_factor = 4.0;
  double energy_low_factor = 2.0;
  double zcr_threshold_factor = 1.5;
  double min_voiced_ms = 100.0;
  double min_pause_ms = 200.0;
};

enum class IntervalKind { voiced, silent };

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
  IntervalKind kind = IntervalKind::silent;

  double duration_s() const { return end_s - start_s; }
};

struct Segmentation {
  double total_duration_s = 0.0;
  std::vector<Interval> intervals;
  /// Start of the first voiced interval; equals total_duration_s when the
  /// signal is all silent (all_silent is then set).
  double reaction_time_s = 0.0;
  bool all_silent = false;
};

namespace detail {

/// Merge consecutive same-kind flags into intervals. Frame t owns the time
/// slice [t*hop, (t+1)*hop); the last slice absorbs the tail so the
/// intervals tile [0, total_duration].
inline std::vector<Interval> flags_to_intervals(const std::vector<bool>& voiced,
                                                std::size_t hop,
                                                int sample_rate_hz,
                                                double total_duration_s) {
  std::vector<Interval> out;
  const double hop_s = static_cast<double>(hop) / sample_rate_hz;
  std::size_t run_start = 0;
  for (std::size_t t = 1; t <= voiced.size(); ++t) {
    if (t == voiced.size() || voiced[t] != voiced[run_start]) {
      Interval iv;
      iv.start_s = static_cast<double>(run_start) * hop_s;
      iv.end_s = (t == voiced.size()) ? total_duration_s
                                      : static_cast<double>(t) * hop_s;
      iv.kind = voiced[run_start] ? IntervalKind::voiced : IntervalKind::silent;
      out.push_back(iv);
      run_start = t;
    }
  }
  return out;
}

inline std::vector<Interval> merge_adjacent(std::vector<Interval> ivs) {
  std::vector<Interval> out;
  for (const auto& iv : ivs) {
    if (!out.empty() && out.back().kind == iv.kind) {
      out.back().end_s = iv.end_s;
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

}  // namespace detail

inline Segmentation detect_endpoints(const std::vector<double>& signal,
                                     int sample_rate_hz,
                                     const FrameSpec& frame_spec = {},
                                     const VadConfig& vad = {}) {
  if (vad.energy_low_factor > vad.energy_high_factor)
    throw ValidationError("detect_endpoints: energy_low_factor > energy_high_factor");
  const double duration_s =
      static_cast<double>(signal.size()) / sample_rate_hz;
  if (duration_s < 0.2)
    throw TooShortError("detect_endpoints: signal shorter than 200 ms");

  FrameSequence frames = frame_and_window(signal, sample_rate_hz, frame_spec);
  if (frames.n_frames() == 0)
    throw TooShortError("detect_endpoints: signal shorter than one frame");
  const std::vector<double> energy = short_time_energy(frames);
  const std::vector<double> zcr = zero_crossing_rate(frames);

  // Noise floor over frames fully inside the leading 100 ms.
  const std::size_t noise_limit =
      static_cast<std::size_t>(0.1 * sample_rate_hz);
  double noise_energy = 0.0, noise_zcr = 0.0;
  std::size_t noise_frames = 0;
  for (std::size_t t = 0; t < frames.n_frames(); ++t) {
    if (t * frames.hop + frames.frame_len > noise_limit) break;
    noise_energy += energy[t];
    noise_zcr += zcr[t];
    ++noise_frames;
  }
  if (noise_frames == 0) {  // very large frames; fall back to the first frame
    noise_energy = energy[0];
    noise_zcr = zcr[0];
    noise_frames = 1;
  }
  noise_energy = std::max(noise_energy / noise_frames, 1e-10);
  noise_zcr /= noise_frames;

  const double high = vad.energy_high_factor * noise_energy;
  const double low = vad.energy_low_factor * noise_energy;
  const double zcr_thr = vad.zcr_threshold_factor * noise_zcr;

  // Seed with high-threshold frames, extend while above the low threshold
  // or the ZCR threshold.
  const std::size_t n = frames.n_frames();
  std::vector<bool> voiced(n, false);
  auto extendable = [&](std::size_t t) {
    return energy[t] > low || zcr[t] > zcr_thr;
  };
  for (std::size_t t = 0; t < n; ++t) {
    if (energy[t] <= high || voiced[t]) continue;
    std::size_t lo = t;
    while (lo > 0 && extendable(lo - 1)) --lo;
    std::size_t hi = t;
    while (hi + 1 < n && extendable(hi + 1)) ++hi;
    for (std::size_t k = lo; k <= hi; ++k) voiced[k] = true;
  }

  std::vector<Interval> ivs =
      detail::flags_to_intervals(voiced, frames.hop, sample_rate_hz, duration_s);

  // Short voiced runs become silence.
  const double min_voiced_s = vad.min_voiced_ms / 1000.0;
  for (auto& iv : ivs) {
    if (iv.kind == IntervalKind::voiced && iv.duration_s() < min_voiced_s)
      iv.kind = IntervalKind::silent;
  }
  ivs = detail::merge_adjacent(std::move(ivs));

  // Short internal pauses merge into the surrounding voiced region.
  const double min_pause_s = vad.min_pause_ms / 1000.0;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (ivs[i].kind == IntervalKind::silent && i > 0 && i + 1 < ivs.size() &&
        ivs[i].duration_s() < min_pause_s) {
      ivs[i].kind = IntervalKind::voiced;
    }
  }
  ivs = detail::merge_adjacent(std::move(ivs));

  Segmentation seg;
  seg.total_duration_s = duration_s;
  seg.intervals = std::move(ivs);
  seg.all_silent = true;
  seg.reaction_time_s = duration_s;
  for (const auto& iv : seg.intervals) {
    if (iv.kind == IntervalKind::voiced) {
      seg.reaction_time_s = iv.start_s;
      seg.all_silent = false;
      break;
    }
  }
  return seg;
}

inline nlohmann::json segmentation_to_json(const Segmentation& seg) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : seg.intervals) {
    intervals.push_back({{"start_s", iv.start_s},
                         {"end_s", iv.end_s},
                         {"kind", iv.kind == IntervalKind::voiced ? "voiced" : "silent"}});
  }
  return {{"total_duration_s", seg.total_duration_s},
          {"reaction_time_s", seg.reaction_time_s},
          {"all_silent", seg.all_silent},
          {"intervals", intervals}};
}

}  // namespace vocatree
