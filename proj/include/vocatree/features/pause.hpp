#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "vocatree/vad.hpp"

namespace vocatree {

// ---------------------------------------------------------------------------
// The 16 pause features. Pauses are internal silences only: leading
// silence is reaction time and trailing silence is neither. Guarded
// ratios clamp the denominator to one hop duration.
// ---------------------------------------------------------------------------

struct FrameMeta {
  std::size_t n_frames = 0;
  double hop_s = 0.0;
};

inline FrameMeta frame_meta(const FrameSequence& frames) {
  return {frames.n_frames(),
          static_cast<double>(frames.hop) / frames.sample_rate_hz};
}

struct PauseFeatures {
  double max_pause_duration_s = 0.0;
  double reaction_time_s = 0.0;
  double total_recording_time_s = 0.0;
  double total_vocalization_time_s = 0.0;
  double total_pause_time_s = 0.0;
  double number_of_pauses = 0.0;
  double mean_pause_length_s = 0.0;
  double percent_pause_time = 0.0;
  double speech_pause_ratio = 0.0;
  double total_sequence_length_frames = 0.0;
  double max_continuous_voiced_s = 0.0;
  double max_continuous_silent_s = 0.0;
  double number_of_transitions = 0.0;
  double mean_voiced_segment_s = 0.0;
  double mean_silent_segment_s = 0.0;
  double voiced_silent_frame_ratio = 0.0;

  static constexpr std::size_t kCount = 16;

  std::array<double, kCount> as_array() const {
    return {max_pause_duration_s, reaction_time_s, total_recording_time_s,
            total_vocalization_time_s, total_pause_time_s, number_of_pauses,
            mean_pause_length_s, percent_pause_time, speech_pause_ratio,
            total_sequence_length_frames, max_continuous_voiced_s,
            max_continuous_silent_s, number_of_transitions,
            mean_voiced_segment_s, mean_silent_segment_s,
            voiced_silent_frame_ratio};
  }

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "max_pause_duration_s", "reaction_time_s", "total_recording_time_s",
        "total_vocalization_time_s", "total_pause_time_s", "number_of_pauses",
        "mean_pause_length_s", "percent_pause_time", "speech_pause_ratio",
        "total_sequence_length_frames", "max_continuous_voiced_s",
        "max_continuous_silent_s", "number_of_transitions",
        "mean_voiced_segment_s", "mean_silent_segment_s",
        "voiced_silent_frame_ratio"};
    return n;
  }
};

inline PauseFeatures pause_features(const Segmentation& seg,
                                    const FrameMeta& meta) {
  if (seg.total_duration_s <= 0.0)
    throw ValidationError("pause_features: zero-duration segmentation");

  PauseFeatures f;
  f.total_recording_time_s = seg.total_duration_s;
  f.reaction_time_s = seg.reaction_time_s;
  f.total_sequence_length_frames = static_cast<double>(meta.n_frames);

  double total_voiced = 0.0, total_silent_all = 0.0;
  double max_voiced = 0.0, max_silent_all = 0.0;
  std::size_t n_voiced = 0, n_silent_all = 0;
  double total_pause = 0.0, max_pause = 0.0;
  std::size_t n_pauses = 0;

  const auto& ivs = seg.intervals;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    const double dur = ivs[i].duration_s();
    if (ivs[i].kind == IntervalKind::voiced) {
      total_voiced += dur;
      max_voiced = std::max(max_voiced, dur);
      ++n_voiced;
    } else {
      total_silent_all += dur;
      max_silent_all = std::max(max_silent_all, dur);
      ++n_silent_all;
      // internal silence: voiced on both sides (kinds alternate)
      if (i > 0 && i + 1 < ivs.size()) {
        total_pause += dur;
        max_pause = std::max(max_pause, dur);
        ++n_pauses;
      }
    }
  }

  const double hop_guard = std::max(meta.hop_s, 1e-9);
  f.total_vocalization_time_s = total_voiced;
  f.total_pause_time_s = total_pause;
  f.number_of_pauses = static_cast<double>(n_pauses);
  f.max_pause_duration_s = max_pause;
  f.mean_pause_length_s = n_pauses ? total_pause / n_pauses : 0.0;
  f.percent_pause_time = total_pause / seg.total_duration_s;
  f.speech_pause_ratio = total_voiced / std::max(total_pause, hop_guard);
  f.max_continuous_voiced_s = max_voiced;
  f.max_continuous_silent_s = max_silent_all;
  f.number_of_transitions =
      ivs.empty() ? 0.0 : static_cast<double>(ivs.size() - 1);
  f.mean_voiced_segment_s = n_voiced ? total_voiced / n_voiced : 0.0;
  f.mean_silent_segment_s = n_silent_all ? total_silent_all / n_silent_all : 0.0;
  f.voiced_silent_frame_ratio =
      total_voiced > 0.0 ? total_voiced / std::max(total_silent_all, hop_guard)
                         : 0.0;
  return f;
}

}  // namespace vocatree
