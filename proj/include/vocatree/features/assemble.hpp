#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocatree/features/acoustic.hpp"
#include "vocatree/features/pause.hpp"
#include "vocatree/features/tremor.hpp"
#include "vocatree/wav.hpp"

namespace vocatree {

// ---------------------------------------------------------------------------
// Energy block: total log energy, spectral energy ratio below 500 Hz and
// the energy-weighted mean time.
// ---------------------------------------------------------------------------

struct EnergyFeatures {
  double total_log_energy = 0.0;
  double low_frequency_ratio = 0.0;
  double energy_temporal_centroid_s = 0.0;

  static constexpr std::size_t kCount = 3;

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "total_log_energy", "low_frequency_ratio", "energy_temporal_centroid_s"};
    return n;
  }
};

inline EnergyFeatures energy_features(const FrameDescriptors& d,
                                      double log_floor = 1e-10) {
  EnergyFeatures out;
  double total = 0.0, weighted_t = 0.0, spectral = 0.0, low = 0.0;
  for (std::size_t t = 0; t < d.energy.size(); ++t) {
    total += d.energy[t];
    weighted_t += d.energy[t] * d.frame_center_s[t];
    spectral += d.spectral_energy[t];
    low += d.low_band_energy[t];
  }
  out.total_log_energy = std::log(std::max(total, log_floor));
  out.low_frequency_ratio = spectral > 1e-14 ? low / spectral : 0.0;
  out.energy_temporal_centroid_s = total > 1e-14 ? weighted_t / total : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// The full feature vector: pause (16) + acoustic (86) + tremor (8) +
// energy (3) = 113 values in a frozen global order.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kFeatureDimension = 113;

struct FeatureVector {
  std::vector<double> values;  // kFeatureDimension, feature_names() order
  bool no_voiced_frames = false;
  bool tremor_insufficient = false;
  bool sanitized = false;  // a non-finite value was replaced by 0
};

inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& s : PauseFeatures::names()) n.push_back(s);
    for (const auto& s : AcousticFeatures::names()) n.push_back(s);
    for (const auto& s : TremorFeatures::names()) n.push_back(s);
    for (const auto& s : EnergyFeatures::names()) n.push_back(s);
    return n;
  }();
  return names;
}

/// Block name for a feature index, for the exported schema.
inline std::string feature_block(std::size_t index) {
  if (index < PauseFeatures::kCount) return "pause";
  index -= PauseFeatures::kCount;
  if (index < AcousticFeatures::kCount) return "acoustic";
  index -= AcousticFeatures::kCount;
  if (index < TremorFeatures::kCount) return "tremor";
  return "energy";
}

inline std::string feature_unit(const std::string& name) {
  auto ends_with = [&](const char* suffix) {
    const std::string s(suffix);
    return name.size() >= s.size() &&
           name.compare(name.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with("_s")) return "seconds";
  if (ends_with("_hz") || name.rfind("f0_", 0) == 0 ||
      name.rfind("spectral_centroid", 0) == 0)
    return "hertz";
  if (name == "number_of_pauses" || name == "number_of_transitions")
    return "count";
  if (name == "total_sequence_length_frames") return "frames";
  if (name == "percent_pause_time" || name == "low_frequency_ratio" ||
      ends_with("_ratio") || ends_with("_index") || name.rfind("zcr", 0) == 0 ||
      name == "jitter")
    return "ratio";
  if (name.rfind("log_energy", 0) == 0 || name == "total_log_energy")
    return "log_energy";
  return "dimensionless";
}

struct PipelineConfig {
  PreEmphasisConfig pre_emphasis;
  FrameSpec frame;
  VadConfig vad;
  AcousticConfig acoustic;
  TremorBand tremor_band;
};

/// Runs the full front-end chain on one clip: pre-emphasis, framing and
/// windowing, endpoint detection, then all four feature blocks.
inline FeatureVector assemble_feature_vector(const AudioClip& clip,
                                             const PipelineConfig& cfg = {}) {
  if (clip.samples.empty()) throw EmptyInputError("assemble_feature_vector: empty clip");
  if (clip.duration_s() < 0.2)
    throw TooShortError("assemble_feature_vector: clip shorter than 200 ms");

  const auto emphasized = pre_emphasize(clip.samples, cfg.pre_emphasis);
  const FrameSequence frames =
      frame_and_window(emphasized, clip.sample_rate_hz, cfg.frame);
  if (frames.n_frames() == 0)
    throw TooShortError("assemble_feature_vector: clip shorter than one frame");
  const Segmentation seg =
      detect_endpoints(emphasized, clip.sample_rate_hz, cfg.frame, cfg.vad);
  const FrameDescriptors desc =
      compute_frame_descriptors(frames, seg, cfg.acoustic);

  const PauseFeatures pause = pause_features(seg, frame_meta(frames));
  const AcousticFeatures acoustic = acoustic_features(desc);
  const EnergyFeatures energy = energy_features(desc, cfg.acoustic.log_floor);

  // Contours at the frame rate: RMS amplitude envelope over all frames and
  // the F0 track with unvoiced gaps linearly interpolated.
  const std::size_t n = frames.n_frames();
  std::vector<double> envelope(n);
  for (std::size_t t = 0; t < n; ++t)
    envelope[t] = std::sqrt(desc.energy[t] / static_cast<double>(frames.frame_len));
  std::vector<double> f0_contour(n, 0.0);
  {
    std::vector<std::size_t> known;
    for (std::size_t t = 0; t < n; ++t)
      if (desc.voiced[t] && desc.f0_hz[t] > 0.0) known.push_back(t);
    if (!known.empty()) {
      for (std::size_t t = 0; t < n; ++t) {
        if (t <= known.front()) {
          f0_contour[t] = desc.f0_hz[known.front()];
        } else if (t >= known.back()) {
          f0_contour[t] = desc.f0_hz[known.back()];
        } else {
          auto hi = std::lower_bound(known.begin(), known.end(), t);
          if (*hi == t) {
            f0_contour[t] = desc.f0_hz[t];
          } else {
            const std::size_t a = *(hi - 1), b = *hi;
            const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
            f0_contour[t] = (1.0 - w) * desc.f0_hz[a] + w * desc.f0_hz[b];
          }
        }
      }
    }
  }

  FeatureVector out;
  out.no_voiced_frames = acoustic.no_voiced_frames;
  TremorFeatures tremor;
  try {
    tremor = tremor_features(f0_contour, envelope, desc.frame_rate_hz,
                             cfg.tremor_band);
  } catch (const InsufficientDataError&) {
    out.tremor_insufficient = true;  // block stays zero
  }

  out.values.reserve(kFeatureDimension);
  for (const double v : pause.as_array()) out.values.push_back(v);
  for (const double v : acoustic.values) out.values.push_back(v);
  for (const double v : tremor.as_vector()) out.values.push_back(v);
  out.values.push_back(energy.total_log_energy);
  out.values.push_back(energy.low_frequency_ratio);
  out.values.push_back(energy.energy_temporal_centroid_s);

  for (double& v : out.values) {
    if (!std::isfinite(v)) {
      v = 0.0;
      out.sanitized = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature matrix export: CSV with a header of feature names, one row per
// (subject_id, segment_id), plus a companion JSON schema.
// ---------------------------------------------------------------------------

struct FeatureRow {
  std::string subject_id;
  int segment_id = 0;
  FeatureVector features;
};

inline void write_feature_csv(const std::string& path,
                              const std::vector<FeatureRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("write_feature_csv: cannot open " + path);
  out << "subject_id,segment_id";
  for (const auto& name : feature_names()) out << ',' << name;
  out << "\n";
  out.precision(17);
  for (const auto& row : rows) {
    out << row.subject_id << ',' << row.segment_id;
    for (const double v : row.features.values) out << ',' << v;
    out << "\n";
  }
  if (!out) throw IoError("write_feature_csv: write failed for " + path);
}

inline nlohmann::json feature_schema_json() {
  nlohmann::json features = nlohmann::json::array();
  const auto& names = feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    features.push_back({{"index", i},
                        {"name", names[i]},
                        {"block", feature_block(i)},
                        {"unit", feature_unit(names[i])}});
  }
  return {{"dimension", kFeatureDimension},
          {"blocks",
           {{"pause", PauseFeatures::kCount},
            {"acoustic", AcousticFeatures::kCount},
            {"tremor", TremorFeatures::kCount},
            {"energy", EnergyFeatures::kCount}}},
          {"features", features}};
}

inline void write_feature_schema(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_feature_schema: cannot open " + path);
  out << feature_schema_json().dump(2) << "\n";
}

}  // namespace vocatree
