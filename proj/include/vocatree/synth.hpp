#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocatree/corpus.hpp"
#include "vocatree/dsp.hpp"

namespace vocatree {

// ---------------------------------------------------------------------------
// Seeded synthetic corpus. Clips are alternating voiced bursts (harmonic
// tone at the subject's F0, amplitude-modulated at a tremor rate) and
// silences of low-level noise. Depressed-class parameters are shifted by
// the configured effects, scaled per segment by the discriminability
// profile; a profile entry of 0 makes both classes draw from the same
// distribution on that segment.
// ---------------------------------------------------------------------------

struct SynthSpec {
  int n_healthy = 29;
  int n_depressed = 23;
  int n_male_healthy = 20;
  int n_male_depressed = 16;
  int n_female_healthy = 9;
  int n_female_depressed = 7;
  int sample_rate_hz = 16000;

  // Depressed-class effect sizes (applied per segment, scaled by the
  // discriminability profile).
  double pause_shift_s = 0.4;        // mean pause and reaction-time shift
  double speech_rate_shift_s = -0.1; // mean voiced-burst duration shift
  double f0_shift_hz = -20.0;        // fundamental frequency shift
  double tremor_depth_shift = 0.2;   // amplitude-modulation depth shift

  std::array<double, kNumSegments> segment_discriminability =
      default_discriminability();
  std::uint64_t rng_seed = 7;

  /// Segments whose id is a multiple of 4 carry no class effect; the rest
  /// are fully informative.
  static std::array<double, kNumSegments> default_discriminability() {
    std::array<double, kNumSegments> p{};
    for (int s = 1; s <= kNumSegments; ++s) p[s - 1] = (s % 4 == 0) ? 0.0 : 1.0;
    return p;
  }

  void validate() const {
    if (n_healthy < 0 || n_depressed < 0)
      throw ValidationError("SynthSpec: negative group size");
    if (n_male_healthy + n_female_healthy != n_healthy)
      throw ValidationError("SynthSpec: healthy gender counts do not sum to n_healthy");
    if (n_male_depressed + n_female_depressed != n_depressed)
      throw ValidationError("SynthSpec: depressed gender counts do not sum to n_depressed");
    if (n_male_healthy < 0 || n_male_depressed < 0 || n_female_healthy < 0 ||
        n_female_depressed < 0)
      throw ValidationError("SynthSpec: negative gender count");
    if (sample_rate_hz <= 0)
      throw ValidationError("SynthSpec: sample_rate_hz must be positive");
  }
};

inline void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = nlohmann::json{{"n_healthy", s.n_healthy},
                     {"n_depressed", s.n_depressed},
                     {"n_male_healthy", s.n_male_healthy},
                     {"n_male_depressed", s.n_male_depressed},
                     {"n_female_healthy", s.n_female_healthy},
                     {"n_female_depressed", s.n_female_depressed},
                     {"sample_rate_hz", s.sample_rate_hz},
                     {"pause_shift_s", s.pause_shift_s},
                     {"speech_rate_shift_s", s.speech_rate_shift_s},
                     {"f0_shift_hz", s.f0_shift_hz},
                     {"tremor_depth_shift", s.tremor_depth_shift},
                     {"segment_discriminability", s.segment_discriminability},
                     {"rng_seed", s.rng_seed}};
}

inline void from_json(const nlohmann::json& j, SynthSpec& s) {
  SynthSpec d;  // defaults for absent keys
  s.n_healthy = j.value("n_healthy", d.n_healthy);
  s.n_depressed = j.value("n_depressed", d.n_depressed);
  s.n_male_healthy = j.value("n_male_healthy", d.n_male_healthy);
  s.n_male_depressed = j.value("n_male_depressed", d.n_male_depressed);
  s.n_female_healthy = j.value("n_female_healthy", d.n_female_healthy);
  s.n_female_depressed = j.value("n_female_depressed", d.n_female_depressed);
  s.sample_rate_hz = j.value("sample_rate_hz", d.sample_rate_hz);
  s.pause_shift_s = j.value("pause_shift_s", d.pause_shift_s);
  s.speech_rate_shift_s = j.value("speech_rate_shift_s", d.speech_rate_shift_s);
  s.f0_shift_hz = j.value("f0_shift_hz", d.f0_shift_hz);
  s.tremor_depth_shift = j.value("tremor_depth_shift", d.tremor_depth_shift);
  if (j.contains("segment_discriminability")) {
    const auto& arr = j.at("segment_discriminability");
    if (!arr.is_array() || arr.size() != kNumSegments)
      throw ValidationError("SynthSpec: segment_discriminability must have 29 entries");
    for (int i = 0; i < kNumSegments; ++i)
      s.segment_discriminability[i] = arr[i].get<double>();
  } else {
    s.segment_discriminability = d.segment_discriminability;
  }
  s.rng_seed = j.value("rng_seed", d.rng_seed);
}

namespace detail {

struct SubjectTraits {
  double f0_base = 0.0;
  double amp = 0.0;
  double pause_tendency = 0.0;
  double burst_tendency = 0.0;
  double tremor_rate_hz = 0.0;
  double tremor_depth_base = 0.0;
};

inline SubjectTraits draw_subject_traits(const SynthSpec& spec,
                                         std::size_t subject_index,
                                         Gender gender) {
  Rng rng(mix_seed(spec.rng_seed, subject_index));
  SubjectTraits t;
  t.f0_base = (gender == Gender::male ? 120.0 : 205.0) + rng.normal(0.0, 8.0);
  t.amp = 0.28 + rng.uniform(0.0, 0.1);
  t.pause_tendency = rng.normal(0.0, 0.03);
  t.burst_tendency = rng.normal(0.0, 0.05);
  t.tremor_rate_hz = rng.uniform(13.5, 16.5);
  t.tremor_depth_base = 0.08 + rng.uniform(0.0, 0.04);
  return t;
}

inline double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

}  // namespace detail

/// Deterministic clip synthesis for one (subject, segment) pair. The
/// subject index is the subject's position in the generated cohort order.
inline AudioClip synthesize_clip(const SynthSpec& spec, std::size_t subject_index,
                                 Gender gender, Label label, int segment_id) {
  const detail::SubjectTraits traits =
      detail::draw_subject_traits(spec, subject_index, gender);
  Rng rng(mix_seed(spec.rng_seed, subject_index, static_cast<std::uint64_t>(segment_id)));

  const double d = (label == Label::depressed) ? 1.0 : 0.0;
  const double g = spec.segment_discriminability[segment_id - 1];
  const double pause_mu =
      detail::clamp(0.30 + traits.pause_tendency + g * d * spec.pause_shift_s, 0.12, 3.0);
  const double burst_mu =
      detail::clamp(0.50 + traits.burst_tendency + g * d * spec.speech_rate_shift_s, 0.15, 2.0);
  const double f0 = detail::clamp(traits.f0_base + g * d * spec.f0_shift_hz, 70.0, 350.0);
  const double depth =
      detail::clamp(traits.tremor_depth_base + g * d * spec.tremor_depth_shift, 0.0, 0.8);

  const int fs = spec.sample_rate_hz;
  const double reaction = detail::clamp(
      0.18 + (pause_mu - 0.30) + 0.05 * std::abs(rng.normal()), 0.15, 2.5);

  // Burst/pause schedule for the speech region.
  struct Piece { double dur; bool voiced; };
  std::vector<Piece> pieces;
  const double target = rng.uniform(2.6, 3.4);
  double acc = 0.0;
  while (acc < target) {
    const double b = detail::clamp(burst_mu * (0.7 + 0.6 * rng.uniform01()), 0.12, 1.4);
    pieces.push_back({b, true});
    acc += b;
    if (acc >= target) break;
    const double p = detail::clamp(pause_mu * (0.7 + 0.6 * rng.uniform01()), 0.25, 2.8);
    pieces.push_back({p, false});
    acc += p;
  }
  const double trailing = 0.25;

  double total_s = reaction + trailing;
  for (const auto& piece : pieces) total_s += piece.dur;

  AudioClip clip;
  clip.sample_rate_hz = fs;
  clip.bit_depth_source = 16;
  clip.samples.assign(static_cast<std::size_t>(total_s * fs), 0.0);
  const std::size_t n_total = clip.samples.size();

  // Harmonic stack normalization keeps peaks near traits.amp.
  const int n_harmonics = 4;
  double harm_norm = 0.0;
  for (int h = 1; h <= n_harmonics; ++h) harm_norm += 1.0 / h;

  const double tremor_phase_amp = rng.uniform(0.0, 2.0 * kPi);
  const double tremor_phase_f0 = rng.uniform(0.0, 2.0 * kPi);

  std::size_t cursor = static_cast<std::size_t>(reaction * fs);
  for (const auto& piece : pieces) {
    const std::size_t len = static_cast<std::size_t>(piece.dur * fs);
    if (piece.voiced) {
      std::array<double, n_harmonics> phases{};
      for (auto& p : phases) p = rng.uniform(0.0, 2.0 * kPi);
      const double ramp_s = 0.015;
      const std::size_t ramp = std::max<std::size_t>(1, static_cast<std::size_t>(ramp_s * fs));
      double phase0 = phases[0];
      for (std::size_t i = 0; i < len && cursor + i < n_total; ++i) {
        const double t_global = static_cast<double>(cursor + i) / fs;
        // F0 vibrato at the tremor rate feeds the F0-contour tremor features.
        const double f_inst =
            f0 * (1.0 + 0.06 * depth *
                            std::sin(2.0 * kPi * traits.tremor_rate_hz * t_global +
                                     tremor_phase_f0));
        phase0 += 2.0 * kPi * f_inst / fs;
        double sample = 0.0;
        for (int h = 1; h <= n_harmonics; ++h) {
          sample += (1.0 / h) * std::sin(h * phase0 + phases[h - 1]);
        }
        sample *= traits.amp / harm_norm;
        const double am =
            1.0 + depth * std::sin(2.0 * kPi * traits.tremor_rate_hz * t_global +
                                   tremor_phase_amp);
        double env = 1.0;
        if (i < ramp) env = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / ramp);
        else if (len - 1 - i < ramp)
          env = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(len - 1 - i) / ramp);
        clip.samples[cursor + i] = sample * am * env;
      }
    }
    cursor += len;
  }

  // Low-level noise everywhere.
  for (auto& s : clip.samples) s += rng.normal(0.0, 0.0035);
  for (auto& s : clip.samples) s = detail::clamp(s, -0.999, 0.999);
  return clip;
}

/// Cohort structure: healthy males, healthy females, depressed males,
/// depressed females, ids H001.. / D001.. in order.
inline Corpus synthetic_corpus_structure(const SynthSpec& spec) {
  spec.validate();
  Corpus corpus;
  auto add_group = [&](int count, Gender gender, Label label, const char* prefix,
                       int& serial) {
    for (int i = 0; i < count; ++i) {
      SubjectRecord rec;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%s%03d", prefix, ++serial);
      rec.subject_id = buf;
      rec.gender = gender;
      rec.label = label;
      for (int seg = 1; seg <= kNumSegments; ++seg)
        rec.segments[seg] = "synth://" + rec.subject_id + "/" + std::to_string(seg);
      corpus.subjects.push_back(std::move(rec));
    }
  };
  int h_serial = 0, d_serial = 0;
  add_group(spec.n_male_healthy, Gender::male, Label::healthy, "H", h_serial);
  add_group(spec.n_female_healthy, Gender::female, Label::healthy, "H", h_serial);
  add_group(spec.n_male_depressed, Gender::male, Label::depressed, "D", d_serial);
  add_group(spec.n_female_depressed, Gender::female, Label::depressed, "D", d_serial);
  return corpus;
}

class SynthClipSource final : public ClipSource {
 public:
  explicit SynthClipSource(SynthSpec spec)
      : spec_(std::move(spec)), structure_(synthetic_corpus_structure(spec_)) {
    for (std::size_t i = 0; i < structure_.subjects.size(); ++i)
      index_[structure_.subjects[i].subject_id] = i;
  }

  const Corpus& corpus() const { return structure_; }
  const SynthSpec& spec() const { return spec_; }

  std::optional<AudioClip> load(const SubjectRecord& subject,
                                int segment_id) const override {
    const auto it = index_.find(subject.subject_id);
    if (it == index_.end())
      throw ValidationError("SynthClipSource: unknown subject " + subject.subject_id);
    if (!subject.segments.count(segment_id)) return std::nullopt;
    return synthesize_clip(spec_, it->second, subject.gender, subject.label,
                           segment_id);
  }

 private:
  SynthSpec spec_;
  Corpus structure_;
  std::map<std::string, std::size_t> index_;
};

/// Materializes a synthetic corpus as 16-bit WAVs plus a manifest CSV.
inline Corpus write_synthetic_corpus(const SynthSpec& spec,
                                     const std::filesystem::path& dir) {
  SynthClipSource source(spec);
  std::filesystem::create_directories(dir / "wav");
  Corpus written = source.corpus();
  for (std::size_t i = 0; i < written.subjects.size(); ++i) {
    auto& subject = written.subjects[i];
    for (auto& [segment_id, ref] : subject.segments) {
      const std::string rel =
          "wav/" + subject.subject_id + "_" + std::to_string(segment_id) + ".wav";
      const auto clip = source.load(subject, segment_id);
      write_wav_16((dir / rel).string(), *clip);
      ref = rel;
    }
  }
  write_manifest((dir / "manifest.csv").string(), written);
  return written;
}

}  // namespace vocatree
