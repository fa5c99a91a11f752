// Feature extraction tests: the 16 pause statistics against a hand-worked
// segmentation, the tiling identity on random segmentations, acoustic
// descriptors on known tones, tremor band analysis on synthetic contours,
// the energy block, and the assembled 113-dimensional vector.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "vocatree/features/assemble.hpp"
#include "vocatree/synth.hpp"

using namespace vocatree;

namespace {

Interval make_interval(double start, double end, IntervalKind kind) {
  Interval iv;
  iv.start_s = start;
  iv.end_s = end;
  iv.kind = kind;
  return iv;
}

/// silent(0.5) voiced(1.0) silent(0.3) voiced(1.0) silent(0.2), 3.0 s total.
Segmentation hand_segmentation() {
  Segmentation seg;
  seg.intervals = {
      make_interval(0.0, 0.5, IntervalKind::silent),
      make_interval(0.5, 1.5, IntervalKind::voiced),
      make_interval(1.5, 1.8, IntervalKind::silent),
      make_interval(1.8, 2.8, IntervalKind::voiced),
      make_interval(2.8, 3.0, IntervalKind::silent),
  };
  seg.total_duration_s = 3.0;
  seg.reaction_time_s = 0.5;
  seg.all_silent = false;
  return seg;
}

}  // namespace

TEST_CASE("pause features reproduce the hand-worked five-interval example") {
  const Segmentation seg = hand_segmentation();
  const FrameMeta meta{298, 0.01};
  const PauseFeatures f = pause_features(seg, meta);

  // Durations recomputed with the same subtraction the library uses, so the
  // equalities below are exact, not approximate.
  const double lead = seg.intervals[0].duration_s();
  const double v1 = seg.intervals[1].duration_s();
  const double gap = seg.intervals[2].duration_s();
  const double v2 = seg.intervals[3].duration_s();
  const double tail = seg.intervals[4].duration_s();

  REQUIRE(f.max_pause_duration_s == gap);
  REQUIRE(f.reaction_time_s == 0.5);
  REQUIRE(f.total_recording_time_s == 3.0);
  REQUIRE(f.total_vocalization_time_s == v1 + v2);
  REQUIRE(f.total_pause_time_s == gap);
  REQUIRE(f.number_of_pauses == 1.0);
  REQUIRE(f.mean_pause_length_s == gap);
  REQUIRE(f.percent_pause_time == gap / 3.0);
  REQUIRE(f.speech_pause_ratio == (v1 + v2) / gap);
  REQUIRE(f.total_sequence_length_frames == 298.0);
  REQUIRE(f.max_continuous_voiced_s == std::max(v1, v2));
  REQUIRE(f.max_continuous_silent_s == lead);
  REQUIRE(f.number_of_transitions == 4.0);
  REQUIRE(f.mean_voiced_segment_s == (v1 + v2) / 2.0);
  REQUIRE(f.mean_silent_segment_s == (lead + gap + tail) / 3.0);
  REQUIRE(f.voiced_silent_frame_ratio == (v1 + v2) / (lead + gap + tail));

  // The same values against plain decimal literals, within rounding error.
  REQUIRE_THAT(f.max_pause_duration_s, Catch::Matchers::WithinAbs(0.3, 1e-12));
  REQUIRE_THAT(f.total_vocalization_time_s, Catch::Matchers::WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(f.mean_pause_length_s, Catch::Matchers::WithinAbs(0.3, 1e-12));
  REQUIRE_THAT(f.percent_pause_time, Catch::Matchers::WithinAbs(0.1, 1e-12));
  REQUIRE_THAT(f.speech_pause_ratio, Catch::Matchers::WithinAbs(2.0 / 0.3, 1e-12));
  REQUIRE_THAT(f.mean_silent_segment_s, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
  REQUIRE_THAT(f.voiced_silent_frame_ratio, Catch::Matchers::WithinAbs(2.0, 1e-12));

  const auto arr = f.as_array();
  REQUIRE(arr.size() == PauseFeatures::kCount);
  REQUIRE(arr[0] == f.max_pause_duration_s);
  REQUIRE(arr[15] == f.voiced_silent_frame_ratio);
}

TEST_CASE("pause timing identity holds on random segmentations") {
  Rng rng(404);
  const double sample_period = 1.0 / 16000.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n_intervals = 1 + static_cast<int>(rng.below(9));
    const bool starts_voiced = rng.below(2) == 0;
    Segmentation seg;
    double t = 0.0;
    for (int i = 0; i < n_intervals; ++i) {
      const double dur = 0.05 + 2.0 * rng.uniform01();
      const bool voiced = starts_voiced ? (i % 2 == 0) : (i % 2 == 1);
      seg.intervals.push_back(make_interval(
          t, t + dur, voiced ? IntervalKind::voiced : IntervalKind::silent));
      t += dur;
    }
    seg.intervals.back().end_s = t;
    seg.total_duration_s = t;
    seg.all_silent = true;
    seg.reaction_time_s = t;
    for (const auto& iv : seg.intervals) {
      if (iv.kind == IntervalKind::voiced) {
        seg.reaction_time_s = iv.start_s;
        seg.all_silent = false;
        break;
      }
    }

    const PauseFeatures f = pause_features(seg, FrameMeta{100, 0.01});

    double trailing = 0.0;
    if (seg.intervals.back().kind == IntervalKind::silent &&
        seg.intervals.size() > 1)
      trailing = seg.intervals.back().duration_s();
    double leading = 0.0;
    if (seg.intervals.front().kind == IntervalKind::silent)
      leading = seg.intervals.front().duration_s();
    if (seg.intervals.size() == 1 &&
        seg.intervals.front().kind == IntervalKind::silent) {
      leading = seg.intervals.front().duration_s();
      trailing = 0.0;
    }

    const double reassembled = f.total_vocalization_time_s +
                               f.total_pause_time_s + leading + trailing;
    REQUIRE_THAT(reassembled,
                 Catch::Matchers::WithinAbs(f.total_recording_time_s,
                                            sample_period));
    if (!seg.all_silent) REQUIRE(f.reaction_time_s == leading);
  }
}

TEST_CASE("pause features on degenerate segmentations") {
  SECTION("single fully voiced interval") {
    Segmentation seg;
    seg.intervals = {make_interval(0.0, 2.0, IntervalKind::voiced)};
    seg.total_duration_s = 2.0;
    seg.reaction_time_s = 0.0;
    const PauseFeatures f = pause_features(seg, FrameMeta{198, 0.01});
    REQUIRE(f.number_of_pauses == 0.0);
    REQUIRE(f.total_pause_time_s == 0.0);
    REQUIRE(f.mean_pause_length_s == 0.0);
    REQUIRE(f.total_vocalization_time_s == 2.0);
    REQUIRE(f.number_of_transitions == 0.0);
    REQUIRE(f.max_continuous_silent_s == 0.0);
    // Guarded ratio: denominator clamps to one hop.
    REQUIRE(f.speech_pause_ratio == 2.0 / 0.01);
    REQUIRE(f.voiced_silent_frame_ratio == 2.0 / 0.01);
  }
  SECTION("single fully silent interval") {
    Segmentation seg;
    seg.intervals = {make_interval(0.0, 1.0, IntervalKind::silent)};
    seg.total_duration_s = 1.0;
    seg.reaction_time_s = 1.0;
    seg.all_silent = true;
    const PauseFeatures f = pause_features(seg, FrameMeta{98, 0.01});
    REQUIRE(f.total_vocalization_time_s == 0.0);
    REQUIRE(f.number_of_pauses == 0.0);
    REQUIRE(f.reaction_time_s == 1.0);
    REQUIRE(f.max_continuous_voiced_s == 0.0);
    REQUIRE(f.mean_silent_segment_s == 1.0);
    REQUIRE(f.voiced_silent_frame_ratio == 0.0);
  }
  SECTION("zero-duration segmentation is rejected") {
    Segmentation seg;
    seg.total_duration_s = 0.0;
    REQUIRE_THROWS_AS(pause_features(seg, FrameMeta{0, 0.01}), ValidationError);
  }
}

namespace {

/// Frames a raw tone and marks the whole clip voiced, bypassing endpoint
/// detection so the acoustic block is tested in isolation.
struct TonePrep {
  FrameSequence frames;
  Segmentation seg;
};

TonePrep prep_signal(const std::vector<double>& signal, int fs) {
  TonePrep p;
  p.frames = frame_and_window(signal, fs, FrameSpec{});
  p.seg.total_duration_s = static_cast<double>(signal.size()) / fs;
  p.seg.reaction_time_s = 0.0;
  p.seg.intervals = {
      make_interval(0.0, p.seg.total_duration_s, IntervalKind::voiced)};
  return p;
}

}  // namespace

TEST_CASE("fundamental frequency of a pure tone is recovered") {
  const int fs = 16000;
  std::vector<double> tone;
  testsupport::append_tone(tone, 1.0, 220.0, 0.5, fs);
  const TonePrep p = prep_signal(tone, fs);
  const FrameDescriptors d = compute_frame_descriptors(p.frames, p.seg);
  const AcousticFeatures a = acoustic_features(d);
  REQUIRE_FALSE(a.no_voiced_frames);

  const auto& names = AcousticFeatures::names();
  const auto idx = [&](const std::string& n) {
    return static_cast<std::size_t>(
        std::find(names.begin(), names.end(), n) - names.begin());
  };
  const double f0_mean = a.values[idx("f0_mean")];
  const double f0_min = a.values[idx("f0_min")];
  const double f0_max = a.values[idx("f0_max")];
  const double jitter = a.values[idx("jitter")];
  REQUIRE_THAT(f0_mean, Catch::Matchers::WithinAbs(220.0, 5.0));
  REQUIRE(f0_min >= 200.0);
  REQUIRE(f0_max <= 240.0);
  REQUIRE(jitter < 0.01);
}

TEST_CASE("amplitude doubling shifts log energy and leaves rate features") {
  const int fs = 16000;
  Rng rng(99);
  std::vector<double> base;
  testsupport::append_tone(base, 1.0, 180.0, 0.25, fs);
  testsupport::add_noise(base, 0.001, rng);
  std::vector<double> doubled = base;
  for (double& s : doubled) s *= 2.0;

  const TonePrep p1 = prep_signal(base, fs);
  const TonePrep p2 = prep_signal(doubled, fs);
  const FrameDescriptors d1 = compute_frame_descriptors(p1.frames, p1.seg);
  const FrameDescriptors d2 = compute_frame_descriptors(p2.frames, p2.seg);

  REQUIRE(d1.zcr == d2.zcr);  // sign pattern is scale invariant

  const AcousticFeatures a1 = acoustic_features(d1);
  const AcousticFeatures a2 = acoustic_features(d2);
  const auto& names = AcousticFeatures::names();
  const auto idx = [&](const std::string& n) {
    return static_cast<std::size_t>(
        std::find(names.begin(), names.end(), n) - names.begin());
  };
  const double shift =
      a2.values[idx("log_energy_mean")] - a1.values[idx("log_energy_mean")];
  REQUIRE_THAT(shift, Catch::Matchers::WithinAbs(2.0 * std::log(2.0), 1e-6));
  REQUIRE(a1.values[idx("zcr_mean")] == a2.values[idx("zcr_mean")]);
  REQUIRE(a1.values[idx("f0_mean")] == a2.values[idx("f0_mean")]);
}

TEST_CASE("acoustic functionals and jitter helpers") {
  SECTION("functionals of a known vector") {
    const Functionals f = functionals_of({1.0, 2.0, 3.0, 4.0});
    REQUIRE(f.mean == 2.5);
    REQUIRE(f.min == 1.0);
    REQUIRE(f.max == 4.0);
    REQUIRE(f.median == 2.5);
    REQUIRE_THAT(f.stddev,
                 Catch::Matchers::WithinAbs(std::sqrt(1.25), 1e-12));
  }
  SECTION("odd-length median picks the middle element") {
    REQUIRE(functionals_of({5.0, 1.0, 3.0}).median == 3.0);
  }
  SECTION("empty input yields zeros") {
    const Functionals f = functionals_of({});
    REQUIRE(f.mean == 0.0);
    REQUIRE(f.max == 0.0);
  }
  SECTION("jitter of a constant track is zero") {
    REQUIRE(jitter_of({200.0, 200.0, 200.0, 200.0}) == 0.0);
  }
  SECTION("jitter of an alternating track matches the definition") {
    // Periods 1/100 and 1/110 alternating: relative steps 1/11 and 1/10.
    const double expected = (1.0 / 11.0 + 1.0 / 10.0 + 1.0 / 11.0) / 3.0;
    REQUIRE_THAT(jitter_of({100.0, 110.0, 100.0, 110.0}),
                 Catch::Matchers::WithinAbs(expected, 1e-12));
  }
  SECTION("fewer than two voiced frames gives zero jitter") {
    REQUIRE(jitter_of({}) == 0.0);
    REQUIRE(jitter_of({150.0}) == 0.0);
  }
}

TEST_CASE("all-silent segmentation flags missing voicing") {
  const int fs = 16000;
  std::vector<double> signal;
  testsupport::append_tone(signal, 0.5, 150.0, 0.4, fs);
  TonePrep p = prep_signal(signal, fs);
  p.seg.intervals[0].kind = IntervalKind::silent;
  p.seg.all_silent = true;
  p.seg.reaction_time_s = p.seg.total_duration_s;
  const FrameDescriptors d = compute_frame_descriptors(p.frames, p.seg);
  const AcousticFeatures a = acoustic_features(d);
  REQUIRE(a.no_voiced_frames);
  const auto& names = AcousticFeatures::names();
  const auto idx = [&](const std::string& n) {
    return static_cast<std::size_t>(
        std::find(names.begin(), names.end(), n) - names.begin());
  };
  REQUIRE(a.values[idx("f0_mean")] == 0.0);
  REQUIRE(a.values[idx("f0_max")] == 0.0);
  REQUIRE(a.values[idx("jitter")] == 0.0);
}

TEST_CASE("tremor band analysis of synthetic contours") {
  const double rate = 100.0;
  const std::size_t n = 200;  // 2 s of frames

  std::vector<double> flat(n, 1.0);
  std::vector<double> am15(n), am5(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    am15[i] = 1.0 + 0.3 * std::sin(2.0 * kPi * 15.0 * t);
    am5[i] = 1.0 + 0.3 * std::sin(2.0 * kPi * 5.0 * t);
  }

  SECTION("constant envelope has no in-band modulation") {
    const TremorFeatures f = tremor_features(flat, flat, rate);
    REQUIRE(f.amplitude.band_rms == 0.0);
    REQUIRE(f.amplitude.peak_mag == 0.0);
    REQUIRE(f.amplitude.mod_index == 0.0);
  }

  SECTION("15 Hz modulation is localized and sized correctly") {
    const TremorFeatures f = tremor_features(flat, am15, rate);
    REQUIRE_THAT(f.amplitude.peak_hz, Catch::Matchers::WithinAbs(15.0, 0.5));
    const double expected_rms = 0.3 / std::sqrt(2.0);
    REQUIRE_THAT(f.amplitude.band_rms,
                 Catch::Matchers::WithinRel(expected_rms, 0.10));
    REQUIRE_THAT(f.amplitude.mod_index,
                 Catch::Matchers::WithinRel(expected_rms, 0.10));
    REQUIRE_THAT(f.amplitude.peak_mag, Catch::Matchers::WithinRel(0.3, 0.10));
    // The F0 contour slot analyzed the flat contour.
    REQUIRE(f.f0.band_rms < 1e-9);
  }

  SECTION("5 Hz modulation stays below the band") {
    const TremorFeatures in_band = tremor_features(flat, am15, rate);
    const TremorFeatures out_band = tremor_features(flat, am5, rate);
    REQUIRE(out_band.amplitude.peak_mag < 0.10 * in_band.amplitude.peak_mag);
  }

  SECTION("input validation") {
    REQUIRE_THROWS_AS(tremor_features(flat, am15, 0.0), ValidationError);
    std::vector<double> short_contour(50, 1.0);
    REQUIRE_THROWS_AS(tremor_features(short_contour, short_contour, rate),
                      InsufficientDataError);
    std::vector<double> mismatched(n - 1, 1.0);
    REQUIRE_THROWS_AS(tremor_features(mismatched, am15, rate), ShapeError);
  }
}

TEST_CASE("energy block splits spectral mass around 500 Hz") {
  const int fs = 16000;
  std::vector<double> low_tone, high_tone;
  testsupport::append_tone(low_tone, 1.0, 200.0, 0.4, fs);
  testsupport::append_tone(high_tone, 1.0, 3000.0, 0.4, fs);

  const TonePrep pl = prep_signal(low_tone, fs);
  const TonePrep ph = prep_signal(high_tone, fs);
  const EnergyFeatures el =
      energy_features(compute_frame_descriptors(pl.frames, pl.seg));
  const EnergyFeatures eh =
      energy_features(compute_frame_descriptors(ph.frames, ph.seg));

  REQUIRE(el.low_frequency_ratio > 0.9);
  REQUIRE(eh.low_frequency_ratio < 0.1);
  REQUIRE(el.low_frequency_ratio <= 1.0);
  REQUIRE(eh.low_frequency_ratio >= 0.0);
}

TEST_CASE("energy temporal centroid tracks where the energy sits") {
  const int fs = 16000;
  std::vector<double> late;
  testsupport::append_silence(late, 1.0, fs);
  testsupport::append_tone(late, 1.0, 250.0, 0.5, fs);
  const TonePrep p = prep_signal(late, fs);
  const EnergyFeatures e =
      energy_features(compute_frame_descriptors(p.frames, p.seg));
  REQUIRE(e.energy_temporal_centroid_s > 1.2);
  REQUIRE(e.energy_temporal_centroid_s < 1.8);

  std::vector<double> steady;
  testsupport::append_tone(steady, 2.0, 250.0, 0.5, fs);
  const TonePrep ps = prep_signal(steady, fs);
  const EnergyFeatures es =
      energy_features(compute_frame_descriptors(ps.frames, ps.seg));
  REQUIRE_THAT(es.energy_temporal_centroid_s,
               Catch::Matchers::WithinAbs(1.0, 0.05));
}

TEST_CASE("total log energy shifts by log 4 under amplitude doubling") {
  const int fs = 16000;
  std::vector<double> base;
  testsupport::append_tone(base, 1.0, 300.0, 0.25, fs);
  std::vector<double> doubled = base;
  for (double& s : doubled) s *= 2.0;
  const TonePrep p1 = prep_signal(base, fs);
  const TonePrep p2 = prep_signal(doubled, fs);
  const EnergyFeatures e1 =
      energy_features(compute_frame_descriptors(p1.frames, p1.seg));
  const EnergyFeatures e2 =
      energy_features(compute_frame_descriptors(p2.frames, p2.seg));
  REQUIRE_THAT(e2.total_log_energy - e1.total_log_energy,
               Catch::Matchers::WithinAbs(std::log(4.0), 1e-9));
}

namespace {

/// A speech-like test clip: leading silence, two voiced tone bursts
/// separated by a long gap, trailing silence, with a low noise floor.
std::vector<double> speechlike_clip_samples(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s;
  const int fs = 16000;
  testsupport::append_silence(s, 0.3, fs);
  testsupport::append_tone(s, 1.2, 190.0, 0.3, fs);
  testsupport::append_silence(s, 0.5, fs);
  testsupport::append_tone(s, 1.0, 210.0, 0.3, fs);
  testsupport::append_silence(s, 0.2, fs);
  testsupport::add_noise(s, 0.003, rng);
  return s;
}

AudioClip speechlike_clip(std::uint64_t seed) {
  AudioClip clip;
  clip.sample_rate_hz = 16000;
  clip.samples = speechlike_clip_samples(seed);
  return clip;
}

}  // namespace

TEST_CASE("assembled feature vector has the frozen layout") {
  const auto& names = feature_names();
  REQUIRE(names.size() == kFeatureDimension);
  REQUIRE(kFeatureDimension == 113);
  REQUIRE(PauseFeatures::kCount + AcousticFeatures::kCount +
              TremorFeatures::kCount + EnergyFeatures::kCount ==
          kFeatureDimension);

  // Block boundaries.
  REQUIRE(names[0] == "max_pause_duration_s");
  REQUIRE(names[15] == "voiced_silent_frame_ratio");
  REQUIRE(names[16] == "log_energy_mean");
  REQUIRE(names[101] == "jitter");
  REQUIRE(names[102] == "amp_mod_band_rms");
  REQUIRE(names[109] == "f0_mod_index");
  REQUIRE(names[110] == "total_log_energy");
  REQUIRE(names[112] == "energy_temporal_centroid_s");

  REQUIRE(feature_block(0) == "pause");
  REQUIRE(feature_block(15) == "pause");
  REQUIRE(feature_block(16) == "acoustic");
  REQUIRE(feature_block(101) == "acoustic");
  REQUIRE(feature_block(102) == "tremor");
  REQUIRE(feature_block(109) == "tremor");
  REQUIRE(feature_block(110) == "energy");
  REQUIRE(feature_block(112) == "energy");

  std::set<std::string> unique(names.begin(), names.end());
  REQUIRE(unique.size() == names.size());
}

TEST_CASE("assemble produces finite deterministic vectors") {
  const AudioClip clip = speechlike_clip(31);
  const FeatureVector a = assemble_feature_vector(clip);
  const FeatureVector b = assemble_feature_vector(clip);
  REQUIRE(a.values.size() == kFeatureDimension);
  REQUIRE(a.values == b.values);  // bitwise determinism
  for (const double v : a.values) REQUIRE(std::isfinite(v));
  REQUIRE_FALSE(a.sanitized);
  REQUIRE_FALSE(a.no_voiced_frames);

  // Feature vectors from different clips differ.
  const FeatureVector c = assemble_feature_vector(speechlike_clip(32));
  REQUIRE(a.values != c.values);
}

TEST_CASE("assemble captures the structure of the speechlike clip") {
  const AudioClip clip = speechlike_clip(7);
  const FeatureVector f = assemble_feature_vector(clip);
  const auto& names = feature_names();
  const auto idx = [&](const std::string& n) {
    return static_cast<std::size_t>(
        std::find(names.begin(), names.end(), n) - names.begin());
  };
  // One interior pause near half a second; reaction near 0.3 s.
  REQUIRE(f.values[idx("number_of_pauses")] == 1.0);
  REQUIRE_THAT(f.values[idx("max_pause_duration_s")],
               Catch::Matchers::WithinAbs(0.5, 0.05));
  REQUIRE_THAT(f.values[idx("reaction_time_s")],
               Catch::Matchers::WithinAbs(0.3, 0.05));
  REQUIRE_THAT(f.values[idx("total_recording_time_s")],
               Catch::Matchers::WithinAbs(3.2, 1e-9));
  REQUIRE_THAT(f.values[idx("f0_mean")],
               Catch::Matchers::WithinAbs(200.0, 15.0));
}

TEST_CASE("assemble is scale invariant where it should be") {
  AudioClip clip = speechlike_clip(55);
  AudioClip doubled = clip;
  for (double& s : doubled.samples) s *= 2.0;
  const FeatureVector f1 = assemble_feature_vector(clip);
  const FeatureVector f2 = assemble_feature_vector(doubled);
  const auto& names = feature_names();
  const auto idx = [&](const std::string& n) {
    return static_cast<std::size_t>(
        std::find(names.begin(), names.end(), n) - names.begin());
  };
  REQUIRE(f1.values[idx("percent_pause_time")] ==
          f2.values[idx("percent_pause_time")]);
  REQUIRE(f1.values[idx("number_of_pauses")] ==
          f2.values[idx("number_of_pauses")]);
  REQUIRE(f1.values[idx("zcr_mean")] == f2.values[idx("zcr_mean")]);
  REQUIRE_THAT(f2.values[idx("low_frequency_ratio")],
               Catch::Matchers::WithinAbs(f1.values[idx("low_frequency_ratio")],
                                          1e-9));
  REQUIRE_THAT(f2.values[idx("f0_mean")],
               Catch::Matchers::WithinAbs(f1.values[idx("f0_mean")], 1e-9));
}

TEST_CASE("assemble rejects unusable clips") {
  AudioClip clip;
  clip.sample_rate_hz = 16000;
  REQUIRE_THROWS_AS(assemble_feature_vector(clip), EmptyInputError);
  clip.samples.assign(1600, 0.0);  // 100 ms
  REQUIRE_THROWS_AS(assemble_feature_vector(clip), TooShortError);
}

TEST_CASE("feature matrix CSV and schema round out the export path") {
  const std::string dir = "/tmp/vocatree_feat_test";
  std::filesystem::create_directories(dir);

  std::vector<FeatureRow> rows(2);
  rows[0].subject_id = "H001";
  rows[0].segment_id = 1;
  rows[0].features = assemble_feature_vector(speechlike_clip(1));
  rows[1].subject_id = "D001";
  rows[1].segment_id = 2;
  rows[1].features = assemble_feature_vector(speechlike_clip(2));

  const std::string csv_path = dir + "/features.csv";
  write_feature_csv(csv_path, rows);

  std::ifstream in(csv_path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  std::size_t commas = 0;
  for (const char c : header)
    if (c == ',') ++commas;
  REQUIRE(commas == 2 + kFeatureDimension - 1);
  REQUIRE(header.rfind("subject_id,segment_id,max_pause_duration_s", 0) == 0);
  std::string line;
  std::size_t data_lines = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++data_lines;
  REQUIRE(data_lines == 2);

  const nlohmann::json schema = feature_schema_json();
  REQUIRE(schema.at("dimension").get<std::size_t>() == kFeatureDimension);
  REQUIRE(schema.at("blocks").at("pause").get<int>() == 16);
  REQUIRE(schema.at("blocks").at("acoustic").get<int>() == 86);
  REQUIRE(schema.at("blocks").at("tremor").get<int>() == 8);
  REQUIRE(schema.at("blocks").at("energy").get<int>() == 3);
  REQUIRE(schema.at("features").size() == kFeatureDimension);
  REQUIRE(schema.at("features")[0].at("name") == "max_pause_duration_s");
}

TEST_CASE("depressed synthetic voices pause more than healthy ones") {
  SynthSpec spec;
  SynthClipSource source(spec);
  const Corpus& corpus = source.corpus();

  auto mean_pause_fraction = [&](Label label, int count) {
    const auto& names = feature_names();
    const std::size_t idx = static_cast<std::size_t>(
        std::find(names.begin(), names.end(), "percent_pause_time") -
        names.begin());
    double acc = 0.0;
    int used = 0;
    for (const auto& subject : corpus.subjects) {
      if (subject.label != label || used >= count) continue;
      const auto clip = source.load(subject, 1);  // fully discriminative id
      REQUIRE(clip.has_value());
      acc += assemble_feature_vector(*clip).values[idx];
      ++used;
    }
    REQUIRE(used == count);
    return acc / count;
  };

  const double healthy = mean_pause_fraction(Label::healthy, 6);
  const double depressed = mean_pause_fraction(Label::depressed, 6);
  REQUIRE(depressed > healthy);
}
