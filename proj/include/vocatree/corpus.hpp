#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vocatree/common.hpp"
#include "vocatree/wav.hpp"

namespace vocatree {

inline constexpr int kNumSegments = 29;

// ---------------------------------------------------------------------------
// The fixed 29-segment recording protocol: 18 interview questions (six per
// valence), one passage reading, six vocabulary readings (two per valence)
// and four picture descriptions.
// ---------------------------------------------------------------------------

enum class Paradigm { interview, passage_reading, vocabulary_reading, picture_description };
enum class Valence { positive, neutral, negative, none };

struct SegmentDescriptor {
  int segment_id = 0;
  Paradigm paradigm = Paradigm::interview;
  Valence valence = Valence::none;
};

inline std::string paradigm_name(Paradigm p) {
  switch (p) {
    case Paradigm::interview: return "interview";
    case Paradigm::passage_reading: return "passage_reading";
    case Paradigm::vocabulary_reading: return "vocabulary_reading";
    case Paradigm::picture_description: return "picture_description";
  }
  return "?";
}

inline std::string valence_name(Valence v) {
  switch (v) {
    case Valence::positive: return "positive";
    case Valence::neutral: return "neutral";
    case Valence::negative: return "negative";
    case Valence::none: return "none";
  }
  return "?";
}

inline const std::array<SegmentDescriptor, kNumSegments>& segment_taxonomy() {
  static const std::array<SegmentDescriptor, kNumSegments> table = [] {
    std::array<SegmentDescriptor, kNumSegments> t{};
    auto valence_of_six = [](int i) {  // 0..17 -> six positive, six neutral, six negative
      return i < 6 ? Valence::positive : (i < 12 ? Valence::neutral : Valence::negative);
    };
    for (int i = 0; i < 18; ++i)
      t[i] = {i + 1, Paradigm::interview, valence_of_six(i)};
    t[18] = {19, Paradigm::passage_reading, Valence::none};
    const Valence vocab[6] = {Valence::positive, Valence::positive,
                              Valence::neutral, Valence::neutral,
                              Valence::negative, Valence::negative};
    for (int i = 0; i < 6; ++i)
      t[19 + i] = {20 + i, Paradigm::vocabulary_reading, vocab[i]};
    t[25] = {26, Paradigm::picture_description, Valence::positive};
    t[26] = {27, Paradigm::picture_description, Valence::neutral};
    t[27] = {28, Paradigm::picture_description, Valence::negative};
    t[28] = {29, Paradigm::picture_description, Valence::none};
    return t;
  }();
  return table;
}

// ---------------------------------------------------------------------------
// Subjects and corpora. Missing segments are permitted; they flow through
// the pipeline as absent predictions.
// ---------------------------------------------------------------------------

struct SubjectRecord {
  std::string subject_id;
  Gender gender = Gender::male;
  Label label = Label::healthy;
  std::map<int, std::string> segments;  // segment_id -> wav path reference
};

struct Corpus {
  std::vector<SubjectRecord> subjects;  // order of first appearance

  const SubjectRecord* find(const std::string& subject_id) const {
    for (const auto& s : subjects)
      if (s.subject_id == subject_id) return &s;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Manifest CSV: header `subject_id,gender,label,segment_id,wav_path`, one
// row per recorded segment. Plain comma-separated fields, no quoting.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

inline constexpr const char* kManifestHeader =
    "subject_id,gender,label,segment_id,wav_path";

inline Corpus load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_manifest: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("load_manifest: " + path + ": empty file (header required)");
  {
    auto header = detail::split_csv_row(line);
    const auto expect = detail::split_csv_row(kManifestHeader);
    if (header != expect)
      throw ParseError("load_manifest: " + path + ": line 1: bad header");
  }

  Corpus corpus;
  std::map<std::string, std::size_t> index;
  std::set<std::pair<std::string, int>> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_row(line);
    if (fields.size() != 5)
      throw ParseError("load_manifest: " + path + ": line " +
                       std::to_string(line_no) + ": expected 5 fields, got " +
                       std::to_string(fields.size()));
    const std::string& subject_id = fields[0];
    if (subject_id.empty())
      throw ParseError("load_manifest: " + path + ": line " +
                       std::to_string(line_no) + ": empty subject_id");
    int segment_id = 0;
    try {
      std::size_t used = 0;
      segment_id = std::stoi(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("load_manifest: " + path + ": line " +
                       std::to_string(line_no) + ": bad segment_id '" +
                       fields[3] + "'");
    }
    if (segment_id < 1 || segment_id > kNumSegments)
      throw ValidationError("load_manifest: " + path + ": line " +
                            std::to_string(line_no) + ": segment_id " +
                            std::to_string(segment_id) + " outside 1.." +
                            std::to_string(kNumSegments));
    const Gender gender = parse_gender(fields[1]);
    const Label label = parse_label(fields[2]);
    if (!seen.insert({subject_id, segment_id}).second)
      throw DuplicateError("load_manifest: " + path + ": line " +
                           std::to_string(line_no) + ": duplicate (" +
                           subject_id + ", " + std::to_string(segment_id) + ")");

    auto it = index.find(subject_id);
    if (it == index.end()) {
      SubjectRecord rec;
      rec.subject_id = subject_id;
      rec.gender = gender;
      rec.label = label;
      index.emplace(subject_id, corpus.subjects.size());
      corpus.subjects.push_back(std::move(rec));
      it = index.find(subject_id);
    } else {
      const SubjectRecord& rec = corpus.subjects[it->second];
      if (rec.gender != gender || rec.label != label)
        throw ValidationError("load_manifest: " + path + ": line " +
                              std::to_string(line_no) +
                              ": conflicting gender/label for " + subject_id);
    }
    corpus.subjects[it->second].segments[segment_id] = fields[4];
  }
  return corpus;
}

inline void write_manifest(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw IoError("write_manifest: cannot open " + path + " for writing");
  out << kManifestHeader << "\n";
  for (const auto& s : corpus.subjects) {
    for (const auto& [segment_id, wav_path] : s.segments) {
      out << s.subject_id << ',' << gender_name(s.gender) << ','
          << label_name(s.label) << ',' << segment_id << ',' << wav_path << "\n";
    }
  }
  if (!out) throw IoError("write_manifest: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Clip access. A corpus ingested from a manifest loads WAV files from disk;
// a synthetic corpus regenerates clips deterministically on demand.
// ---------------------------------------------------------------------------

class ClipSource {
 public:
  virtual ~ClipSource() = default;
  /// Clip for (subject, segment), or nullopt when the segment is absent.
  virtual std::optional<AudioClip> load(const SubjectRecord& subject,
                                        int segment_id) const = 0;
};

class FileClipSource final : public ClipSource {
 public:
  explicit FileClipSource(std::filesystem::path base_dir)
      : base_dir_(std::move(base_dir)) {}

  std::optional<AudioClip> load(const SubjectRecord& subject,
                                int segment_id) const override {
    const auto it = subject.segments.find(segment_id);
    if (it == subject.segments.end()) return std::nullopt;
    std::filesystem::path p(it->second);
    if (p.is_relative()) p = base_dir_ / p;
    return load_wav(p.string());
  }

 private:
  std::filesystem::path base_dir_;
};

}  // namespace vocatree
