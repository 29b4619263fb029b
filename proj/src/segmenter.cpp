// Copyright 2026 The csskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csskit/segmenter.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace csskit {

void DiarizationAnnotation::validate() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    require(e.start < e.end, ErrorCode::kInvalidArgument, "annotation entry ", i,
            " has start ", e.start, " >= end ", e.end);
    require(!e.speaker.empty(), ErrorCode::kInvalidArgument, "annotation entry ", i,
            " has an empty speaker id");
    if (i > 0) {
      require(entries[i - 1].start <= e.start, ErrorCode::kInvalidArgument,
              "annotation entries are not sorted by start time (entry ", i, ")");
    }
  }
}

std::vector<Segment> fws(double total_dur, double window, double min_keep) {
  require(total_dur > 0.0, ErrorCode::kInvalidArgument,
          "fws: total duration must be > 0, got ", total_dur);
  require(window > 0.0, ErrorCode::kInvalidArgument, "fws: window must be > 0");
  std::vector<Segment> out;
  const int full = static_cast<int>(total_dur / window);
  for (int k = 0; k < full; ++k) {
    out.push_back(Segment{k * window, (k + 1) * window, 0, std::nullopt});
  }
  const double tail_start = full * window;
  if (total_dur - tail_start >= min_keep) {
    out.push_back(Segment{tail_start, total_dur, 0, std::nullopt});
  }
  return out;
}

std::vector<Segment> cts(const DiarizationAnnotation& diar, const CtsConfig& cfg) {
  diar.validate();
  require(cfg.max_len > 0.0 && cfg.max_silence > 0.0, ErrorCode::kInvalidArgument,
          "cts: thresholds must be positive");

  std::vector<Segment> out;
  bool open = false;
  double seg_start = 0.0;
  double seg_end = 0.0;
  double last_emit_end = -std::numeric_limits<double>::infinity();
  std::set<std::string> speakers;

  auto emit = [&](double end) {
    if (open && end > seg_start) {
      out.push_back(Segment{seg_start, end, static_cast<int>(speakers.size()),
                            std::nullopt});
      last_emit_end = end;
    }
    open = false;
    speakers.clear();
  };

  // A word can reach past a cut point; the next segment starts no earlier
  // than the previous one ended, keeping segments disjoint and ordered.
  auto reopen = [&](const DiarEntry& e) {
    seg_start = std::max(e.start, last_emit_end);
    seg_end = e.end;
    speakers = {e.speaker};
    open = true;
  };

  for (const auto& e : diar.entries) {
    if (!open) {
      reopen(e);
    } else if (e.start - seg_end > cfg.max_silence) {
      // rule (3): long silence; the gap itself belongs to no segment
      emit(seg_end);
      reopen(e);
    } else if (!speakers.count(e.speaker) && speakers.size() == 2) {
      // rule (1): a third speaker; the segment ends at its onset
      emit(e.start);
      reopen(e);
    } else {
      speakers.insert(e.speaker);
      seg_end = std::max(seg_end, e.end);
    }
    if (open && seg_end - seg_start >= cfg.max_len) {
      // rule (2): the entry that reached the cap stays in, then cut
      emit(seg_end);
    }
  }
  emit(seg_end);
  return out;
}

std::vector<Segment> filter_by_quality(const std::vector<Segment>& segments,
                                       double threshold) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    require(segments[i].quality_score.has_value(), ErrorCode::kInvalidArgument,
            "filter_by_quality: segment ", i, " has no quality score");
    if (*segments[i].quality_score >= threshold) out.push_back(segments[i]);
  }
  return out;
}

std::vector<Segment> filter_min_length(const std::vector<Segment>& segments,
                                       double min_len) {
  std::vector<Segment> out;
  for (const auto& s : segments) {
    if (s.duration() >= min_len) out.push_back(s);
  }
  return out;
}

std::vector<double> sampling_weights(const std::vector<Segment>& segments,
                                     double two_speaker_factor) {
  require(!segments.empty(), ErrorCode::kInvalidArgument,
          "sampling_weights: empty segment list");
  require(two_speaker_factor >= 1.0, ErrorCode::kInvalidArgument,
          "sampling_weights: factor must be >= 1");
  std::vector<double> w(segments.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    w[i] = segments[i].speaker_count == 2 ? two_speaker_factor : 1.0;
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

DiarizationAnnotation parse_annotation(std::istream& in) {
  DiarizationAnnotation diar;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    require(fields.size() == 3 || fields.size() == 4, ErrorCode::kFormat,
            "annotation line ", lineno, ": expected 3 or 4 tab-separated fields, got ",
            fields.size());
    DiarEntry e;
    e.speaker = fields[0];
    try {
      e.start = std::stod(fields[1]);
      e.end = std::stod(fields[2]);
    } catch (const std::exception&) {
      raise(ErrorCode::kFormat, "annotation line ", lineno, ": bad number");
    }
    if (fields.size() == 4) e.word = fields[3];
    diar.entries.push_back(std::move(e));
  }
  diar.validate();
  return diar;
}

DiarizationAnnotation read_annotation_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open annotation file: ", path);
  return parse_annotation(in);
}

void write_annotation(std::ostream& out, const DiarizationAnnotation& diar) {
  out.precision(6);
  out << std::fixed;
  for (const auto& e : diar.entries) {
    out << e.speaker << '\t' << e.start << '\t' << e.end;
    if (!e.word.empty()) out << '\t' << e.word;
    out << '\n';
  }
}

void write_annotation_file(const std::string& path, const DiarizationAnnotation& diar) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::kIo, "cannot open for writing: ", path);
  write_annotation(out, diar);
}

std::vector<Segment> parse_segments(std::istream& in) {
  std::vector<Segment> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Segment s;
    double score = 0.0;
    if (!(ls >> s.start >> s.end >> s.speaker_count)) {
      raise(ErrorCode::kFormat, "segment line ", lineno,
            ": expected 'start end speaker_count [score]'");
    }
    if (ls >> score) s.quality_score = score;
    require(s.start < s.end, ErrorCode::kFormat, "segment line ", lineno,
            ": start must be < end");
    out.push_back(s);
  }
  return out;
}

std::vector<Segment> read_segments_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open segments file: ", path);
  return parse_segments(in);
}

void write_segments(std::ostream& out, const std::vector<Segment>& segments) {
  out.precision(6);
  out << std::fixed;
  for (const auto& s : segments) {
    out << s.start << '\t' << s.end << '\t' << s.speaker_count;
    if (s.quality_score.has_value()) out << '\t' << *s.quality_score;
    out << '\n';
  }
}

void write_segments_file(const std::string& path, const std::vector<Segment>& segments) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::kIo, "cannot open for writing: ", path);
  write_segments(out, segments);
}

}  // namespace csskit
