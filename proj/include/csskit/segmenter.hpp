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

#ifndef CSSKIT_SEGMENTER_HPP_
#define CSSKIT_SEGMENTER_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csskit/common.hpp"

namespace csskit {

// One word-level diarization record.
struct DiarEntry {
  std::string speaker;
  double start = 0.0;
  double end = 0.0;
  std::string word;  // optional token
};

struct DiarizationAnnotation {
  std::vector<DiarEntry> entries;  // sorted by start time
  void validate() const;
};

struct Segment {
  double start = 0.0;
  double end = 0.0;
  int speaker_count = 0;
  std::optional<double> quality_score;

  double duration() const { return end - start; }
};

// Fixed-window segmentation: contiguous non-overlapping windows. A final
// partial window is kept when it is at least min_keep long.
std::vector<Segment> fws(double total_dur, double window = 4.0, double min_keep = 1.0);

struct CtsConfig {
  double max_len = 20.0;      // cut once a segment reaches this length
  double max_silence = 2.5;   // cut across annotation gaps longer than this
};

// Transcription-based segmentation. Sweeps the annotation from the start and
// cuts (1) at a third speaker's onset, (2) after the entry that pushes the
// segment to max_len (that entry stays in, so segments may slightly exceed
// the cap), (3) across silences longer than max_silence.
std::vector<Segment> cts(const DiarizationAnnotation& diar, const CtsConfig& cfg = {});

// Keeps segments whose score is at least threshold; order is preserved.
// Every segment must carry a score.
std::vector<Segment> filter_by_quality(const std::vector<Segment>& segments,
                                       double threshold);

// Training eligibility: drops segments shorter than min_len.
std::vector<Segment> filter_min_length(const std::vector<Segment>& segments,
                                       double min_len = 0.5);

// Normalized sampling weights favoring two-speaker segments by
// two_speaker_factor before normalization.
std::vector<double> sampling_weights(const std::vector<Segment>& segments,
                                     double two_speaker_factor = 2.0);

// Sidecar format: one record per line, tab-separated UTF-8:
//   speaker_id <TAB> start_sec <TAB> end_sec [<TAB> token]
DiarizationAnnotation parse_annotation(std::istream& in);
DiarizationAnnotation read_annotation_file(const std::string& path);
void write_annotation(std::ostream& out, const DiarizationAnnotation& diar);
void write_annotation_file(const std::string& path, const DiarizationAnnotation& diar);

// Segment table: start <TAB> end <TAB> speaker_count [<TAB> score]
std::vector<Segment> parse_segments(std::istream& in);
std::vector<Segment> read_segments_file(const std::string& path);
void write_segments(std::ostream& out, const std::vector<Segment>& segments);
void write_segments_file(const std::string& path, const std::vector<Segment>& segments);

}  // namespace csskit

#endif  // CSSKIT_SEGMENTER_HPP_
