// Copyright 2026 The convsim Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace convsim {

// Speaker-labelled time interval inside one conversation, in seconds.
struct SegmentAnnotation {
  std::string speaker;
  double start = 0.0;
  double end = 0.0;
  std::optional<std::string> text;

  bool operator==(const SegmentAnnotation&) const = default;
};

struct ConversationAnnotation {
  std::string conversation_id;
  std::vector<SegmentAnnotation> segments;

  // Sorts segments by (start, speaker, end, text). Every parser applies this.
  void canonicalize();
  std::size_t speaker_count() const;

  bool operator==(const ConversationAnnotation&) const = default;
};

// Throws Error(kValidation) unless start >= 0 and end > start.
void validate_segment(const SegmentAnnotation& seg,
                      std::string_view conversation_id);

// RTTM: whitespace-separated SPEAKER lines. Conversations are returned
// sorted by conversation id.
std::vector<ConversationAnnotation> parse_rttm(std::string_view text);

// Onset/duration are printed with 3 decimals; the end time is rounded
// independently so a reparse is within 0.5 ms on both boundaries.
std::string write_rttm(const ConversationAnnotation& annotation);

// [{"conversation_id": str, "segments": [{"speaker", "start", "end",
// "text": str|null}]}]
std::vector<ConversationAnnotation> parse_segment_json(std::string_view text);
std::string write_segment_json(
    const std::vector<ConversationAnnotation>& annotations);

struct UtteranceEntry {
  std::string speaker;
  std::string utterance_id;
  std::string audio_path;
  double duration = 0.0;
  std::uint64_t chrono_index = 0;
  std::string text;

  bool operator==(const UtteranceEntry&) const = default;
};

// Per-speaker utterance lists ordered by chrono_index. Speaker groups may be
// empty after filtering.
struct UtterancePool {
  std::map<std::string, std::vector<UtteranceEntry>> by_speaker;

  std::size_t utterance_count() const;
  std::vector<std::string> speakers() const;
  const UtteranceEntry* find(std::string_view utterance_id) const;

  bool operator==(const UtterancePool&) const = default;
};

UtterancePool load_manifest(std::string_view text);
std::string write_manifest(const UtterancePool& pool);

struct FilterReport {
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::vector<std::string> emptied_speakers;
};

// Keeps entries with d_min <= duration <= d_max, preserving order.
UtterancePool filter_pool(const UtterancePool& pool, double d_min,
                          double d_max, FilterReport* report = nullptr);

}  // namespace convsim
