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

#include "convsim/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "convsim/error.hpp"
#include "detail/json_util.hpp"

namespace convsim {

using nlohmann::json;

void ConversationAnnotation::canonicalize() {
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SegmentAnnotation& a, const SegmentAnnotation& b) {
                     return std::tie(a.start, a.speaker, a.end, a.text) <
                            std::tie(b.start, b.speaker, b.end, b.text);
                   });
}

std::size_t ConversationAnnotation::speaker_count() const {
  std::set<std::string_view> speakers;
  for (const auto& s : segments) speakers.insert(s.speaker);
  return speakers.size();
}

void validate_segment(const SegmentAnnotation& seg,
                      std::string_view conversation_id) {
  if (!std::isfinite(seg.start) || !std::isfinite(seg.end)) {
    fail(ErrorKind::kValidation, "conversation '" +
                                     std::string(conversation_id) +
                                     "': non-finite segment time");
  }
  if (seg.start < 0.0) {
    fail(ErrorKind::kValidation,
         "conversation '" + std::string(conversation_id) +
             "': segment of speaker '" + seg.speaker + "' starts before 0");
  }
  if (!(seg.end > seg.start)) {
    fail(ErrorKind::kValidation,
         "conversation '" + std::string(conversation_id) +
             "': segment of speaker '" + seg.speaker +
             "' has end <= start");
  }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    const std::size_t b = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_ms(long long ms) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%03lld", ms / 1000, ms % 1000);
  return buf;
}

}  // namespace

std::vector<ConversationAnnotation> parse_rttm(std::string_view text) {
  std::map<std::string, ConversationAnnotation> by_id;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    const auto fields = split_ws(line);
    if (fields.empty() || fields[0].front() == ';' || fields[0].front() == '#')
      continue;
    if (fields.size() < 9) {
      throw ParseError(line_no, "expected at least 9 fields, found " +
                                    std::to_string(fields.size()));
    }
    if (fields[0] != "SPEAKER") {
      throw ParseError(line_no, "unsupported RTTM type '" +
                                    std::string(fields[0]) + "'");
    }
    const auto onset = parse_real(fields[3]);
    const auto duration = parse_real(fields[4]);
    if (!onset || !duration) {
      throw ParseError(line_no, "onset/duration are not real numbers");
    }
    const std::string file_id(fields[1]);
    if (!(*duration > 0.0)) {
      fail(ErrorKind::kValidation,
           "line " + std::to_string(line_no) + ": non-positive duration in '" +
               file_id + "'");
    }
    SegmentAnnotation seg{std::string(fields[7]), *onset, *onset + *duration,
                          std::nullopt};
    validate_segment(seg, file_id);
    auto& conv = by_id[file_id];
    conv.conversation_id = file_id;
    conv.segments.push_back(std::move(seg));
  }
  std::vector<ConversationAnnotation> out;
  out.reserve(by_id.size());
  for (auto& [id, conv] : by_id) {
    conv.canonicalize();
    out.push_back(std::move(conv));
  }
  return out;
}

std::string write_rttm(const ConversationAnnotation& annotation) {
  std::string out;
  for (const auto& seg : annotation.segments) {
    const long long onset = std::llround(seg.start * 1000.0);
    const long long end = std::llround(seg.end * 1000.0);
    const long long dur = std::max(1LL, end - onset);
    out += "SPEAKER " + annotation.conversation_id + " 1 " + format_ms(onset) +
           " " + format_ms(dur) + " <NA> <NA> " + seg.speaker +
           " <NA> <NA>\n";
  }
  return out;
}

std::vector<ConversationAnnotation> parse_segment_json(std::string_view text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_array()) {
    fail(ErrorKind::kSchema, "$: expected an array of conversations");
  }
  std::vector<ConversationAnnotation> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "$[" + std::to_string(i) + "]";
    const json& item = doc[i];
    ConversationAnnotation conv;
    conv.conversation_id =
        detail::require<std::string>(item, "conversation_id", path);
    const json& segs = detail::require_field(item, "segments", path);
    if (!segs.is_array()) {
      fail(ErrorKind::kSchema, path + ".segments: expected an array");
    }
    for (std::size_t j = 0; j < segs.size(); ++j) {
      const std::string spath = path + ".segments[" + std::to_string(j) + "]";
      const json& s = segs[j];
      SegmentAnnotation seg;
      seg.speaker = detail::require<std::string>(s, "speaker", spath);
      seg.start = detail::require<double>(s, "start", spath);
      seg.end = detail::require<double>(s, "end", spath);
      if (auto it = s.find("text"); it != s.end() && !it->is_null()) {
        if (!it->is_string()) {
          fail(ErrorKind::kSchema, spath + ".text: expected string or null");
        }
        seg.text = it->get<std::string>();
      }
      validate_segment(seg, conv.conversation_id);
      conv.segments.push_back(std::move(seg));
    }
    conv.canonicalize();
    out.push_back(std::move(conv));
  }
  return out;
}

std::string write_segment_json(
    const std::vector<ConversationAnnotation>& annotations) {
  json doc = json::array();
  for (const auto& conv : annotations) {
    json segs = json::array();
    for (const auto& s : conv.segments) {
      segs.push_back({{"speaker", s.speaker},
                      {"start", s.start},
                      {"end", s.end},
                      {"text", s.text ? json(*s.text) : json(nullptr)}});
    }
    doc.push_back(
        {{"conversation_id", conv.conversation_id}, {"segments", segs}});
  }
  return doc.dump(2) + "\n";
}

std::size_t UtterancePool::utterance_count() const {
  std::size_t n = 0;
  for (const auto& [_, v] : by_speaker) n += v.size();
  return n;
}

std::vector<std::string> UtterancePool::speakers() const {
  std::vector<std::string> out;
  out.reserve(by_speaker.size());
  for (const auto& [s, _] : by_speaker) out.push_back(s);
  return out;
}

const UtteranceEntry* UtterancePool::find(std::string_view utterance_id) const {
  for (const auto& [_, v] : by_speaker) {
    for (const auto& e : v) {
      if (e.utterance_id == utterance_id) return &e;
    }
  }
  return nullptr;
}

UtterancePool load_manifest(std::string_view text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_array()) fail(ErrorKind::kSchema, "$: expected an array");
  UtterancePool pool;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "$[" + std::to_string(i) + "]";
    const json& item = doc[i];
    UtteranceEntry e;
    e.speaker = detail::require<std::string>(item, "speaker", path);
    e.utterance_id = detail::require<std::string>(item, "utterance_id", path);
    e.audio_path = detail::require<std::string>(item, "audio_path", path);
    e.duration = detail::require<double>(item, "duration", path);
    e.chrono_index = detail::require<std::uint64_t>(item, "chrono_index", path);
    e.text = detail::optional<std::string>(item, "text", path).value_or("");
    if (!(e.duration > 0.0) || !std::isfinite(e.duration)) {
      fail(ErrorKind::kValidation,
           path + ": utterance '" + e.utterance_id + "' has duration <= 0");
    }
    pool.by_speaker[e.speaker].push_back(std::move(e));
  }
  for (auto& [speaker, entries] : pool.by_speaker) {
    std::sort(entries.begin(), entries.end(),
              [](const UtteranceEntry& a, const UtteranceEntry& b) {
                return a.chrono_index < b.chrono_index;
              });
    for (std::size_t k = 1; k < entries.size(); ++k) {
      if (entries[k].chrono_index == entries[k - 1].chrono_index) {
        fail(ErrorKind::kValidation,
             "speaker '" + speaker + "': duplicate chrono_index " +
                 std::to_string(entries[k].chrono_index));
      }
    }
  }
  return pool;
}

std::string write_manifest(const UtterancePool& pool) {
  json doc = json::array();
  for (const auto& [_, entries] : pool.by_speaker) {
    for (const auto& e : entries) {
      doc.push_back({{"speaker", e.speaker},
                     {"utterance_id", e.utterance_id},
                     {"audio_path", e.audio_path},
                     {"duration", e.duration},
                     {"chrono_index", e.chrono_index},
                     {"text", e.text}});
    }
  }
  return doc.dump(2) + "\n";
}

UtterancePool filter_pool(const UtterancePool& pool, double d_min,
                          double d_max, FilterReport* report) {
  if (!(d_min > 0.0) || !(d_min < d_max)) {
    fail(ErrorKind::kDomain, "filter_pool: require 0 < d_min < d_max");
  }
  UtterancePool out;
  FilterReport local;
  for (const auto& [speaker, entries] : pool.by_speaker) {
    auto& kept = out.by_speaker[speaker];
    for (const auto& e : entries) {
      if (e.duration >= d_min && e.duration <= d_max) {
        kept.push_back(e);
      }
    }
    local.kept += kept.size();
    local.dropped += entries.size() - kept.size();
    if (kept.empty() && !entries.empty()) {
      local.emptied_speakers.push_back(speaker);
    }
  }
  if (report) *report = std::move(local);
  return out;
}

}  // namespace convsim
