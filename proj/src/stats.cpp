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

#include "convsim/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <utility>

#include "convsim/error.hpp"

namespace convsim {

std::string_view to_string(TransitionType t) {
  return t == TransitionType::kSame ? "same" : "diff";
}

std::vector<GapObservation> extract_gaps(
    const ConversationAnnotation& annotation) {
  const auto& segs = annotation.segments;
  if (segs.size() < 2) {
    fail(ErrorKind::kValidation, "conversation '" + annotation.conversation_id +
                                     "': need at least 2 segments");
  }
  if (annotation.speaker_count() < 2) {
    fail(ErrorKind::kValidation, "conversation '" + annotation.conversation_id +
                                     "': need at least 2 speakers");
  }
  std::vector<GapObservation> out;
  out.reserve(segs.size() - 1);
  for (std::size_t i = 1; i < segs.size(); ++i) {
    const auto& prev = segs[i - 1];
    const auto& next = segs[i];
    out.push_back({annotation.conversation_id, next.start - prev.end,
                   next.speaker == prev.speaker ? TransitionType::kSame
                                                : TransitionType::kDiff,
                   next.speaker, next.end - next.start});
  }
  return out;
}

SpeakerMeans speaker_means(const std::vector<GapObservation>& observations,
                           std::size_t min_obs) {
  struct Acc {
    double sum_same = 0.0, sum_diff = 0.0;
    std::size_t n_same = 0, n_diff = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& o : observations) {
    auto& a = acc[o.incoming_speaker];
    if (o.transition == TransitionType::kSame) {
      a.sum_same += o.delta;
      ++a.n_same;
    } else {
      a.sum_diff += o.delta;
      ++a.n_diff;
    }
  }
  SpeakerMeans out;
  for (const auto& [speaker, a] : acc) {
    SpeakerGapSummary s{speaker, std::nullopt, std::nullopt, a.n_same,
                        a.n_diff};
    if (a.n_same >= min_obs && a.n_same > 0) {
      s.mean_same = a.sum_same / static_cast<double>(a.n_same);
    }
    if (a.n_diff >= min_obs && a.n_diff > 0) {
      s.mean_diff = a.sum_diff / static_cast<double>(a.n_diff);
    }
    if (!s.mean_same && !s.mean_diff) {
      ++out.omitted_speakers;
      continue;
    }
    out.summaries.push_back(std::move(s));
  }
  return out;
}

std::vector<ResidualSample> residuals(
    const std::vector<GapObservation>& observations,
    const std::vector<SpeakerGapSummary>& summaries) {
  std::map<std::string_view, const SpeakerGapSummary*> index;
  for (const auto& s : summaries) index[s.speaker] = &s;
  std::vector<ResidualSample> out;
  for (const auto& o : observations) {
    auto it = index.find(o.incoming_speaker);
    if (it == index.end()) continue;
    const auto& mean = o.transition == TransitionType::kSame
                           ? it->second->mean_same
                           : it->second->mean_diff;
    if (!mean) continue;
    out.push_back({o.delta - *mean, o.following_duration, o.transition});
  }
  return out;
}

TurnSequence turn_sequences(const ConversationAnnotation& annotation) {
  std::vector<std::string_view> roles;
  TurnSequence seq;
  seq.reserve(annotation.segments.size());
  for (const auto& seg : annotation.segments) {
    auto it = std::find(roles.begin(), roles.end(), seg.speaker);
    if (it == roles.end()) {
      if (roles.size() == 2) {
        fail(ErrorKind::kValidation,
             "conversation '" + annotation.conversation_id +
                 "' has more than 2 speakers; transition estimation "
                 "requires 2-speaker conversations");
      }
      roles.push_back(seg.speaker);
      it = roles.end() - 1;
    }
    seq.push_back(static_cast<int>(it - roles.begin()));
  }
  return seq;
}

double overlap_ratio(const std::vector<GapObservation>& observations) {
  if (observations.empty()) {
    fail(ErrorKind::kDomain, "overlap_ratio: no observations");
  }
  const auto n = std::count_if(observations.begin(), observations.end(),
                               [](const GapObservation& o) {
                                 return o.delta < 0.0;
                               });
  return static_cast<double>(n) / static_cast<double>(observations.size());
}

std::string observations_csv(const std::vector<GapObservation>& observations) {
  std::string out =
      "conversation_id,delta,transition,incoming_speaker,following_duration\n";
  char buf[64];
  for (const auto& o : observations) {
    out += o.conversation_id;
    std::snprintf(buf, sizeof(buf), ",%.17g,", o.delta);
    out += buf;
    out += to_string(o.transition);
    out += ',';
    out += o.incoming_speaker;
    std::snprintf(buf, sizeof(buf), ",%.17g\n", o.following_duration);
    out += buf;
  }
  return out;
}

}  // namespace convsim
