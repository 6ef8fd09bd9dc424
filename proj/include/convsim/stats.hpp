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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convsim/annotations.hpp"

namespace convsim {

enum class TransitionType { kSame, kDiff };

std::string_view to_string(TransitionType t);

// One inter-utterance gap. delta < 0 is overlap, delta >= 0 a pause; the gap
// is attributed to the incoming speaker.
struct GapObservation {
  std::string conversation_id;
  double delta = 0.0;
  TransitionType transition = TransitionType::kSame;
  std::string incoming_speaker;
  double following_duration = 0.0;
};

struct SpeakerGapSummary {
  std::string speaker;
  std::optional<double> mean_same;
  std::optional<double> mean_diff;
  std::size_t count_same = 0;
  std::size_t count_diff = 0;
};

struct SpeakerMeans {
  std::vector<SpeakerGapSummary> summaries;  // sorted by speaker
  std::size_t omitted_speakers = 0;  // no mean for either transition type
};

struct ResidualSample {
  double residual = 0.0;
  double duration = 0.0;
  TransitionType transition = TransitionType::kSame;
};

inline constexpr std::size_t kDefaultMinObservations = 3;

// Gaps between segments adjacent in canonical start order; returns exactly
// segments.size() - 1 observations.
std::vector<GapObservation> extract_gaps(
    const ConversationAnnotation& annotation);

SpeakerMeans speaker_means(const std::vector<GapObservation>& observations,
                           std::size_t min_obs = kDefaultMinObservations);

// Residual = delta minus the incoming speaker's mean for that transition.
// Observations whose speaker has no qualifying mean are skipped.
std::vector<ResidualSample> residuals(
    const std::vector<GapObservation>& observations,
    const std::vector<SpeakerGapSummary>& summaries);

// Role symbols: 0 = A (first speaker to appear), 1 = B.
using TurnSequence = std::vector<int>;

// Requires at most two speakers; throws Error(kValidation) naming the
// conversation otherwise.
TurnSequence turn_sequences(const ConversationAnnotation& annotation);

// Fraction of observations with delta < 0.
double overlap_ratio(const std::vector<GapObservation>& observations);

// conversation_id,delta,transition,incoming_speaker,following_duration
std::string observations_csv(const std::vector<GapObservation>& observations);

}  // namespace convsim
