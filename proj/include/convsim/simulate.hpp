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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convsim/annotations.hpp"
#include "convsim/model.hpp"
#include "convsim/rng.hpp"
#include "convsim/turns.hpp"

namespace convsim {

enum class SimulationMode { kSasc, kCSasc, kNaiveFixedGap, kNoConcat };

std::string_view to_string(SimulationMode mode);
SimulationMode parse_simulation_mode(std::string_view text);

struct SimulationConfig {
  SimulationMode mode = SimulationMode::kSasc;
  int pairs_limit = 1;
  std::uint64_t seed = 0;
  double d_min = 2.0;
  double d_max = 10.0;
  double fixed_gap = 0.25;
  double clamp_min_start_delta = 0.01;

  // Throws Error(kValidation) on out-of-range settings (pairs_limit must be
  // in [1, 5]).
  void validate() const;
};

struct PlanEvent {
  std::size_t n = 1;  // 1-based
  std::string speaker;
  std::string utterance_id;
  double gap_before = 0.0;  // sampled gap, before clamping
  double start = 0.0;       // realised start
  double duration = 0.0;

  double end() const { return start + duration; }
  bool operator==(const PlanEvent&) const = default;
};

struct DialoguePlan {
  std::string dialogue_id;
  SimulationMode mode = SimulationMode::kSasc;
  std::uint64_t seed = 0;
  std::array<std::string, 2> pair;  // roles A, B
  std::vector<PlanEvent> events;
  std::size_t clamp_count = 0;  // not serialised

  double length() const;
  bool operator==(const DialoguePlan& o) const {
    return dialogue_id == o.dialogue_id && mode == o.mode && seed == o.seed &&
           pair == o.pair && events == o.events;
  }
};

std::string plan_to_json(const DialoguePlan& plan);
DialoguePlan plan_from_json(std::string_view text);

struct SpeakerPair {
  std::string a;
  std::string b;
  int round = 1;  // pairing round (1..K) that produced the pair
};

struct PairingResult {
  std::vector<SpeakerPair> pairs;
  // Speakers left out of at least one round (odd speaker count).
  std::vector<std::string> unpaired;
};

// K rounds; each round shuffles the speakers and pairs them off adjacently,
// reshuffling (bounded) when a pair would repeat an earlier one.
PairingResult make_pairs(std::vector<std::string> speakers, int pairs_limit,
                         Rng& rng);

// Grows a sampled turn sequence one symbol at a time and stops before the
// first symbol whose role would run out of utterances. Minimum length 1.
TurnSequence grow_turn_sequence(const TransitionMatrix& matrix,
                                std::array<std::size_t, 2> pool_sizes,
                                int initial, Rng& rng);

// Random streams derived from a dialogue seed; each stochastic choice has its
// own stream so that changing one component leaves the others' draws intact.
enum class Stream : std::uint64_t {
  kTurns = 1,
  kBaseline = 2,
  kResidual = 3,
  kRir = 4,
};
std::uint64_t stream_seed(std::uint64_t dialogue_seed, Stream stream);

// Dialogue seed from the corpus seed, the two speaker ids and the round.
std::uint64_t dialogue_seed(std::uint64_t corpus_seed, const SpeakerPair& pair);

// One simulated dialogue for `pair`. `pool` must already be filtered.
// `model` is required in SASC/C-SASC mode; `matrix` supplies turn-taking.
DialoguePlan plan_dialogue(const SpeakerPair& pair, const UtterancePool& pool,
                           const StatsModel* model,
                           const TransitionMatrix& matrix,
                           const SimulationConfig& config, std::uint64_t seed,
                           std::string dialogue_id);

// One single-event plan per utterance of both speakers.
std::vector<DialoguePlan> plan_no_concat(const SpeakerPair& pair,
                                         const UtterancePool& pool,
                                         const SimulationConfig& config,
                                         std::string_view id_prefix);

struct CorpusSummary {
  std::size_t dialogues = 0;
  std::size_t speakers = 0;
  double mean_utterances = 0.0;
  double mean_utterance_duration = 0.0;  // averaged per dialogue
  double mean_dialogue_length = 0.0;
  double total_audio_hours = 0.0;  // sum of utterance durations
  std::size_t clamped_gaps = 0;
  std::vector<std::string> unpaired_speakers;
  std::size_t filtered_out = 0;
};

struct CorpusResult {
  std::vector<DialoguePlan> plans;
  CorpusSummary summary;
};

// Filters the manifest, pairs speakers and plans one dialogue per pair.
CorpusResult simulate_corpus(const UtterancePool& manifest,
                             const StatsModel* model,
                             const SimulationConfig& config);

std::string corpus_summary_json(const CorpusSummary& summary);

}  // namespace convsim
