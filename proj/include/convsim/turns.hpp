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
#include <string>
#include <vector>

#include "convsim/rng.hpp"
#include "convsim/stats.hpp"

namespace convsim {

// Two-state first-order Markov turn model. State 0 is role "A", 1 is "B".
class TransitionMatrix {
 public:
  static constexpr int kStates = 2;
  using Row = std::array<double, kStates>;

  TransitionMatrix();  // uniform rows
  // Validates that rows are stochastic within 1e-9.
  explicit TransitionMatrix(std::array<Row, kStates> probs);

  static const std::array<std::string, kStates>& state_labels();

  double prob(int from, int to) const;
  const std::array<Row, kStates>& probs() const { return probs_; }

  // Inverse-CDF draw from row `current` using one uniform variate.
  int next(int current, Rng& rng) const;

  // Stationary distribution (requires an irreducible chain).
  Row stationary() const;

  bool operator==(const TransitionMatrix&) const = default;

 private:
  std::array<Row, kStates> probs_;
};

// Speaker transition model estimated from the CallHome corpus
// (A->B 0.633, A->A 0.367, B->A 0.631, B->B 0.369).
TransitionMatrix callhome_transition_matrix();

// Pooled, unsmoothed bigram counts, row-normalised. A state without
// outgoing transitions gets a uniform row and a warning.
TransitionMatrix estimate_transitions(const std::vector<TurnSequence>& sequences);

int next_speaker(const TransitionMatrix& matrix, int current, Rng& rng);

TurnSequence sample_turn_sequence(const TransitionMatrix& matrix, int initial,
                                  std::size_t n, Rng& rng);

}  // namespace convsim
