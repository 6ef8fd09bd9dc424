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

#include "convsim/turns.hpp"

#include <cmath>

#include "convsim/error.hpp"

namespace convsim {

namespace {
void check_state(int s) {
  if (s < 0 || s >= TransitionMatrix::kStates) {
    fail(ErrorKind::kValidation, "unknown turn state " + std::to_string(s));
  }
}
}  // namespace

TransitionMatrix::TransitionMatrix() {
  for (auto& row : probs_) row.fill(1.0 / kStates);
}

TransitionMatrix::TransitionMatrix(std::array<Row, kStates> probs)
    : probs_(probs) {
  for (int i = 0; i < kStates; ++i) {
    double sum = 0.0;
    for (double p : probs_[i]) {
      if (!(p >= 0.0 && p <= 1.0)) {
        fail(ErrorKind::kValidation, "transition probability outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      fail(ErrorKind::kValidation, "transition row " + std::to_string(i) +
                                       " does not sum to 1");
    }
  }
}

const std::array<std::string, TransitionMatrix::kStates>&
TransitionMatrix::state_labels() {
  static const std::array<std::string, kStates> labels{"A", "B"};
  return labels;
}

double TransitionMatrix::prob(int from, int to) const {
  check_state(from);
  check_state(to);
  return probs_[from][to];
}

int TransitionMatrix::next(int current, Rng& rng) const {
  check_state(current);
  const double u = rng.uniform();
  double cum = 0.0;
  for (int j = 0; j < kStates - 1; ++j) {
    cum += probs_[current][j];
    if (u < cum) return j;
  }
  return kStates - 1;
}

TransitionMatrix::Row TransitionMatrix::stationary() const {
  // Two-state closed form: pi_A = p(B->A) / (p(A->B) + p(B->A)).
  const double ab = probs_[0][1];
  const double ba = probs_[1][0];
  if (ab + ba == 0.0) {
    fail(ErrorKind::kDomain, "stationary distribution of a reducible chain");
  }
  return {ba / (ab + ba), ab / (ab + ba)};
}

TransitionMatrix callhome_transition_matrix() {
  return TransitionMatrix({{{0.367, 0.633}, {0.631, 0.369}}});
}

TransitionMatrix estimate_transitions(
    const std::vector<TurnSequence>& sequences) {
  if (sequences.empty()) {
    fail(ErrorKind::kDomain, "estimate_transitions: no sequences");
  }
  std::array<std::array<std::size_t, TransitionMatrix::kStates>,
             TransitionMatrix::kStates>
      counts{};
  for (const auto& seq : sequences) {
    for (int s : seq) check_state(s);
    for (std::size_t i = 1; i < seq.size(); ++i) ++counts[seq[i - 1]][seq[i]];
  }
  std::array<TransitionMatrix::Row, TransitionMatrix::kStates> probs{};
  for (int i = 0; i < TransitionMatrix::kStates; ++i) {
    std::size_t total = 0;
    for (auto c : counts[i]) total += c;
    if (total == 0) {
      warn("state " + TransitionMatrix::state_labels()[i] +
           " has no outgoing transitions; using a uniform row");
      probs[i].fill(1.0 / TransitionMatrix::kStates);
      continue;
    }
    for (int j = 0; j < TransitionMatrix::kStates; ++j) {
      probs[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(total);
    }
  }
  return TransitionMatrix(probs);
}

int next_speaker(const TransitionMatrix& matrix, int current, Rng& rng) {
  return matrix.next(current, rng);
}

TurnSequence sample_turn_sequence(const TransitionMatrix& matrix, int initial,
                                  std::size_t n, Rng& rng) {
  check_state(initial);
  if (n == 0) fail(ErrorKind::kDomain, "sample_turn_sequence: n must be >= 1");
  TurnSequence seq;
  seq.reserve(n);
  seq.push_back(initial);
  while (seq.size() < n) seq.push_back(matrix.next(seq.back(), rng));
  return seq;
}

}  // namespace convsim
