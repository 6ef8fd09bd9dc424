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

// Synthetic corpora for tests: annotation sets with known gap structure,
// utterance pools, and on-disk audio fixtures.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "convsim/annotations.hpp"
#include "convsim/turns.hpp"

namespace synth {

struct GapCorpusConfig {
  std::size_t conversations = 40;
  std::size_t segments = 80;  // per conversation
  double mu_same = 0.5;
  double mu_diff = 0.2;
  double mu_sd = 0.1;  // spread of per-speaker means
  double residual_sd = 0.4;
  double slope = 0.0;  // residual mean grows by slope * following duration
  double d_lo = 1.5;
  double d_hi = 4.0;
  convsim::TransitionMatrix matrix = convsim::callhome_transition_matrix();
  bool with_text = false;
  std::uint64_t seed = 1;
};

// Two fresh speakers per conversation, each with its own means drawn from
// N(mu_*, mu_sd^2); gaps are mean + N(slope * d, residual_sd^2).
std::vector<convsim::ConversationAnnotation> gap_corpus(const GapCorpusConfig& cfg);

convsim::UtterancePool pool(std::size_t speakers, std::size_t per_speaker,
                            std::uint64_t seed, double d_lo = 2.0, double d_hi = 6.0);

struct AudioFixture {
  std::filesystem::path manifest;
  std::filesystem::path rirs;
  std::filesystem::path annotations;  // segment JSON for extract-stats
};

// Writes wav/, rirs/{room}/{pos}.wav, manifest.json and annotations.json.
AudioFixture write_audio_fixture(const std::filesystem::path& dir, std::size_t speakers,
                                 std::size_t per_speaker, std::uint64_t seed,
                                 int sample_rate = 16000);

std::filesystem::path temp_dir(const std::string& name);

}  // namespace synth
