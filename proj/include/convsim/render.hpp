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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convsim/annotations.hpp"
#include "convsim/rng.hpp"
#include "convsim/simulate.hpp"

namespace convsim {

struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  bool operator==(const AudioBuffer&) const = default;
};

// RIFF/WAVE, 16-bit PCM, mono. Samples are scaled by 1/32768.
AudioBuffer read_wav(std::span<const std::uint8_t> bytes);
// Saturating, round-to-nearest 16-bit quantisation.
std::vector<std::uint8_t> write_wav(const AudioBuffer& buffer);

AudioBuffer read_wav_file(const std::string& path);
void write_wav_file(const std::string& path, const AudioBuffer& buffer);

// Full linear convolution through FFTW, length |x| + |h| - 1.
std::vector<double> fft_convolve(std::span<const double> x,
                                 std::span<const double> h);

// Full linear convolution, rescaled so that the output peak equals the
// input signal's peak. Throws on sample-rate mismatch.
AudioBuffer convolve(const AudioBuffer& signal, const AudioBuffer& rir);
// Same, without the peak rescale.
AudioBuffer convolve_raw(const AudioBuffer& signal, const AudioBuffer& rir);

struct RoomSet {
  // room id -> impulse responses, one per speaker position (>= 2 each)
  std::map<std::string, std::vector<AudioBuffer>> rooms;
};

// rirs/{room_id}/{position}.wav; positions sorted by file name.
RoomSet load_roomset(const std::string& directory);

struct RirAssignment {
  std::string room_id;
  std::array<std::size_t, 2> positions{};  // per role A, B
  std::array<AudioBuffer, 2> responses;
};

// With probability `fraction` selects one room and two distinct positions
// in it. One uniform variate is always consumed for the decision.
std::optional<RirAssignment> assign_rirs(const RoomSet& rooms, Rng& rng,
                                         double fraction);

struct UtteranceLookup {
  std::function<AudioBuffer(const std::string& utterance_id)> audio;
  std::function<std::string(const std::string& utterance_id)> text;
};

struct RenderedDialogue {
  AudioBuffer audio;
  ConversationAnnotation annotation;  // realised times, text attached
  bool rir_applied = false;
  std::optional<std::string> room_id;
  double peak_before_rescale = 0.0;
  double rescale_factor = 1.0;  // < 1 when the mix overflowed
};

// Realised annotation of a plan (no audio needed).
ConversationAnnotation plan_annotation(const DialoguePlan& plan);

// Sample index at which an event starting at `start` seconds is placed.
std::size_t placement_sample(double start, int sample_rate);

// Adds `source` into `mix` starting at `offset`, truncating at the end.
void mix_into(std::vector<double>& mix, std::span<const double> source,
              std::size_t offset);

RenderedDialogue render_plan(const DialoguePlan& plan,
                             const UtteranceLookup& lookup,
                             const std::optional<RirAssignment>& rirs);

inline constexpr double kDefaultChunkSeconds = 30.0;
inline constexpr std::string_view kSpeakerChangeToken = "<sc>";

struct TrainingChunk {
  std::size_t chunk_index = 0;
  AudioBuffer audio;
  std::string text;
  std::size_t sc_count = 0;
  // Utterances assigned here whose audio runs past the chunk's end.
  std::size_t crossing_utterances = 0;
};

// Fixed windows at k * window seconds. Each utterance belongs to the chunk
// containing its start; its text is joined with " <sc> " at speaker changes.
std::vector<TrainingChunk> chunk_dialogue(const AudioBuffer& audio,
                                          const ConversationAnnotation& annotation,
                                          double window = kDefaultChunkSeconds);

struct GroundTruth {
  std::string rttm;
  std::string segments_json;
  std::string transcripts_tsv;  // dialogue_id \t chunk_index \t text
};

GroundTruth emit_ground_truth(const RenderedDialogue& rendered,
                              const std::vector<TrainingChunk>& chunks);

std::string transcripts_tsv(const std::string& dialogue_id,
                            const std::vector<TrainingChunk>& chunks);

}  // namespace convsim
