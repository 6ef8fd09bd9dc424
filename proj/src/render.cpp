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

#include "convsim/render.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <mutex>

#include <fftw3.h>

#include "convsim/error.hpp"

namespace convsim {

namespace fs = std::filesystem;

namespace {

// FFTW planner calls are not thread-safe; execution is.
std::mutex g_fftw_planner;

std::size_t fft_size(std::size_t n) {
  std::size_t s = 1;
  while (s < n) s <<= 1;
  return s;
}

// Sample count covering `seconds`, tolerant of representation error in
// products such as 1.1 * 16000.
std::size_t samples_for(double seconds, int sample_rate) {
  const double x = seconds * sample_rate;
  return static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-6)));
}

double peak(std::span<const double> xs) {
  double p = 0.0;
  for (double x : xs) p = std::max(p, std::abs(x));
  return p;
}

}  // namespace

std::vector<double> fft_convolve(std::span<const double> x,
                                 std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  const std::size_t out_len = x.size() + h.size() - 1;
  const std::size_t n = fft_size(out_len);
  const std::size_t bins = n / 2 + 1;

  double* in = fftw_alloc_real(n);
  fftw_complex* fx = fftw_alloc_complex(bins);
  fftw_complex* fh = fftw_alloc_complex(bins);
  fftw_plan fwd_x, fwd_h, inv;
  {
    std::lock_guard lock(g_fftw_planner);
    fwd_x = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, fx, FFTW_ESTIMATE);
    fwd_h = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, fh, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), fx, in, FFTW_ESTIMATE);
  }

  std::fill(in, in + n, 0.0);
  std::copy(x.begin(), x.end(), in);
  fftw_execute(fwd_x);
  std::fill(in, in + n, 0.0);
  std::copy(h.begin(), h.end(), in);
  fftw_execute(fwd_h);
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = fx[k][0] * fh[k][0] - fx[k][1] * fh[k][1];
    const double im = fx[k][0] * fh[k][1] + fx[k][1] * fh[k][0];
    fx[k][0] = re;
    fx[k][1] = im;
  }
  fftw_execute(inv);
  std::vector<double> out(in, in + out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;

  {
    std::lock_guard lock(g_fftw_planner);
    fftw_destroy_plan(fwd_x);
    fftw_destroy_plan(fwd_h);
    fftw_destroy_plan(inv);
  }
  fftw_free(in);
  fftw_free(fx);
  fftw_free(fh);
  return out;
}

AudioBuffer convolve_raw(const AudioBuffer& signal, const AudioBuffer& rir) {
  if (signal.sample_rate != rir.sample_rate) {
    fail(ErrorKind::kValidation,
         "convolution sample-rate mismatch: " + std::to_string(signal.sample_rate) +
             " vs " + std::to_string(rir.sample_rate));
  }
  AudioBuffer out{{}, signal.sample_rate};
  if (signal.samples.empty() || rir.samples.empty()) return out;
  // Short kernels are cheaper in the time domain.
  if (signal.samples.size() * rir.samples.size() <= (1u << 16)) {
    out.samples.assign(signal.samples.size() + rir.samples.size() - 1, 0.0);
    for (std::size_t i = 0; i < signal.samples.size(); ++i) {
      for (std::size_t j = 0; j < rir.samples.size(); ++j) {
        out.samples[i + j] += signal.samples[i] * rir.samples[j];
      }
    }
  } else {
    out.samples = fft_convolve(signal.samples, rir.samples);
  }
  return out;
}

AudioBuffer convolve(const AudioBuffer& signal, const AudioBuffer& rir) {
  AudioBuffer out = convolve_raw(signal, rir);
  const double target = peak(signal.samples);
  const double got = peak(out.samples);
  if (got > 0.0) {
    const double g = target / got;
    for (double& v : out.samples) v *= g;
  }
  return out;
}

RoomSet load_roomset(const std::string& directory) {
  RoomSet set;
  if (!fs::is_directory(directory)) {
    fail(ErrorKind::kIo, "RIR directory '" + directory + "' does not exist");
  }
  std::vector<fs::path> rooms;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_directory()) rooms.push_back(entry.path());
  }
  std::sort(rooms.begin(), rooms.end());
  for (const auto& room : rooms) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(room)) {
      if (entry.is_regular_file() && entry.path().extension() == ".wav") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    auto& responses = set.rooms[room.filename().string()];
    for (const auto& f : files) responses.push_back(read_wav_file(f.string()));
  }
  return set;
}

std::optional<RirAssignment> assign_rirs(const RoomSet& rooms, Rng& rng,
                                         double fraction) {
  const double u = rng.uniform();
  if (rooms.rooms.empty() || !(u < fraction)) return std::nullopt;
  auto it = rooms.rooms.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng.index(rooms.rooms.size())));
  const auto& [room_id, responses] = *it;
  if (responses.size() < 2) {
    fail(ErrorKind::kValidation, "room '" + room_id +
                                     "' has fewer than 2 impulse responses");
  }
  const std::size_t p0 = rng.index(responses.size());
  std::size_t p1 = rng.index(responses.size() - 1);
  if (p1 >= p0) ++p1;
  return RirAssignment{room_id, {p0, p1}, {responses[p0], responses[p1]}};
}

ConversationAnnotation plan_annotation(const DialoguePlan& plan) {
  ConversationAnnotation ann;
  ann.conversation_id = plan.dialogue_id;
  ann.segments.reserve(plan.events.size());
  for (const auto& e : plan.events) {
    ann.segments.push_back({e.speaker, e.start, e.end(), std::nullopt});
  }
  ann.canonicalize();
  return ann;
}

std::size_t placement_sample(double start, int sample_rate) {
  return static_cast<std::size_t>(std::llround(start * sample_rate));
}

void mix_into(std::vector<double>& mix, std::span<const double> source,
              std::size_t offset) {
  if (offset >= mix.size()) return;
  const std::size_t n = std::min(source.size(), mix.size() - offset);
  for (std::size_t i = 0; i < n; ++i) mix[offset + i] += source[i];
}

RenderedDialogue render_plan(const DialoguePlan& plan,
                             const UtteranceLookup& lookup,
                             const std::optional<RirAssignment>& rirs) {
  if (plan.events.empty()) {
    fail(ErrorKind::kValidation, "plan '" + plan.dialogue_id + "' has no events");
  }
  RenderedDialogue out;
  std::optional<int> rate;
  std::vector<double> mix;
  std::vector<std::string> texts;
  texts.reserve(plan.events.size());

  for (const auto& e : plan.events) {
    AudioBuffer audio = lookup.audio(e.utterance_id);
    if (!rate) {
      rate = audio.sample_rate;
      mix.assign(samples_for(plan.length(), *rate), 0.0);
    } else if (audio.sample_rate != *rate) {
      fail(ErrorKind::kValidation,
           "utterance '" + e.utterance_id + "' has sample rate " +
               std::to_string(audio.sample_rate) + ", expected " +
               std::to_string(*rate));
    }
    if (rirs) {
      const int role = e.speaker == plan.pair[0] ? 0 : 1;
      audio = convolve(audio, rirs->responses[role]);
    }
    mix_into(mix, audio.samples, placement_sample(e.start, *rate));
    texts.push_back(lookup.text ? lookup.text(e.utterance_id) : std::string());
  }

  out.peak_before_rescale = peak(mix);
  if (out.peak_before_rescale > 1.0) {
    out.rescale_factor = 0.99 / out.peak_before_rescale;
    for (double& v : mix) v *= out.rescale_factor;
    warn("dialogue '" + plan.dialogue_id + "': mix peak " +
         std::to_string(out.peak_before_rescale) + " rescaled by " +
         std::to_string(out.rescale_factor));
  }
  out.audio = AudioBuffer{std::move(mix), *rate};
  out.rir_applied = rirs.has_value();
  if (rirs) out.room_id = rirs->room_id;

  out.annotation.conversation_id = plan.dialogue_id;
  for (std::size_t i = 0; i < plan.events.size(); ++i) {
    const auto& e = plan.events[i];
    out.annotation.segments.push_back({e.speaker, e.start, e.end(), texts[i]});
  }
  out.annotation.canonicalize();
  return out;
}

std::vector<TrainingChunk> chunk_dialogue(const AudioBuffer& audio,
                                          const ConversationAnnotation& annotation,
                                          double window) {
  if (!(window > 0.0)) fail(ErrorKind::kValidation, "chunk window must be > 0");
  const auto chunk_len =
      static_cast<std::size_t>(std::llround(window * audio.sample_rate));
  if (chunk_len == 0) fail(ErrorKind::kValidation, "chunk window below one sample");
  const std::size_t total = audio.samples.size();
  std::size_t n_chunks = (total + chunk_len - 1) / chunk_len;
  for (const auto& seg : annotation.segments) {
    n_chunks = std::max(n_chunks,
                        static_cast<std::size_t>(seg.start / window) + 1);
  }

  std::vector<TrainingChunk> chunks(n_chunks);
  std::vector<const SegmentAnnotation*> last(n_chunks, nullptr);
  for (std::size_t k = 0; k < n_chunks; ++k) {
    auto& c = chunks[k];
    c.chunk_index = k;
    c.audio.sample_rate = audio.sample_rate;
    const std::size_t b = std::min(total, k * chunk_len);
    const std::size_t e = std::min(total, (k + 1) * chunk_len);
    c.audio.samples.assign(audio.samples.begin() + static_cast<std::ptrdiff_t>(b),
                           audio.samples.begin() + static_cast<std::ptrdiff_t>(e));
  }
  // Segments are in canonical start order.
  for (const auto& seg : annotation.segments) {
    const auto k = static_cast<std::size_t>(seg.start / window);
    auto& c = chunks[k];
    if (last[k] && last[k]->speaker != seg.speaker) {
      c.text += c.text.empty() ? "" : " ";
      c.text += kSpeakerChangeToken;
      ++c.sc_count;
    }
    const std::string text = seg.text.value_or("");
    if (!text.empty()) {
      if (!c.text.empty()) c.text += ' ';
      c.text += text;
    }
    if (seg.end > static_cast<double>(k + 1) * window) ++c.crossing_utterances;
    last[k] = &seg;
  }
  return chunks;
}

std::string transcripts_tsv(const std::string& dialogue_id,
                            const std::vector<TrainingChunk>& chunks) {
  std::string out;
  for (const auto& c : chunks) {
    out += dialogue_id + '\t' + std::to_string(c.chunk_index) + '\t' + c.text + '\n';
  }
  return out;
}

GroundTruth emit_ground_truth(const RenderedDialogue& rendered,
                              const std::vector<TrainingChunk>& chunks) {
  return {write_rttm(rendered.annotation),
          write_segment_json({rendered.annotation}),
          transcripts_tsv(rendered.annotation.conversation_id, chunks)};
}

}  // namespace convsim
