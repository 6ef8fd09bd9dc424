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

#include "convsim/simulate.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <utility>

#include <json.hpp>

#include "convsim/error.hpp"
#include "detail/json_util.hpp"

namespace convsim {

using nlohmann::json;

std::string_view to_string(SimulationMode mode) {
  switch (mode) {
    case SimulationMode::kSasc: return "sasc";
    case SimulationMode::kCSasc: return "csasc";
    case SimulationMode::kNaiveFixedGap: return "naive";
    case SimulationMode::kNoConcat: return "noconcat";
  }
  return "?";
}

SimulationMode parse_simulation_mode(std::string_view text) {
  if (text == "sasc") return SimulationMode::kSasc;
  if (text == "csasc") return SimulationMode::kCSasc;
  if (text == "naive") return SimulationMode::kNaiveFixedGap;
  if (text == "noconcat") return SimulationMode::kNoConcat;
  fail(ErrorKind::kValidation,
       "unknown simulation mode '" + std::string(text) +
           "' (expected sasc, csasc, naive or noconcat)");
}

void SimulationConfig::validate() const {
  if (pairs_limit < 1 || pairs_limit > 5) {
    fail(ErrorKind::kValidation, "pairs limit must be in [1, 5], got " +
                                     std::to_string(pairs_limit));
  }
  if (!(d_min > 0.0) || !(d_min < d_max)) {
    fail(ErrorKind::kValidation, "duration bounds require 0 < d_min < d_max");
  }
  if (!(fixed_gap > 0.0)) fail(ErrorKind::kValidation, "fixed gap must be > 0");
  if (!(clamp_min_start_delta > 0.0)) {
    fail(ErrorKind::kValidation, "clamp_min_start_delta must be > 0");
  }
}

double DialoguePlan::length() const {
  double len = 0.0;
  for (const auto& e : events) len = std::max(len, e.end());
  return len;
}

std::string plan_to_json(const DialoguePlan& plan) {
  json events = json::array();
  for (const auto& e : plan.events) {
    events.push_back({{"n", e.n},
                      {"speaker", e.speaker},
                      {"utterance_id", e.utterance_id},
                      {"gap_before", e.gap_before},
                      {"start", e.start},
                      {"duration", e.duration}});
  }
  json doc = {{"dialogue_id", plan.dialogue_id},
              {"mode", to_string(plan.mode)},
              {"seed", plan.seed},
              {"pair", plan.pair},
              {"events", events}};
  return doc.dump(2) + "\n";
}

DialoguePlan plan_from_json(std::string_view text) {
  const json doc = detail::parse_json(text);
  DialoguePlan plan;
  plan.dialogue_id = detail::require<std::string>(doc, "dialogue_id", "$");
  plan.mode = parse_simulation_mode(detail::require<std::string>(doc, "mode", "$"));
  plan.seed = detail::require<std::uint64_t>(doc, "seed", "$");
  const auto& pair = detail::require_field(doc, "pair", "$");
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
      !pair[1].is_string()) {
    fail(ErrorKind::kSchema, "$.pair: expected two speaker ids");
  }
  plan.pair = {pair[0].get<std::string>(), pair[1].get<std::string>()};
  const auto& events = detail::require_field(doc, "events", "$");
  if (!events.is_array()) fail(ErrorKind::kSchema, "$.events: expected array");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string path = "$.events[" + std::to_string(i) + "]";
    const auto& e = events[i];
    PlanEvent ev;
    ev.n = detail::require<std::size_t>(e, "n", path);
    ev.speaker = detail::require<std::string>(e, "speaker", path);
    ev.utterance_id = detail::require<std::string>(e, "utterance_id", path);
    ev.gap_before = detail::require<double>(e, "gap_before", path);
    ev.start = detail::require<double>(e, "start", path);
    ev.duration = detail::require<double>(e, "duration", path);
    if (!(ev.duration > 0.0) || ev.start < 0.0) {
      fail(ErrorKind::kValidation, path + ": invalid start or duration");
    }
    plan.events.push_back(std::move(ev));
  }
  return plan;
}

// --- pairing -----------------------------------------------------------------

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.index(i)]);
  }
}

std::pair<std::string, std::string> pair_key(const std::string& a,
                                             const std::string& b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

PairingResult make_pairs(std::vector<std::string> speakers, int pairs_limit,
                         Rng& rng) {
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()), speakers.end());
  if (speakers.size() < 2) {
    fail(ErrorKind::kValidation, "pairing needs at least 2 speakers");
  }
  if (pairs_limit < 1) fail(ErrorKind::kValidation, "pairs limit must be >= 1");

  constexpr int kMaxShuffles = 1000;
  PairingResult out;
  std::set<std::pair<std::string, std::string>> used;
  std::set<std::string> unpaired;
  for (int round = 1; round <= pairs_limit; ++round) {
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxShuffles && !accepted; ++attempt) {
      auto order = speakers;
      shuffle(order, rng);
      bool clash = false;
      for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
        if (used.count(pair_key(order[i], order[i + 1]))) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
        used.insert(pair_key(order[i], order[i + 1]));
        out.pairs.push_back({order[i], order[i + 1], round});
      }
      if (order.size() % 2 == 1) unpaired.insert(order.back());
      accepted = true;
    }
    if (!accepted) {
      fail(ErrorKind::kValidation,
           "cannot form pairing round " + std::to_string(round) + " of " +
               std::to_string(pairs_limit) + " for " +
               std::to_string(speakers.size()) +
               " speakers without repeating a pair");
    }
  }
  out.unpaired.assign(unpaired.begin(), unpaired.end());
  return out;
}

TurnSequence grow_turn_sequence(const TransitionMatrix& matrix,
                                std::array<std::size_t, 2> pool_sizes,
                                int initial, Rng& rng) {
  TurnSequence seq{initial};
  std::array<std::size_t, 2> used{};
  used.at(static_cast<std::size_t>(initial)) = 1;
  for (;;) {
    const int next = matrix.next(seq.back(), rng);
    if (used[next] + 1 > pool_sizes[next]) break;
    ++used[next];
    seq.push_back(next);
  }
  return seq;
}

std::uint64_t stream_seed(std::uint64_t dialogue_seed, Stream stream) {
  return derive_seed(dialogue_seed, static_cast<std::uint64_t>(stream));
}

std::uint64_t dialogue_seed(std::uint64_t corpus_seed, const SpeakerPair& pair) {
  std::uint64_t s = derive_seed(corpus_seed, hash_string(pair.a));
  s = derive_seed(s, hash_string(pair.b));
  return derive_seed(s, static_cast<std::uint64_t>(pair.round));
}

// --- planning ----------------------------------------------------------------

namespace {

const std::vector<UtteranceEntry>& speaker_pool(const UtterancePool& pool,
                                                const std::string& speaker) {
  auto it = pool.by_speaker.find(speaker);
  if (it == pool.by_speaker.end()) {
    fail(ErrorKind::kValidation, "speaker '" + speaker + "' not in pool");
  }
  return it->second;
}

}  // namespace

DialoguePlan plan_dialogue(const SpeakerPair& pair, const UtterancePool& pool,
                           const StatsModel* model,
                           const TransitionMatrix& matrix,
                           const SimulationConfig& config, std::uint64_t seed,
                           std::string dialogue_id) {
  const bool statistical = config.mode == SimulationMode::kSasc ||
                           config.mode == SimulationMode::kCSasc;
  if (config.mode == SimulationMode::kNoConcat) {
    fail(ErrorKind::kInternal, "plan_dialogue called in no-concat mode");
  }
  if (statistical) {
    if (!model) fail(ErrorKind::kValidation, "simulation mode needs a stats model");
    const ModelMode want = config.mode == SimulationMode::kSasc
                               ? ModelMode::kSasc
                               : ModelMode::kCSasc;
    if (model->mode != want) {
      fail(ErrorKind::kValidation,
           "stats model mode '" + std::string(to_string(model->mode)) +
               "' does not match simulation mode '" +
               std::string(to_string(config.mode)) + "'");
    }
  }

  const std::array<const std::vector<UtteranceEntry>*, 2> pools{
      &speaker_pool(pool, pair.a), &speaker_pool(pool, pair.b)};
  Rng turns(stream_seed(seed, Stream::kTurns));
  Rng baseline(stream_seed(seed, Stream::kBaseline));
  Rng residual(stream_seed(seed, Stream::kResidual));

  const int initial = static_cast<int>(turns.index(2));
  const TurnSequence roles = grow_turn_sequence(
      matrix, {pools[0]->size(), pools[1]->size()}, initial, turns);
  if (pools[roles[0]]->empty()) {
    fail(ErrorKind::kInternal, "dialogue '" + dialogue_id +
                                   "': scheduled speaker has no utterances");
  }

  DialoguePlan plan;
  plan.dialogue_id = std::move(dialogue_id);
  plan.mode = config.mode;
  plan.seed = seed;
  plan.pair = {pair.a, pair.b};
  plan.events.reserve(roles.size());

  std::array<std::size_t, 2> cursor{};
  // Per-role baselines, sampled on first use and frozen for the dialogue.
  std::array<std::optional<double>, 2> mu_same, mu_diff;

  for (std::size_t k = 0; k < roles.size(); ++k) {
    const int role = roles[k];
    const auto& utt = (*pools[role])[cursor[role]++];
    PlanEvent ev;
    ev.n = k + 1;
    ev.speaker = utt.speaker;
    ev.utterance_id = utt.utterance_id;
    ev.duration = utt.duration;
    if (k == 0) {
      plan.events.push_back(std::move(ev));
      continue;
    }
    const auto t = role == roles[k - 1] ? TransitionType::kSame
                                        : TransitionType::kDiff;
    if (config.mode == SimulationMode::kNaiveFixedGap) {
      ev.gap_before = config.fixed_gap;
    } else {
      auto& mu = (t == TransitionType::kSame ? mu_same : mu_diff)[role];
      if (!mu) mu = model->mean_kde(t).sample(baseline);
      const std::optional<double> d_n =
          config.mode == SimulationMode::kCSasc
              ? std::optional<double>(utt.duration)
              : std::nullopt;
      ev.gap_before = *mu + model->sample_residual(t, d_n, residual);
    }
    const auto& prev = plan.events.back();
    const double proposed = prev.end() + ev.gap_before;
    ev.start = std::max({proposed, prev.start + config.clamp_min_start_delta, 0.0});
    if (ev.start != proposed) ++plan.clamp_count;
    plan.events.push_back(std::move(ev));
  }
  return plan;
}

std::vector<DialoguePlan> plan_no_concat(const SpeakerPair& pair,
                                         const UtterancePool& pool,
                                         const SimulationConfig& config,
                                         std::string_view id_prefix) {
  std::vector<DialoguePlan> out;
  std::size_t k = 0;
  for (const auto* speaker : {&pair.a, &pair.b}) {
    for (const auto& utt : speaker_pool(pool, *speaker)) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_u%05zu", ++k);
      DialoguePlan plan;
      plan.dialogue_id = std::string(id_prefix) + suffix;
      plan.mode = SimulationMode::kNoConcat;
      plan.seed = derive_seed(dialogue_seed(config.seed, pair), k);
      plan.pair = {pair.a, pair.b};
      plan.events.push_back(
          {1, utt.speaker, utt.utterance_id, 0.0, 0.0, utt.duration});
      out.push_back(std::move(plan));
    }
  }
  return out;
}

CorpusResult simulate_corpus(const UtterancePool& manifest,
                             const StatsModel* model,
                             const SimulationConfig& config) {
  config.validate();
  FilterReport filter;
  const UtterancePool pool =
      filter_pool(manifest, config.d_min, config.d_max, &filter);

  std::vector<std::string> speakers;
  for (const auto& [s, entries] : pool.by_speaker) {
    if (!entries.empty()) speakers.push_back(s);
  }
  Rng pairing_rng(derive_seed(config.seed, hash_string("pairing")));
  const PairingResult pairing =
      make_pairs(speakers, config.pairs_limit, pairing_rng);
  const TransitionMatrix matrix =
      model ? model->transition : callhome_transition_matrix();

  CorpusResult result;
  auto& summary = result.summary;
  summary.unpaired_speakers = pairing.unpaired;
  summary.filtered_out = filter.dropped;
  std::set<std::string> used_speakers;

  for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
    const auto& pair = pairing.pairs[i];
    char id[32];
    std::snprintf(id, sizeof(id), "dlg%05zu", i);
    if (config.mode == SimulationMode::kNoConcat) {
      for (auto& p : plan_no_concat(pair, pool, config, id)) {
        result.plans.push_back(std::move(p));
      }
    } else {
      result.plans.push_back(plan_dialogue(pair, pool, model, matrix, config,
                                           dialogue_seed(config.seed, pair),
                                           id));
    }
    used_speakers.insert(pair.a);
    used_speakers.insert(pair.b);
  }

  summary.dialogues = result.plans.size();
  summary.speakers = used_speakers.size();
  double total_utts = 0.0, sum_mean_dur = 0.0, sum_len = 0.0, seconds = 0.0;
  for (const auto& plan : result.plans) {
    double dur = 0.0;
    for (const auto& e : plan.events) dur += e.duration;
    total_utts += static_cast<double>(plan.events.size());
    sum_mean_dur += dur / static_cast<double>(plan.events.size());
    sum_len += plan.length();
    seconds += dur;
    summary.clamped_gaps += plan.clamp_count;
  }
  if (!result.plans.empty()) {
    const auto n = static_cast<double>(result.plans.size());
    summary.mean_utterances = total_utts / n;
    summary.mean_utterance_duration = sum_mean_dur / n;
    summary.mean_dialogue_length = sum_len / n;
  }
  summary.total_audio_hours = seconds / 3600.0;
  if (summary.clamped_gaps > 0) {
    warn(std::to_string(summary.clamped_gaps) +
         " gap(s) clamped so that no utterance starts before its predecessor");
  }
  return result;
}

std::string corpus_summary_json(const CorpusSummary& s) {
  json doc = {{"dialogues", s.dialogues},
              {"speakers", s.speakers},
              {"mean_utterances_per_dialogue", s.mean_utterances},
              {"mean_utterance_duration", s.mean_utterance_duration},
              {"mean_dialogue_length", s.mean_dialogue_length},
              {"total_audio_hours", s.total_audio_hours},
              {"clamped_gaps", s.clamped_gaps},
              {"unpaired_speakers", s.unpaired_speakers},
              {"filtered_out_utterances", s.filtered_out}};
  return doc.dump(2) + "\n";
}

}  // namespace convsim
