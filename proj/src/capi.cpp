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

#include "convsim/convsim.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "convsim/annotations.hpp"
#include "convsim/error.hpp"
#include "convsim/metrics.hpp"
#include "convsim/model.hpp"
#include "convsim/render.hpp"
#include "convsim/simulate.hpp"
#include "detail/json_util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

struct convsim_model {
  convsim::StatsModel model;
};

struct convsim_manifest {
  convsim::UtterancePool pool;
  fs::path base_dir;
};

struct convsim_roomset {
  convsim::RoomSet rooms;
};

struct convsim_corpus {
  convsim::CorpusResult result;
};

namespace {

constexpr const char* kVersion = "0.1.0";

thread_local std::string g_last_error;

convsim_status to_status(convsim::ErrorKind kind) {
  switch (kind) {
    case convsim::ErrorKind::kParse: return CONVSIM_ERR_PARSE;
    case convsim::ErrorKind::kSchema: return CONVSIM_ERR_SCHEMA;
    case convsim::ErrorKind::kValidation: return CONVSIM_ERR_VALIDATION;
    case convsim::ErrorKind::kDomain: return CONVSIM_ERR_DOMAIN;
    case convsim::ErrorKind::kUnsupported: return CONVSIM_ERR_UNSUPPORTED;
    case convsim::ErrorKind::kIo: return CONVSIM_ERR_IO;
    case convsim::ErrorKind::kInternal: return CONVSIM_ERR_INTERNAL;
  }
  return CONVSIM_ERR_INTERNAL;
}

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <typename F>
convsim_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return CONVSIM_OK;
  } catch (const convsim::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const NullArgument& e) {
    g_last_error = e.what();
    return CONVSIM_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CONVSIM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return CONVSIM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error: unknown exception";
    return CONVSIM_ERR_INTERNAL;
  }
}

void require_arg(const void* p, const char* name) {
  if (!p) throw NullArgument(std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void set_out(char** out, const std::string& s) {
  require_arg(out, "out");
  *out = dup_string(s);
}

// Parses an options object and rejects keys outside `allowed`.
json parse_options(const char* text, std::initializer_list<const char*> allowed) {
  if (!text || !*text) return json::object();
  json opts = convsim::detail::parse_json(text);
  if (!opts.is_object()) {
    convsim::fail(convsim::ErrorKind::kSchema, "options: expected an object");
  }
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : opts.items()) {
    if (!keys.count(key)) {
      convsim::fail(convsim::ErrorKind::kSchema, "options." + key + ": unknown option");
    }
  }
  return opts;
}

template <typename T>
T option(const json& opts, const char* key, T fallback) {
  return convsim::detail::optional<T>(opts, key, "options").value_or(fallback);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) convsim::fail(convsim::ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) convsim::fail(convsim::ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) convsim::fail(convsim::ErrorKind::kIo, "write failed: " + path.string());
}

void create_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    convsim::fail(convsim::ErrorKind::kIo,
                  "cannot create directory " + dir.string() + ": " + ec.message());
  }
}

std::vector<convsim::ConversationAnnotation> parse_documents(
    const char* const* documents, size_t count, const char* format) {
  require_arg(documents, "documents");
  require_arg(format, "format");
  const std::string fmt = format;
  if (fmt != "rttm" && fmt != "json") {
    convsim::fail(convsim::ErrorKind::kUnsupported,
                  "unknown annotation format '" + fmt + "' (expected rttm or json)");
  }
  std::vector<convsim::ConversationAnnotation> all;
  for (size_t i = 0; i < count; ++i) {
    require_arg(documents[i], "document");
    auto parsed = fmt == "rttm" ? convsim::parse_rttm(documents[i])
                                : convsim::parse_segment_json(documents[i]);
    for (auto& a : parsed) all.push_back(std::move(a));
  }
  return all;
}

json residual_summary(const convsim::ResidualModel& r) {
  if (const auto* kde = std::get_if<convsim::Kde1D>(&r)) {
    return {{"bandwidth", kde->bandwidth()}, {"samples", kde->samples().size()}};
  }
  const auto& c = std::get<convsim::ConditionalResidual>(r);
  return {{"h_r", c.kde.h_r()},
          {"h_d", c.kde.h_d()},
          {"lambda", c.transform.lambda()},
          {"pairs", c.kde.pairs().size()}};
}

std::string chunk_file_name(std::size_t k) {
  return "chunk_" + std::to_string(k) + ".wav";
}

// Writes chunks/ and transcripts.tsv into `dir`; returns the file names.
std::vector<std::string> write_chunks(const fs::path& dir,
                                      const convsim::AudioBuffer& audio,
                                      const convsim::ConversationAnnotation& ann,
                                      double window, json* report) {
  const auto chunks = convsim::chunk_dialogue(audio, ann, window);
  const fs::path chunk_dir = dir / "chunks";
  std::error_code ec;
  fs::remove_all(chunk_dir, ec);
  create_dirs(chunk_dir);
  std::vector<std::string> files;
  json listing = json::array();
  for (const auto& c : chunks) {
    const std::string name = chunk_file_name(c.chunk_index);
    convsim::write_wav_file((chunk_dir / name).string(), c.audio);
    files.push_back("chunks/" + name);
    listing.push_back({{"chunk_index", c.chunk_index},
                       {"sc_count", c.sc_count},
                       {"crossing_utterances", c.crossing_utterances},
                       {"samples", c.audio.samples.size()}});
  }
  write_text_file(dir / "transcripts.tsv",
                  convsim::transcripts_tsv(ann.conversation_id, chunks));
  files.push_back("transcripts.tsv");
  (*report)["chunks"] = std::move(listing);
  (*report)["window"] = window;
  return files;
}

}  // namespace

extern "C" {

const char* convsim_version(void) { return kVersion; }

const char* convsim_last_error(void) { return g_last_error.c_str(); }

const char* convsim_status_name(convsim_status status) {
  switch (status) {
    case CONVSIM_OK: return "ok";
    case CONVSIM_ERR_PARSE: return "parse error";
    case CONVSIM_ERR_SCHEMA: return "schema error";
    case CONVSIM_ERR_VALIDATION: return "validation error";
    case CONVSIM_ERR_DOMAIN: return "domain error";
    case CONVSIM_ERR_UNSUPPORTED: return "unsupported format";
    case CONVSIM_ERR_IO: return "i/o error";
    case CONVSIM_ERR_INTERNAL: return "internal error";
    case CONVSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
  }
  return "unknown status";
}

void convsim_string_free(char* s) { std::free(s); }

convsim_status convsim_model_fit(const char* const* documents, size_t count,
                                 const char* format, const char* options_json,
                                 convsim_model** out) {
  return guarded([&] {
    require_arg(out, "out");
    *out = nullptr;
    const json opts = parse_options(
        options_json,
        {"mode", "alpha", "floor_mu", "floor_r", "floor_d", "min_obs", "source"});
    const auto annots = parse_documents(documents, count, format);
    convsim::FitParams p;
    p.alpha = option(opts, "alpha", p.alpha);
    p.floor_mu = option(opts, "floor_mu", p.floor_mu);
    p.floor_r = option(opts, "floor_r", p.floor_r);
    p.floor_d = option(opts, "floor_d", p.floor_d);
    p.min_obs = option<std::size_t>(opts, "min_obs", p.min_obs);
    p.source = option<std::string>(opts, "source", p.source);
    const auto mode =
        convsim::parse_model_mode(option<std::string>(opts, "mode", "sasc"));
    *out = new convsim_model{convsim::fit_stats_model(annots, mode, p)};
  });
}

convsim_status convsim_model_from_json(const char* text, convsim_model** out) {
  return guarded([&] {
    require_arg(out, "out");
    require_arg(text, "json");
    *out = nullptr;
    *out = new convsim_model{convsim::stats_model_from_json(text)};
  });
}

convsim_status convsim_model_to_json(const convsim_model* model, char** out) {
  return guarded([&] {
    require_arg(model, "model");
    set_out(out, convsim::stats_model_to_json(model->model));
  });
}

convsim_status convsim_model_summary(const convsim_model* model, char** out) {
  return guarded([&] {
    require_arg(model, "model");
    const auto& m = model->model;
    const auto& c = m.meta.counts;
    const auto& probs = m.transition.probs();
    const auto pi = m.transition.stationary();
    json j = {
        {"mode", convsim::to_string(m.mode)},
        {"source", m.meta.source},
        {"overlap_ratio", m.meta.overlap_ratio},
        {"transition",
         {{"states", {"A", "B"}},
          {"probs", {{probs[0][0], probs[0][1]}, {probs[1][0], probs[1][1]}}},
          {"stationary", {pi[0], pi[1]}}}},
        {"counts",
         {{"conversations", c.conversations},
          {"observations_same", c.observations_same},
          {"observations_diff", c.observations_diff},
          {"speakers_same", c.speakers_same},
          {"speakers_diff", c.speakers_diff},
          {"residuals_same", c.residuals_same},
          {"residuals_diff", c.residuals_diff},
          {"omitted_speakers", c.omitted_speakers}}},
        {"components",
         {{"mean_same", {{"bandwidth", m.mean_same.bandwidth()},
                         {"samples", m.mean_same.samples().size()}}},
          {"mean_diff", {{"bandwidth", m.mean_diff.bandwidth()},
                         {"samples", m.mean_diff.samples().size()}}},
          {"residual_same", residual_summary(m.residual_same)},
          {"residual_diff", residual_summary(m.residual_diff)}}}};
    set_out(out, j.dump(2));
  });
}

convsim_status convsim_model_density_curves(const convsim_model* model,
                                            const char* options_json,
                                            char** out) {
  return guarded([&] {
    require_arg(model, "model");
    const json opts = parse_options(options_json, {"points", "x_min", "x_max", "durations"});
    convsim::CurveGrid grid;
    grid.points = option<std::size_t>(opts, "points", grid.points);
    grid.x_min = convsim::detail::optional<double>(opts, "x_min", "options");
    grid.x_max = convsim::detail::optional<double>(opts, "x_max", "options");
    std::vector<double> durations;
    if (auto it = opts.find("durations"); it != opts.end()) {
      if (!it->is_array()) {
        convsim::fail(convsim::ErrorKind::kSchema, "options.durations: expected an array");
      }
      for (const auto& d : *it) {
        if (!d.is_number()) {
          convsim::fail(convsim::ErrorKind::kSchema, "options.durations: expected numbers");
        }
        durations.push_back(d.get<double>());
      }
    }
    json arr = json::array();
    for (const auto& curve : convsim::density_curves(model->model, grid, durations)) {
      arr.push_back({{"name", curve.name}, {"csv", convsim::curve_csv(curve)}});
    }
    set_out(out, arr.dump());
  });
}

convsim_status convsim_model_p_overlap(const convsim_model* model,
                                       const char* transition, double speaker_mu,
                                       double duration, double* out) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(transition, "transition");
    require_arg(out, "out");
    const std::string t = transition;
    if (t != "same" && t != "diff") {
      convsim::fail(convsim::ErrorKind::kValidation,
                    "transition must be 'same' or 'diff', got '" + t + "'");
    }
    std::optional<double> d;
    if (duration >= 0.0) d = duration;
    *out = convsim::p_overlap(
        model->model,
        t == "same" ? convsim::TransitionType::kSame : convsim::TransitionType::kDiff,
        speaker_mu, d);
  });
}

void convsim_model_free(convsim_model* model) { delete model; }

convsim_status convsim_observations_csv(const char* const* documents,
                                        size_t count, const char* format,
                                        char** out) {
  return guarded([&] {
    std::vector<convsim::GapObservation> obs;
    for (const auto& a : parse_documents(documents, count, format)) {
      auto g = convsim::extract_gaps(a);
      obs.insert(obs.end(), g.begin(), g.end());
    }
    set_out(out, convsim::observations_csv(obs));
  });
}

convsim_status convsim_manifest_load(const char* manifest_json,
                                     const char* base_dir,
                                     convsim_manifest** out) {
  return guarded([&] {
    require_arg(out, "out");
    require_arg(manifest_json, "manifest_json");
    *out = nullptr;
    auto m = std::make_unique<convsim_manifest>();
    m->pool = convsim::load_manifest(manifest_json);
    if (base_dir) m->base_dir = base_dir;
    *out = m.release();
  });
}

convsim_status convsim_manifest_duration_histogram(const convsim_manifest* manifest,
                                                   double bin_width, char** out) {
  return guarded([&] {
    require_arg(manifest, "manifest");
    if (!(bin_width > 0.0)) {
      convsim::fail(convsim::ErrorKind::kDomain, "histogram bin width must be > 0");
    }
    std::map<long long, std::size_t> bins;
    for (const auto& [spk, entries] : manifest->pool.by_speaker) {
      for (const auto& e : entries) {
        ++bins[static_cast<long long>(std::floor(e.duration / bin_width))];
      }
    }
    std::string csv = "duration,count\n";
    char buf[64];
    for (const auto& [bin, n] : bins) {
      std::snprintf(buf, sizeof buf, "%.6g,%zu\n",
                    static_cast<double>(bin) * bin_width, n);
      csv += buf;
    }
    set_out(out, csv);
  });
}

void convsim_manifest_free(convsim_manifest* manifest) { delete manifest; }

convsim_status convsim_simulate(const convsim_manifest* manifest,
                                const convsim_model* model,
                                const char* config_json, convsim_corpus** out) {
  return guarded([&] {
    require_arg(out, "out");
    require_arg(manifest, "manifest");
    *out = nullptr;
    const json opts = parse_options(config_json,
                                    {"mode", "pairs", "seed", "d_min", "d_max",
                                     "fixed_gap", "clamp_min_start_delta"});
    convsim::SimulationConfig cfg;
    cfg.mode = convsim::parse_simulation_mode(option<std::string>(opts, "mode", "sasc"));
    cfg.pairs_limit = option(opts, "pairs", cfg.pairs_limit);
    cfg.seed = option(opts, "seed", cfg.seed);
    cfg.d_min = option(opts, "d_min", cfg.d_min);
    cfg.d_max = option(opts, "d_max", cfg.d_max);
    cfg.fixed_gap = option(opts, "fixed_gap", cfg.fixed_gap);
    cfg.clamp_min_start_delta =
        option(opts, "clamp_min_start_delta", cfg.clamp_min_start_delta);
    *out = new convsim_corpus{convsim::simulate_corpus(
        manifest->pool, model ? &model->model : nullptr, cfg)};
  });
}

size_t convsim_corpus_plan_count(const convsim_corpus* corpus) {
  return corpus ? corpus->result.plans.size() : 0;
}

convsim_status convsim_corpus_plan_id(const convsim_corpus* corpus, size_t index,
                                      char** out) {
  return guarded([&] {
    require_arg(corpus, "corpus");
    if (index >= corpus->result.plans.size()) {
      convsim::fail(convsim::ErrorKind::kValidation, "plan index out of range");
    }
    set_out(out, corpus->result.plans[index].dialogue_id);
  });
}

convsim_status convsim_corpus_plan_json(const convsim_corpus* corpus,
                                        size_t index, char** out) {
  return guarded([&] {
    require_arg(corpus, "corpus");
    if (index >= corpus->result.plans.size()) {
      convsim::fail(convsim::ErrorKind::kValidation, "plan index out of range");
    }
    set_out(out, convsim::plan_to_json(corpus->result.plans[index]));
  });
}

convsim_status convsim_corpus_summary_json(const convsim_corpus* corpus,
                                           char** out) {
  return guarded([&] {
    require_arg(corpus, "corpus");
    set_out(out, convsim::corpus_summary_json(corpus->result.summary));
  });
}

void convsim_corpus_free(convsim_corpus* corpus) { delete corpus; }

convsim_status convsim_roomset_load(const char* directory, convsim_roomset** out) {
  return guarded([&] {
    require_arg(out, "out");
    require_arg(directory, "directory");
    *out = nullptr;
    *out = new convsim_roomset{convsim::load_roomset(directory)};
  });
}

void convsim_roomset_free(convsim_roomset* rooms) { delete rooms; }

convsim_status convsim_render_plan(const char* plan_json,
                                   const convsim_manifest* manifest,
                                   const convsim_roomset* rooms,
                                   const char* options_json, const char* out_dir,
                                   char** report) {
  return guarded([&] {
    require_arg(plan_json, "plan_json");
    require_arg(manifest, "manifest");
    require_arg(out_dir, "out_dir");
    const json opts =
        parse_options(options_json, {"rir_fraction", "sample_rate", "chunk", "window"});
    const double fraction = option(opts, "rir_fraction", 0.4);
    const int rate = option(opts, "sample_rate", 16000);
    const bool chunk = option(opts, "chunk", true);
    const double window = option(opts, "window", convsim::kDefaultChunkSeconds);
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      convsim::fail(convsim::ErrorKind::kDomain, "rir_fraction must be in [0, 1]");
    }
    if (rate <= 0) convsim::fail(convsim::ErrorKind::kDomain, "sample_rate must be > 0");

    const convsim::DialoguePlan plan = convsim::plan_from_json(plan_json);
    const auto& pool = manifest->pool;
    convsim::UtteranceLookup lookup;
    lookup.audio = [&](const std::string& id) {
      const auto* entry = pool.find(id);
      if (!entry) {
        convsim::fail(convsim::ErrorKind::kValidation,
                      "utterance '" + id + "' is not in the manifest");
      }
      fs::path path = entry->audio_path;
      if (path.is_relative()) path = manifest->base_dir / path;
      convsim::AudioBuffer audio;
      try {
        audio = convsim::read_wav_file(path.string());
      } catch (const convsim::Error& e) {
        throw convsim::Error(e.kind(), "utterance '" + id + "': " + e.what());
      }
      if (audio.sample_rate != rate) {
        convsim::fail(convsim::ErrorKind::kValidation,
                      "utterance '" + id + "' has sample rate " +
                          std::to_string(audio.sample_rate) + ", expected " +
                          std::to_string(rate));
      }
      return audio;
    };
    lookup.text = [&](const std::string& id) { return pool.find(id)->text; };

    std::optional<convsim::RirAssignment> rirs;
    if (rooms) {
      convsim::Rng rng(convsim::stream_seed(plan.seed, convsim::Stream::kRir));
      rirs = convsim::assign_rirs(rooms->rooms, rng, fraction);
    }
    const auto rendered = convsim::render_plan(plan, lookup, rirs);

    const fs::path dir = fs::path(out_dir) / plan.dialogue_id;
    create_dirs(dir);
    convsim::write_wav_file((dir / "audio.wav").string(), rendered.audio);
    write_text_file(dir / "ref.rttm", convsim::write_rttm(rendered.annotation));
    write_text_file(dir / "segments.json",
                    convsim::write_segment_json({rendered.annotation}));
    json j = {{"dialogue_id", plan.dialogue_id},
              {"rir_applied", rendered.rir_applied},
              {"room_id", rendered.room_id ? json(*rendered.room_id) : json(nullptr)},
              {"peak_before_rescale", rendered.peak_before_rescale},
              {"rescale_factor", rendered.rescale_factor},
              {"sample_rate", rendered.audio.sample_rate},
              {"samples", rendered.audio.samples.size()},
              {"segments", rendered.annotation.segments.size()}};
    if (rirs) j["rir_positions"] = {rirs->positions[0], rirs->positions[1]};
    std::vector<std::string> files = {"audio.wav", "ref.rttm", "segments.json"};
    if (chunk) {
      auto more = write_chunks(dir, rendered.audio, rendered.annotation, window, &j);
      files.insert(files.end(), more.begin(), more.end());
    }
    j["files"] = files;
    if (report) *report = dup_string(j.dump());
  });
}

convsim_status convsim_chunk_dialogue(const char* dialogue_dir,
                                      const char* options_json, char** report) {
  return guarded([&] {
    require_arg(dialogue_dir, "dialogue_dir");
    const json opts = parse_options(options_json, {"window"});
    const double window = option(opts, "window", convsim::kDefaultChunkSeconds);
    const fs::path dir = dialogue_dir;
    const auto audio = convsim::read_wav_file((dir / "audio.wav").string());
    auto annots = convsim::parse_segment_json(read_text_file(dir / "segments.json"));
    if (annots.size() != 1) {
      convsim::fail(convsim::ErrorKind::kValidation,
                    (dir / "segments.json").string() +
                        ": expected exactly one conversation");
    }
    json j = {{"dialogue_id", annots[0].conversation_id}};
    j["files"] = write_chunks(dir, audio, annots[0], window, &j);
    if (report) *report = dup_string(j.dump());
  });
}

convsim_status convsim_evaluate(const char* reference, const char* hypothesis,
                                char** report, char** pairs_csv) {
  return guarded([&] {
    require_arg(reference, "reference");
    require_arg(report, "report");
    const auto pairs =
        hypothesis ? convsim::join_transcripts(convsim::parse_transcripts(reference),
                                               convsim::parse_transcripts(hypothesis))
                   : convsim::parse_scored_pairs(reference);
    const auto r = convsim::evaluate(pairs);
    std::string j = convsim::report_json(r);
    std::string csv = pairs_csv ? convsim::report_pairs_csv(r) : std::string();
    *report = dup_string(j);
    if (pairs_csv) *pairs_csv = dup_string(csv);
  });
}

convsim_status convsim_bootstrap(const char* reference, const char* hypothesis_a,
                                 const char* hypothesis_b, const char* options_json,
                                 char** result) {
  return guarded([&] {
    require_arg(reference, "reference");
    require_arg(hypothesis_a, "hypothesis_a");
    require_arg(hypothesis_b, "hypothesis_b");
    const json opts = parse_options(options_json, {"metric", "resamples", "alpha", "seed"});
    const auto metric = convsim::parse_metric(option<std::string>(opts, "metric", "wer"));
    const auto resamples = option<std::size_t>(opts, "resamples", 1000);
    const double alpha = option(opts, "alpha", 0.05);
    const auto seed = option<std::uint64_t>(opts, "seed", 0);
    const auto ref = convsim::parse_transcripts(reference);
    const auto a = convsim::join_transcripts(ref, convsim::parse_transcripts(hypothesis_a));
    const auto b = convsim::join_transcripts(ref, convsim::parse_transcripts(hypothesis_b));
    set_out(result, convsim::bootstrap_json(
                        convsim::bootstrap_compare(a, b, metric, resamples, alpha, seed)));
  });
}

}  // extern "C"
