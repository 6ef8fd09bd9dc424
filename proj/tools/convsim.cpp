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

// convsim command-line tool. Links only the C API.
//
// Every subcommand accepts --config FILE (a flat JSON object keyed by long
// option name, or a previous run.json); options given on the command line
// take precedence. Exit codes: 0 success, 2 input/validation error,
// 3 internal error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convsim/convsim.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void input_error(const std::string& msg) { throw CliError{kExitInput, msg}; }

void check(convsim_status st) {
  if (st == CONVSIM_OK) return;
  throw CliError{st == CONVSIM_ERR_INTERNAL ? kExitInternal : kExitInput,
                 convsim_last_error()};
}

// Owning wrapper for strings returned by the library.
struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { convsim_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
  T** out() { return &p; }
};
using Model = Handle<convsim_model, convsim_model_free>;
using Manifest = Handle<convsim_manifest, convsim_manifest_free>;
using Rooms = Handle<convsim_roomset, convsim_roomset_free>;
using Corpus = Handle<convsim_corpus, convsim_corpus_free>;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) input_error("cannot write " + path.string());
  out << text;
  if (!out) input_error("write failed: " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) input_error("cannot create " + dir.string() + ": " + ec.message());
}

// Turns config entries into arguments placed before the user's own, so the
// command line wins. Keys may use '_' or '-'.
std::vector<std::string> config_arguments(CLI::App* sub, const json& config,
                                          const std::vector<std::string>& user_args) {
  std::vector<std::string> out;
  for (const auto& [raw_key, value] : config.items()) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config" || key == "help") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      input_error("config: unknown option '" + raw_key + "' for " + sub->get_name());
    }
    bool given = false;
    for (const auto& a : user_args) {
      for (const auto& n : opt->get_lnames()) {
        if (a == "--" + n || a.rfind("--" + n + "=", 0) == 0) given = true;
      }
      for (const auto& n : opt->get_snames()) {
        if (a == "-" + n) given = true;
      }
    }
    if (given || value.is_null()) continue;
    const std::string flag = "--" + key;
    auto scalar = [&](const json& v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (opt->get_expected_max() == 0) {
      if (!value.is_boolean()) input_error("config: '" + raw_key + "' must be a boolean");
      out.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(scalar(v));
      }
    } else {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

json load_config(const fs::path& path, const std::string& command) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    input_error("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) input_error("config " + path.string() + ": expected an object");
  if (doc.contains("options") && doc.contains("command")) {
    if (doc["command"] != command) {
      input_error("config " + path.string() + " was written by '" +
                  doc["command"].get<std::string>() + "', not '" + command + "'");
    }
    return doc["options"];
  }
  return doc;
}

// Unset options are left out so the record can be fed back via --config.
void write_run_json(const fs::path& path, const std::string& command,
                    const json& options) {
  json kept = json::object();
  for (const auto& [k, v] : options.items()) {
    if (v.is_null() || (v.is_string() && v.get<std::string>().empty()) ||
        (v.is_array() && v.empty())) {
      continue;
    }
    kept[k] = v;
  }
  json doc = {{"command", command}, {"version", convsim_version()}, {"options", kept}};
  write_file(path, doc.dump(2) + "\n");
}

std::string default_format(const std::string& path) {
  return fs::path(path).extension() == ".rttm" ? "rttm" : "json";
}

// ---- extract-stats -------------------------------------------------------------

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string format;
  std::string mode = "sasc";
  double alpha = 0.1, floor_mu = 0.01, floor_r = 0.01, floor_d = 0.05;
  std::size_t min_obs = 3;
  std::string source;
  std::string output;
  std::string observations;
  std::string run_json;
};

void add_extract(CLI::App& app, ExtractArgs& a) {
  app.add_option("-i,--input", a.inputs, "Annotation files (RTTM or segment JSON)")
      ->required()->take_all();
  app.add_option("--format", a.format, "rttm or json (default: by extension)")
      ->check(CLI::IsMember({"rttm", "json"}));
  app.add_option("--mode", a.mode, "Model variant")
      ->check(CLI::IsMember({"sasc", "csasc"}))->capture_default_str();
  app.add_option("--alpha", a.alpha, "Residual bandwidth (sasc), seconds")->capture_default_str();
  app.add_option("--floor-mu", a.floor_mu, "Mean-KDE bandwidth floor")->capture_default_str();
  app.add_option("--floor-r", a.floor_r, "Residual bandwidth floor (csasc)")->capture_default_str();
  app.add_option("--floor-d", a.floor_d, "Duration bandwidth floor (csasc)")->capture_default_str();
  app.add_option("--min-obs", a.min_obs, "Minimum gaps per speaker and type")->capture_default_str();
  app.add_option("--source", a.source, "Corpus label stored in the model");
  app.add_option("-o,--output", a.output, "Model JSON to write")->required();
  app.add_option("--observations", a.observations, "Also write gap observations CSV");
  app.add_option("--run-json", a.run_json, "Run record (default: OUTPUT.run.json)");
}

int run_extract(ExtractArgs& a) {
  std::map<std::string, std::vector<std::string>> by_format;
  for (const auto& path : a.inputs) {
    by_format[a.format.empty() ? default_format(path) : a.format].push_back(read_file(path));
  }
  if (by_format.size() > 1) input_error("inputs mix RTTM and JSON; pass --format");
  const std::string format = by_format.begin()->first;
  const auto& docs = by_format.begin()->second;
  std::vector<const char*> ptrs;
  for (const auto& d : docs) ptrs.push_back(d.c_str());

  if (a.source.empty()) {
    for (const auto& p : a.inputs) {
      a.source += (a.source.empty() ? "" : ",") + fs::path(p).filename().string();
    }
  }
  json options = {{"mode", a.mode},       {"alpha", a.alpha},     {"floor_mu", a.floor_mu},
                  {"floor_r", a.floor_r}, {"floor_d", a.floor_d}, {"min_obs", a.min_obs},
                  {"source", a.source}};
  Model model;
  check(convsim_model_fit(ptrs.data(), ptrs.size(), format.c_str(),
                          options.dump().c_str(), model.out()));
  OwnedString text, summary;
  check(convsim_model_to_json(model.p, text.out()));
  check(convsim_model_summary(model.p, summary.out()));
  write_file(a.output, text.str());
  if (!a.observations.empty()) {
    OwnedString csv;
    check(convsim_observations_csv(ptrs.data(), ptrs.size(), format.c_str(), csv.out()));
    write_file(a.observations, csv.str());
  }
  std::cout << summary.str() << "\n";

  json run = {{"input", a.inputs},   {"format", format},       {"mode", a.mode},
              {"alpha", a.alpha},    {"floor_mu", a.floor_mu}, {"floor_r", a.floor_r},
              {"floor_d", a.floor_d}, {"min_obs", a.min_obs},  {"source", a.source},
              {"output", a.output},  {"observations", a.observations}};
  write_run_json(a.run_json.empty() ? a.output + ".run.json" : a.run_json,
                 "extract-stats", run);
  return 0;
}

// ---- simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string manifest;
  std::string stats;
  std::string mode = "sasc";
  int pairs = 1;
  std::uint64_t seed = 0;
  double d_min = 2.0, d_max = 10.0, fixed_gap = 0.25;
  std::string out;
  std::string run_json;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  app.add_option("--manifest", a.manifest, "Utterance manifest JSON")->required();
  app.add_option("--stats", a.stats, "Model JSON (required for sasc/csasc)");
  app.add_option("--mode", a.mode, "Generation mode")
      ->check(CLI::IsMember({"sasc", "csasc", "naive", "noconcat"}))->capture_default_str();
  app.add_option("-K,--pairs", a.pairs, "Pairing rounds per speaker (1-5)")->capture_default_str();
  app.add_option("--seed", a.seed, "Global seed")->capture_default_str();
  app.add_option("--d-min", a.d_min, "Shortest utterance kept, seconds")->capture_default_str();
  app.add_option("--d-max", a.d_max, "Longest utterance kept, seconds")->capture_default_str();
  app.add_option("--fixed-gap", a.fixed_gap, "Gap used by naive mode")->capture_default_str();
  app.add_option("-o,--out", a.out, "Output directory")->required();
  app.add_option("--run-json", a.run_json, "Run record (default: OUT/run.json)");
}

int run_simulate(const SimulateArgs& a) {
  Manifest manifest;
  const std::string mtext = read_file(a.manifest);
  const std::string base = fs::path(a.manifest).parent_path().string();
  check(convsim_manifest_load(mtext.c_str(), base.c_str(), manifest.out()));
  Model model;
  if (!a.stats.empty()) {
    check(convsim_model_from_json(read_file(a.stats).c_str(), model.out()));
  } else if (a.mode == "sasc" || a.mode == "csasc") {
    input_error("--stats is required for mode " + a.mode);
  }
  json cfg = {{"mode", a.mode},   {"pairs", a.pairs}, {"seed", a.seed},
              {"d_min", a.d_min}, {"d_max", a.d_max}, {"fixed_gap", a.fixed_gap}};
  Corpus corpus;
  check(convsim_simulate(manifest.p, model.p, cfg.dump().c_str(), corpus.out()));

  const fs::path out = a.out;
  const fs::path plans = out / "plans";
  std::error_code ec;
  fs::remove_all(plans, ec);
  make_dir(plans);
  const size_t n = convsim_corpus_plan_count(corpus.p);
  for (size_t i = 0; i < n; ++i) {
    OwnedString id, plan;
    check(convsim_corpus_plan_id(corpus.p, i, id.out()));
    check(convsim_corpus_plan_json(corpus.p, i, plan.out()));
    write_file(plans / (id.str() + ".json"), plan.str());
  }
  OwnedString summary;
  check(convsim_corpus_summary_json(corpus.p, summary.out()));
  write_file(out / "summary.json", summary.str());
  std::cout << summary.str();

  json run = cfg;
  run["manifest"] = a.manifest;
  run["stats"] = a.stats;
  run["out"] = a.out;
  write_run_json(a.run_json.empty() ? (out / "run.json").string() : a.run_json,
                 "simulate", run);
  return 0;
}

// ---- render --------------------------------------------------------------------

struct RenderArgs {
  std::vector<std::string> plans;
  std::string manifest;
  std::string rir_dir;
  double rir_fraction = 0.4;
  int sample_rate = 16000;
  double window = 30.0;
  bool no_chunks = false;
  std::string out;
  std::string run_json;
};

void add_render(CLI::App& app, RenderArgs& a) {
  app.add_option("--plans", a.plans,
                 "Plan files, plan directories, or simulate output directories")
      ->required()->take_all();
  app.add_option("--manifest", a.manifest, "Utterance manifest JSON")->required();
  app.add_option("--rir-dir", a.rir_dir, "RIR root (rirs/{room}/{position}.wav)");
  app.add_option("--rir-fraction", a.rir_fraction, "Share of dialogues given RIRs")
      ->capture_default_str();
  app.add_option("--sample-rate", a.sample_rate, "Required input sample rate")
      ->capture_default_str();
  app.add_option("--window", a.window, "Chunk length, seconds")->capture_default_str();
  app.add_flag("--no-chunks", a.no_chunks, "Skip chunk generation");
  app.add_option("-o,--out", a.out, "Output directory")->required();
  app.add_option("--run-json", a.run_json, "Run record (default: OUT/run.json)");
}

std::vector<fs::path> collect_plans(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    fs::path p = in;
    if (fs::is_directory(p)) {
      if (fs::is_directory(p / "plans")) p /= "plans";
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      input_error("no such plan file or directory: " + in);
    }
  }
  return files;
}

int run_render(const RenderArgs& a) {
  Manifest manifest;
  const std::string base = fs::path(a.manifest).parent_path().string();
  check(convsim_manifest_load(read_file(a.manifest).c_str(), base.c_str(), manifest.out()));
  Rooms rooms;
  if (!a.rir_dir.empty()) check(convsim_roomset_load(a.rir_dir.c_str(), rooms.out()));
  json opts = {{"rir_fraction", a.rir_fraction},
               {"sample_rate", a.sample_rate},
               {"chunk", !a.no_chunks},
               {"window", a.window}};
  const std::string opts_text = opts.dump();

  const auto files = collect_plans(a.plans);
  if (files.empty()) input_error("no plan files found");
  make_dir(a.out);
  json dialogues = json::array();
  std::size_t with_rir = 0;
  for (const auto& f : files) {
    OwnedString report;
    check(convsim_render_plan(read_file(f).c_str(), manifest.p, rooms.p, opts_text.c_str(),
                              a.out.c_str(), report.out()));
    json r = json::parse(report.str());
    if (r["rir_applied"].get<bool>()) ++with_rir;
    dialogues.push_back(std::move(r));
  }
  std::sort(dialogues.begin(), dialogues.end(), [](const json& x, const json& y) {
    return x["dialogue_id"].get<std::string>() < y["dialogue_id"].get<std::string>();
  });
  json corpus = {{"dialogues", dialogues}, {"count", dialogues.size()}, {"rir_applied", with_rir}};
  write_file(fs::path(a.out) / "render_manifest.json", corpus.dump(2) + "\n");
  std::cout << "rendered " << dialogues.size() << " dialogues (" << with_rir
            << " with RIR) into " << a.out << "\n";

  json run = {{"plans", a.plans},           {"manifest", a.manifest},
              {"rir-dir", a.rir_dir},       {"rir-fraction", a.rir_fraction},
              {"sample-rate", a.sample_rate}, {"window", a.window},
              {"no-chunks", a.no_chunks},   {"out", a.out}};
  write_run_json(a.run_json.empty() ? (fs::path(a.out) / "run.json").string() : a.run_json,
                 "render", run);
  return 0;
}

// ---- chunk ---------------------------------------------------------------------

struct ChunkArgs {
  std::vector<std::string> inputs;
  double window = 30.0;
  std::string run_json;
};

void add_chunk(CLI::App& app, ChunkArgs& a) {
  app.add_option("-i,--input", a.inputs,
                 "Rendered dialogue directories, or a render output directory")
      ->required()->take_all();
  app.add_option("--window", a.window, "Chunk length, seconds")->capture_default_str();
  app.add_option("--run-json", a.run_json,
                 "Run record (default: run.chunk.json in the first input)");
}

int run_chunk(const ChunkArgs& a) {
  std::vector<fs::path> dirs;
  for (const auto& in : a.inputs) {
    const fs::path p = in;
    if (fs::is_regular_file(p / "audio.wav")) {
      dirs.push_back(p);
    } else if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_directory() && fs::is_regular_file(e.path() / "audio.wav")) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      dirs.insert(dirs.end(), found.begin(), found.end());
    } else {
      input_error("no such directory: " + in);
    }
  }
  if (dirs.empty()) input_error("no rendered dialogues found");
  const std::string opts = json{{"window", a.window}}.dump();
  std::size_t chunks = 0;
  for (const auto& d : dirs) {
    OwnedString report;
    check(convsim_chunk_dialogue(d.string().c_str(), opts.c_str(), report.out()));
    chunks += json::parse(report.str())["chunks"].size();
  }
  std::cout << "wrote " << chunks << " chunks for " << dirs.size() << " dialogues\n";
  json run = {{"input", a.inputs}, {"window", a.window}};
  write_run_json(a.run_json.empty() ? (fs::path(a.inputs.front()) / "run.chunk.json").string()
                                    : a.run_json,
                 "chunk", run);
  return 0;
}

// ---- evaluate ------------------------------------------------------------------

struct EvaluateArgs {
  std::string pairs;
  std::string ref;
  std::vector<std::string> hyps;
  std::vector<std::string> metrics{"wer", "cer", "cpwer", "cpcer", "scacc"};
  std::size_t bootstrap = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string output;
  std::string pairs_csv;
  std::string run_json;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* pairs = app.add_option("--pairs", a.pairs,
                               "Combined JSON [{id, reference, hypothesis}]");
  auto* ref = app.add_option("--ref", a.ref, "Reference transcripts (TSV or JSON)");
  app.add_option("--hyp", a.hyps, "Hypothesis transcripts; two enable comparison")
      ->take_all()->needs(ref);
  pairs->excludes(ref);
  app.add_option("--metrics", a.metrics, "Metrics to report")
      ->check(CLI::IsMember({"wer", "cer", "cpwer", "cpcer", "scacc"}))
      ->delimiter(',')->take_all();
  app.add_option("--bootstrap", a.bootstrap, "Bootstrap resamples (0 = off)")
      ->capture_default_str();
  app.add_option("--alpha", a.alpha, "Bootstrap significance level")->capture_default_str();
  app.add_option("--seed", a.seed, "Bootstrap seed")->capture_default_str();
  app.add_option("-o,--output", a.output, "Report JSON (default: stdout)");
  app.add_option("--pairs-csv", a.pairs_csv, "Per-pair breakdown CSV (first hypothesis)");
  app.add_option("--run-json", a.run_json, "Run record (default: OUTPUT.run.json)");
}

json filter_report(const json& full, const std::vector<std::string>& metrics) {
  json out = json::object();
  for (const auto& m : metrics) out[m == "scacc" ? "sc_acc" : m] = full[m == "scacc" ? "sc_acc" : m];
  for (const char* k : {"pairs", "reference_words", "reference_chars", "approximate_pairs"}) {
    out[k] = full[k];
  }
  return out;
}

int run_evaluate(const EvaluateArgs& a) {
  if (a.pairs.empty() && (a.ref.empty() || a.hyps.empty())) {
    input_error("give --pairs, or --ref with one or two --hyp");
  }
  if (a.hyps.size() > 2) input_error("at most two --hyp files");
  if (a.bootstrap > 0 && a.hyps.size() != 2) {
    input_error("--bootstrap needs two --hyp files");
  }
  const std::string ref = read_file(a.pairs.empty() ? a.ref : a.pairs);
  std::vector<std::string> hyps;
  for (const auto& h : a.hyps) hyps.push_back(read_file(h));

  json reports = json::array();
  for (std::size_t i = 0; i < std::max<std::size_t>(hyps.size(), 1); ++i) {
    OwnedString report, csv;
    const bool want_csv = i == 0 && !a.pairs_csv.empty();
    check(convsim_evaluate(ref.c_str(), hyps.empty() ? nullptr : hyps[i].c_str(),
                           report.out(), want_csv ? csv.out() : nullptr));
    if (want_csv) write_file(a.pairs_csv, csv.str());
    json r = filter_report(json::parse(report.str()), a.metrics);
    if (!hyps.empty()) r["hypothesis"] = a.hyps[i];
    reports.push_back(std::move(r));
  }
  json doc;
  if (reports.size() == 1) {
    doc = reports[0];
  } else {
    doc = {{"systems", reports}};
    if (a.bootstrap > 0) {
      json comparisons = json::array();
      for (const auto& m : a.metrics) {
        if (m == "scacc") continue;
        json opts = {{"metric", m}, {"resamples", a.bootstrap}, {"alpha", a.alpha},
                     {"seed", a.seed}};
        OwnedString result;
        check(convsim_bootstrap(ref.c_str(), hyps[0].c_str(), hyps[1].c_str(),
                                opts.dump().c_str(), result.out()));
        comparisons.push_back(json::parse(result.str()));
      }
      doc["bootstrap"] = comparisons;
    }
  }
  const std::string text = doc.dump(2) + "\n";
  if (a.output.empty()) {
    std::cout << text;
  } else {
    write_file(a.output, text);
  }
  json run = {{"pairs", a.pairs}, {"ref", a.ref}, {"hyp", a.hyps},   {"metrics", a.metrics},
              {"bootstrap", a.bootstrap}, {"alpha", a.alpha}, {"seed", a.seed},
              {"output", a.output}, {"pairs-csv", a.pairs_csv}};
  if (!a.output.empty() || !a.run_json.empty()) {
    write_run_json(a.run_json.empty() ? a.output + ".run.json" : a.run_json, "evaluate", run);
  }
  return 0;
}

// ---- inspect-stats ---------------------------------------------------------------

struct InspectArgs {
  std::string stats;
  std::size_t points = 1001;
  std::optional<double> x_min, x_max;
  std::vector<double> durations;
  std::string manifest;
  double bin_width = 0.25;
  std::string out;
  std::string run_json;
};

void add_inspect(CLI::App& app, InspectArgs& a) {
  app.add_option("--stats", a.stats, "Model JSON")->required();
  app.add_option("--points", a.points, "Grid points per curve")->capture_default_str();
  app.add_option("--x-min", a.x_min, "Grid start, seconds");
  app.add_option("--x-max", a.x_max, "Grid end, seconds");
  app.add_option("--duration", a.durations, "Conditioning durations for csasc curves (default: 2 6 10)")
      ->take_all();
  app.add_option("--manifest", a.manifest, "Also write an utterance-duration histogram");
  app.add_option("--bin-width", a.bin_width, "Histogram bin width, seconds")
      ->capture_default_str();
  app.add_option("-o,--out", a.out, "Output directory")->required();
  app.add_option("--run-json", a.run_json, "Run record (default: OUT/run.json)");
}

int run_inspect(const InspectArgs& a) {
  Model model;
  check(convsim_model_from_json(read_file(a.stats).c_str(), model.out()));
  OwnedString summary;
  check(convsim_model_summary(model.p, summary.out()));
  const json s = json::parse(summary.str());
  std::vector<double> durations = a.durations;
  if (durations.empty() && s["mode"] == "csasc") durations = {2.0, 6.0, 10.0};
  json opts = {{"points", a.points}, {"durations", durations}};
  if (a.x_min) opts["x_min"] = *a.x_min;
  if (a.x_max) opts["x_max"] = *a.x_max;
  OwnedString curves;
  check(convsim_model_density_curves(model.p, opts.dump().c_str(), curves.out()));

  const fs::path out = a.out;
  make_dir(out);
  for (const auto& c : json::parse(curves.str())) {
    write_file(out / (c["name"].get<std::string>() + ".csv"), c["csv"].get<std::string>());
  }
  std::string tm = "from,to,prob\n";
  const auto& probs = s["transition"]["probs"];
  const char* labels[] = {"A", "B"};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      tm += std::string(labels[i]) + "," + labels[j] + "," + probs[i][j].dump() + "\n";
    }
  }
  write_file(out / "transition.csv", tm);
  write_file(out / "summary.json", summary.str() + "\n");
  if (!a.manifest.empty()) {
    Manifest manifest;
    check(convsim_manifest_load(read_file(a.manifest).c_str(), nullptr, manifest.out()));
    OwnedString hist;
    check(convsim_manifest_duration_histogram(manifest.p, a.bin_width, hist.out()));
    write_file(out / "duration_histogram.csv", hist.str());
  }
  std::cout << summary.str() << "\n";

  json run = {{"stats", a.stats},       {"points", a.points},   {"duration", a.durations},
              {"manifest", a.manifest}, {"bin-width", a.bin_width}, {"out", a.out}};
  if (a.x_min) run["x-min"] = *a.x_min;
  if (a.x_max) run["x-max"] = *a.x_max;
  write_run_json(a.run_json.empty() ? (out / "run.json").string() : a.run_json,
                 "inspect-stats", run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker-aware conversation simulation toolkit", "convsim"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(convsim_version()));

  ExtractArgs extract;
  SimulateArgs simulate;
  RenderArgs render;
  ChunkArgs chunk;
  EvaluateArgs evaluate;
  InspectArgs inspect;

  std::vector<std::pair<CLI::App*, std::function<int()>>> commands;
  auto add = [&](const char* name, const char* help, auto&& define, auto&& run) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", "JSON config file (command-line options win)");
    define(*sub);
    commands.emplace_back(sub, run);
  };
  add("extract-stats", "Fit a gap model from speaker-labelled annotations",
      [&](CLI::App& s) { add_extract(s, extract); }, [&] { return run_extract(extract); });
  add("simulate", "Pair speakers and write dialogue plans",
      [&](CLI::App& s) { add_simulate(s, simulate); }, [&] { return run_simulate(simulate); });
  add("render", "Mix dialogue plans into audio and ground truth",
      [&](CLI::App& s) { add_render(s, render); }, [&] { return run_render(render); });
  add("chunk", "Cut rendered dialogues into fixed-length training chunks",
      [&](CLI::App& s) { add_chunk(s, chunk); }, [&] { return run_chunk(chunk); });
  add("evaluate", "Score hypotheses (WER, CER, cpWER, cpCER, scAcc)",
      [&](CLI::App& s) { add_evaluate(s, evaluate); }, [&] { return run_evaluate(evaluate); });
  add("inspect-stats", "Dump model density curves and transition matrix",
      [&](CLI::App& s) { add_inspect(s, inspect); }, [&] { return run_inspect(inspect); });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    // Splice config-file values in right after the subcommand name.
    for (std::size_t i = 0; i < args.size(); ++i) {
      CLI::App* sub = nullptr;
      for (auto& [s, run] : commands) {
        if (s->get_name() == args[i]) sub = s;
      }
      if (!sub) continue;
      std::vector<std::string> rest(args.begin() + static_cast<std::ptrdiff_t>(i) + 1, args.end());
      for (std::size_t j = 0; j < rest.size(); ++j) {
        std::string cfg;
        if (rest[j] == "--config" && j + 1 < rest.size()) cfg = rest[j + 1];
        if (rest[j].rfind("--config=", 0) == 0) cfg = rest[j].substr(9);
        if (cfg.empty()) continue;
        auto extra = config_arguments(sub, load_config(cfg, sub->get_name()), rest);
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(i) + 1, extra.begin(), extra.end());
        break;
      }
      break;
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : kExitInput;
    }
    for (auto& [sub, run] : commands) {
      if (sub->parsed()) return run();
    }
    return kExitInput;
  } catch (const CliError& e) {
    std::cerr << "convsim: error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "convsim: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
