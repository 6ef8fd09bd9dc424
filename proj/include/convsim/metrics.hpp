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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace convsim {

struct ScoredPair {
  std::string id;
  std::string reference;
  std::string hypothesis;
};

// Lowercases ASCII letters, strips ASCII punctuation from every token except
// a standalone "<sc>", and drops empty tokens.
std::vector<std::string> normalize(std::string_view text);

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;

  std::size_t total() const { return substitutions + insertions + deletions; }
  bool operator==(const EditCounts&) const = default;
};

// Unit-cost Levenshtein alignment of hypothesis against reference. Among
// minimal alignments, backtracking prefers a substitution (or match) over an
// insertion/deletion pair.
template <typename T>
EditCounts edit_distance(const std::vector<T>& reference,
                         const std::vector<T>& hypothesis);

enum class ErrorUnit { kWord, kChar };

// Segments split on <sc>; each segment is its list of normalised words.
using Segments = std::vector<std::vector<std::string>>;
Segments split_segments(const std::vector<std::string>& tokens);

// Unicode code points of the words joined by single spaces.
std::vector<std::uint32_t> char_sequence(const std::vector<std::string>& words);

struct PairScore {
  EditCounts edits;
  std::size_t reference_length = 0;
  bool approximate = false;  // permutation search was greedy
};

PairScore score_plain(const ScoredPair& pair, ErrorUnit unit);

// Minimum over orderings of the hypothesis segments of the edit distance
// against the concatenated reference. Exhaustive up to
// kMaxExhaustiveSegments segments, greedy best-insertion beyond.
inline constexpr std::size_t kMaxExhaustiveSegments = 8;
PairScore score_cp(const ScoredPair& pair, ErrorUnit unit);

// Pooled percentages: 100 * sum(errors) / sum(reference length).
double wer(const std::vector<ScoredPair>& pairs);
double cer(const std::vector<ScoredPair>& pairs);
double cp_error(const std::vector<ScoredPair>& pairs, ErrorUnit unit);
double sc_accuracy(const std::vector<ScoredPair>& pairs);

std::size_t count_sc(std::string_view text);

enum class Metric { kWer, kCer, kCpWer, kCpCer };
std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

struct PairBreakdown {
  std::string id;
  PairScore wer, cer, cpwer, cpcer;
  std::size_t ref_sc = 0;
  std::size_t hyp_sc = 0;
};

struct MetricReport {
  double wer = 0.0, cer = 0.0, cpwer = 0.0, cpcer = 0.0, sc_acc = 0.0;
  std::size_t approximate_pairs = 0;
  std::vector<PairBreakdown> pairs;
};

MetricReport evaluate(const std::vector<ScoredPair>& pairs);
std::string report_json(const MetricReport& report);
std::string report_pairs_csv(const MetricReport& report);

struct BootstrapResult {
  Metric metric = Metric::kWer;
  double diff = 0.0;  // metric(A) - metric(B) on the full set
  double ci_low = 0.0;
  double ci_high = 0.0;
  double resample_median = 0.0;
  bool significant = false;
  std::size_t resamples = 0;
  double alpha = 0.05;
};

// Paired bootstrap over ids. pairs_a and pairs_b must carry the same ids in
// the same order.
BootstrapResult bootstrap_compare(const std::vector<ScoredPair>& pairs_a,
                                  const std::vector<ScoredPair>& pairs_b,
                                  Metric metric, std::size_t resamples,
                                  double alpha, std::uint64_t seed);
std::string bootstrap_json(const BootstrapResult& result);

// id -> text files: TSV ("id<TAB>text" or "dialogue<TAB>chunk<TAB>text",
// keyed "dialogue/chunk") or a JSON array of {"id", "text"}.
std::vector<std::pair<std::string, std::string>> parse_transcripts(
    std::string_view text);

// Joins reference and hypothesis transcripts on id (reference order).
// Throws Error(kValidation) on any id present in only one side.
// Combined form: [{"id", "reference", "hypothesis"}].
std::vector<ScoredPair> parse_scored_pairs(std::string_view text);

std::vector<ScoredPair> join_transcripts(
    const std::vector<std::pair<std::string, std::string>>& reference,
    const std::vector<std::pair<std::string, std::string>>& hypothesis);

}  // namespace convsim
