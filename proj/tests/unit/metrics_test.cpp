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

#include <algorithm>
#include <cmath>

#include "convsim/error.hpp"
#include "convsim/metrics.hpp"
#include "convsim/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace convsim;

namespace {

using Tokens = std::vector<std::string>;

std::string random_text(Rng& rng, std::size_t max_segments, std::size_t max_words,
                        std::size_t vocab) {
  const std::size_t segs = 1 + rng.index(max_segments);
  std::string out;
  for (std::size_t s = 0; s < segs; ++s) {
    if (s) out += " <sc>";
    const std::size_t n = 1 + rng.index(max_words);
    for (std::size_t w = 0; w < n; ++w) {
      out += (out.empty() ? "" : " ");
      out += std::string(1, static_cast<char>('a' + rng.index(vocab)));
      if (rng.uniform() < 0.3) out += static_cast<char>('a' + rng.index(vocab));
    }
  }
  return out;
}

ScoredPair pair(std::string id, std::string ref, std::string hyp) {
  return {std::move(id), std::move(ref), std::move(hyp)};
}

}  // namespace

TEST_CASE("normalize") {
  CHECK(normalize("Okay. <sc> Great.") == Tokens{"okay", "<sc>", "great"});
  CHECK(normalize("  A   b ") == Tokens{"a", "b"});
  CHECK(normalize("").empty());
  CHECK(normalize("Don't, STOP!") == Tokens{"dont", "stop"});
  CHECK(normalize("... hi") == Tokens{"hi"});
  CHECK(normalize("tab\tand\nnewline") == Tokens{"tab", "and", "newline"});
}

TEST_CASE("edit_distance examples and oracle") {
  CHECK(edit_distance(Tokens{"a", "b", "c"}, Tokens{"a", "b", "c"}) == EditCounts{0, 0, 0});
  CHECK(edit_distance(Tokens{"a", "b", "c"}, Tokens{"a", "x", "c"}) == EditCounts{1, 0, 0});
  CHECK(edit_distance(Tokens{}, Tokens{"a"}) == EditCounts{0, 1, 0});
  CHECK(edit_distance(Tokens{"a"}, Tokens{}) == EditCounts{0, 0, 1});
  Rng rng(1);
  for (int i = 0; i < 300; ++i) {
    auto a = oracle::words(random_text(rng, 1, 6, 3));
    auto b = oracle::words(random_text(rng, 1, 6, 3));
    if (rng.uniform() < 0.2) b.clear();
    const auto e = edit_distance(a, b);
    CHECK(e.total() == oracle::levenshtein(a, b));
    CHECK(e.total() == oracle::all_alignments_min(a, 0, b, 0));
    // Counts must describe an alignment between the two lengths.
    CHECK(a.size() - e.deletions + e.insertions == b.size());
  }
}

TEST_CASE("wer and cer") {
  CHECK(wer({pair("1", "a b c", "a x c")}) == doctest::Approx(100.0 / 3.0));
  CHECK(wer({pair("1", "same words", "Same words.")}) == 0.0);
  CHECK(cer({pair("1", "same words", "same words")}) == 0.0);

  const auto og = pair("1", "okay great", "great okay");
  CHECK(oracle::all_alignments_min({"okay", "great"}, 0, {"great", "okay"}, 0) == 2);
  CHECK(wer({og}) == 100.0);
  const auto s = score_plain(og, ErrorUnit::kWord);
  CHECK(s.edits == EditCounts{2, 0, 0});

  // Characters include the single space between words; "<sc>" is excluded.
  CHECK(score_plain(pair("1", "ab cd", "ab cd"), ErrorUnit::kChar).reference_length == 5);
  CHECK(score_plain(pair("1", "ab <sc> cd", "abcd"), ErrorUnit::kChar).edits.total() == 1);
  CHECK(cer({pair("1", "ab", "ax")}) == 50.0);

  // Pooled over pairs, not averaged.
  CHECK(wer({pair("1", "a", "b"), pair("2", "a b c", "a b c")}) == 25.0);
  CHECK_THROWS_AS(wer({pair("1", "", "x")}), Error);
  CHECK_THROWS_AS(wer({}), Error);
}

TEST_CASE("cp error: examples and brute-force oracle") {
  const auto og = pair("1", "okay <sc> great", "great <sc> okay");
  CHECK(cp_error({og}, ErrorUnit::kWord) == 0.0);
  CHECK(cp_error({og}, ErrorUnit::kChar) == 0.0);
  CHECK(cp_error({pair("1", "a b <sc> c", "a b <sc> c")}, ErrorUnit::kWord) == 0.0);

  Rng rng(2);
  for (int i = 0; i < 400; ++i) {
    const auto ref = random_text(rng, 3, 3, 4);
    const auto hyp = random_text(rng, 3, 3, 4);
    const auto w = score_cp(pair("x", ref, hyp), ErrorUnit::kWord);
    CHECK(w.edits.total() == oracle::brute_cp_words(ref, hyp));
    CHECK_FALSE(w.approximate);
    const auto c = score_cp(pair("x", ref, hyp), ErrorUnit::kChar);
    CHECK(c.edits.total() == oracle::brute_cp_chars(ref, hyp));
    // Permutation search can only help.
    CHECK(w.edits.total() <= score_plain(pair("x", ref, hyp), ErrorUnit::kWord).edits.total());
    CHECK(c.edits.total() <= score_plain(pair("x", ref, hyp), ErrorUnit::kChar).edits.total());
  }
}

TEST_CASE("cp error: speaker-change tokens in the reference do not matter") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto ref = random_text(rng, 3, 4, 5);
    const auto hyp = random_text(rng, 3, 4, 5);
    std::string flat;
    for (const auto& w : oracle::words(ref)) {
      if (w != "<sc>") flat += (flat.empty() ? "" : " ") + w;
    }
    CHECK(score_cp(pair("x", ref, hyp), ErrorUnit::kWord).edits ==
          score_cp(pair("x", flat, hyp), ErrorUnit::kWord).edits);
    CHECK(score_plain(pair("x", ref, hyp), ErrorUnit::kWord).edits ==
          score_plain(pair("x", flat, hyp), ErrorUnit::kWord).edits);
  }
}

TEST_CASE("cp error: greedy beyond the exhaustive limit") {
  std::string ref, hyp;
  for (int s = 0; s < 10; ++s) {
    ref += (s ? " <sc> " : "") + std::string("w") + std::to_string(s);
    hyp += (s ? " <sc> " : "") + std::string("w") + std::to_string(9 - s);
  }
  const auto r = score_cp(pair("x", ref, hyp), ErrorUnit::kWord);
  CHECK(r.approximate);
  CHECK(r.edits.total() <= score_plain(pair("x", ref, hyp), ErrorUnit::kWord).edits.total());
  auto report = evaluate({pair("x", ref, hyp)});
  CHECK(report.approximate_pairs >= 1);
}

TEST_CASE("sc_accuracy") {
  CHECK(count_sc("a <sc> b <sc> c") == 2);
  CHECK(sc_accuracy({pair("1", "a <sc> b <sc> c", "x <sc> y <sc> z")}) == 100.0);
  CHECK(sc_accuracy({pair("1", "a <sc> b", "a b")}) == 0.0);
  CHECK(sc_accuracy({pair("1", "a <sc> b", "a b"), pair("2", "a", "b")}) == 50.0);
  CHECK_THROWS_AS(sc_accuracy({}), Error);
}

TEST_CASE("evaluate report") {
  auto rep = evaluate({pair("1", "okay <sc> great", "great <sc> okay"), pair("2", "a b", "a b")});
  CHECK(rep.wer == 50.0);
  CHECK(rep.cpwer == 0.0);
  CHECK(rep.sc_acc == 100.0);
  REQUIRE(rep.pairs.size() == 2);
  CHECK(rep.pairs[0].ref_sc == 1);
  auto j = report_json(rep);
  CHECK(j.find("\"cpwer\"") != std::string::npos);
  auto csv = report_pairs_csv(rep);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("bootstrap") {
  std::vector<ScoredPair> a, b, perfect;
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const std::string id = "p" + std::to_string(i);
    const std::string ref = random_text(rng, 2, 5, 6);
    a.push_back(pair(id, ref, random_text(rng, 2, 5, 6)));
    perfect.push_back(pair(id, ref, ref));
    std::string wrong;
    for (std::size_t k = 0; k < oracle::words(ref).size(); ++k) wrong += " zz";
    b.push_back(pair(id, ref, wrong));
  }
  auto same = bootstrap_compare(a, a, Metric::kWer, 1000, 0.05, 9);
  CHECK(same.diff == 0.0);
  CHECK_FALSE(same.significant);
  CHECK(same.ci_low <= same.ci_high);

  auto sep = bootstrap_compare(perfect, b, Metric::kWer, 1000, 0.05, 9);
  CHECK(sep.diff < 0);
  CHECK(sep.significant);
  CHECK(sep.ci_low <= sep.diff);
  CHECK(sep.diff <= sep.ci_high);
  CHECK(sep.ci_high < 0);

  auto r1 = bootstrap_compare(a, perfect, Metric::kCpCer, 200, 0.05, 11);
  auto r2 = bootstrap_compare(a, perfect, Metric::kCpCer, 200, 0.05, 11);
  CHECK(bootstrap_json(r1) == bootstrap_json(r2));
  CHECK(r1.ci_low <= r1.resample_median);
  CHECK(r1.resample_median <= r1.ci_high);

  auto shuffled = b;
  shuffled[0].id = "other";
  CHECK_THROWS_AS(bootstrap_compare(perfect, shuffled, Metric::kWer, 10, 0.05, 1), Error);
  CHECK_THROWS_AS(bootstrap_compare(perfect, b, Metric::kWer, 0, 0.05, 1), Error);
}

TEST_CASE("transcript parsing and joining") {
  auto ref = parse_transcripts("d1\t0\thello <sc> there\nd1\t1\tbye\n");
  auto hyp = parse_transcripts("d1\t1\tbye\nd1\t0\thello there\n");
  auto joined = join_transcripts(ref, hyp);
  REQUIRE(joined.size() == 2);
  CHECK(joined[0].reference == "hello <sc> there");
  CHECK(joined[0].hypothesis == "hello there");
  CHECK_THROWS_AS(join_transcripts(ref, parse_transcripts("d1\t0\tx\n")), Error);

  auto pairs = parse_scored_pairs(R"([{"id":"a","reference":"x","hypothesis":"y"}])");
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].hypothesis == "y");
  CHECK_THROWS_AS(parse_scored_pairs(R"([{"id":"a","reference":"x"}])"), Error);
  CHECK_THROWS_AS(parse_scored_pairs(R"([{"id":"a","reference":"x","hypothesis":"y"},
                                         {"id":"a","reference":"x","hypothesis":"y"}])"),
                  Error);
}
