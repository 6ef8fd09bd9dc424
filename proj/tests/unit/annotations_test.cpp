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

#include "convsim/annotations.hpp"
#include "convsim/error.hpp"
#include "convsim/rng.hpp"
#include "doctest.h"

using namespace convsim;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInternal;
}

ConversationAnnotation random_conversation(Rng& rng, std::size_t n) {
  ConversationAnnotation c;
  c.conversation_id = "c" + std::to_string(rng.index(1000));
  for (std::size_t i = 0; i < n; ++i) {
    const double start = std::round(rng.uniform() * 100000.0) / 1000.0;
    const double dur = 0.001 * static_cast<double>(1 + rng.index(5000));
    c.segments.push_back({rng.index(2) ? "A" : "B", start, start + dur, std::nullopt});
  }
  c.canonicalize();
  return c;
}

}  // namespace

TEST_CASE("rttm: single line maps fields") {
  auto a = parse_rttm("SPEAKER conv1 1 0.00 2.00 <NA> <NA> A <NA> <NA>\n");
  REQUIRE(a.size() == 1);
  CHECK(a[0].conversation_id == "conv1");
  REQUIRE(a[0].segments.size() == 1);
  CHECK(a[0].segments[0] == SegmentAnnotation{"A", 0.0, 2.0, std::nullopt});
}

TEST_CASE("rttm: segments sorted by start") {
  auto a = parse_rttm(
      "SPEAKER conv1 1 1.80 2.20 <NA> <NA> B <NA> <NA>\n"
      "SPEAKER conv1 1 0.00 2.00 <NA> <NA> A <NA> <NA>\n");
  REQUIRE(a.size() == 1);
  REQUIRE(a[0].segments.size() == 2);
  CHECK(a[0].segments[0].speaker == "A");
  CHECK(a[0].segments[1].speaker == "B");
  CHECK(a[0].segments[1].end == doctest::Approx(4.0));
}

TEST_CASE("rttm: negative duration is a validation error with line number") {
  try {
    parse_rttm("; comment\nSPEAKER conv1 1 0.00 -1.0 <NA> <NA> A <NA> <NA>\n");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("rttm: malformed lines") {
  CHECK(kind_of([] { parse_rttm("SPEAKER conv1 1 0.00\n"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_rttm("LEXEME c 1 0 1 <NA> <NA> A <NA> <NA>\n"); }) ==
        ErrorKind::kParse);
  CHECK(kind_of([] { parse_rttm("SPEAKER c 1 zero 1 <NA> <NA> A <NA> <NA>\n"); }) ==
        ErrorKind::kParse);
  try {
    parse_rttm("\n\nSPEAKER c 1 0 x <NA> <NA> A <NA> <NA>\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("rttm: writer format and rounding") {
  ConversationAnnotation c{"conv1", {{"A", 0.0, 2.0, std::nullopt}}};
  CHECK(write_rttm(c) == "SPEAKER conv1 1 0.000 2.000 <NA> <NA> A <NA> <NA>\n");
  ConversationAnnotation d{"conv1", {{"A", 1.23456, 2.0, std::nullopt}}};
  CHECK(write_rttm(d).rfind("SPEAKER conv1 1 1.235 ", 0) == 0);
}

TEST_CASE("rttm and json round trip within 1 ms") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_conversation(rng, 1 + rng.index(20));
    auto back = parse_rttm(write_rttm(c));
    REQUIRE(back.size() == 1);
    REQUIRE(back[0].segments.size() == c.segments.size());
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
      CHECK(std::abs(back[0].segments[i].start - c.segments[i].start) <= 1e-3 + 1e-12);
      CHECK(std::abs(back[0].segments[i].end - c.segments[i].end) <= 1e-3 + 1e-12);
    }
    auto j = parse_segment_json(write_segment_json({c}));
    REQUIRE(j.size() == 1);
    CHECK(j[0] == c);
  }
}

TEST_CASE("segment json: parse, text, errors") {
  auto a = parse_segment_json(
      R"([{"conversation_id":"c","segments":[{"speaker":"A","start":0,"end":2}]}])");
  REQUIRE(a.size() == 1);
  CHECK(a[0].segments.size() == 1);
  CHECK_FALSE(a[0].segments[0].text.has_value());

  auto t = parse_segment_json(
      R"([{"conversation_id":"c","segments":[{"speaker":"A","start":0,"end":2,"text":"hi"}]}])");
  CHECK(t[0].segments[0].text == "hi");

  CHECK(kind_of([] {
          parse_segment_json(
              R"([{"conversation_id":"c","segments":[{"speaker":"A","start":1,"end":1}]}])");
        }) == ErrorKind::kValidation);
  try {
    parse_segment_json(R"([{"conversation_id":"c","segments":[{"speaker":"A","start":1}]}])");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSchema);
    CHECK(std::string(e.what()).find("$[0].segments[0].end") != std::string::npos);
  }
  CHECK(kind_of([] { parse_segment_json("[{"); }) == ErrorKind::kParse);
  CHECK(kind_of([] {
          parse_segment_json(
              R"([{"conversation_id":"c","segments":[{"speaker":"A","start":-1,"end":1}]}])");
        }) == ErrorKind::kValidation);
}

TEST_CASE("canonical order is independent of input order") {
  Rng rng(5);
  auto c = random_conversation(rng, 30);
  c.segments.push_back(c.segments.front());
  c.segments.back().text = "dup";
  c.canonicalize();
  for (int trial = 0; trial < 20; ++trial) {
    auto shuffled = c;
    for (std::size_t i = shuffled.segments.size(); i > 1; --i) {
      std::swap(shuffled.segments[i - 1], shuffled.segments[rng.index(i)]);
    }
    auto reparsed = parse_segment_json(write_segment_json({shuffled}));
    CHECK(reparsed[0] == c);
  }
}

TEST_CASE("manifest: sort by chrono index, grouping, errors") {
  auto pool = load_manifest(R"([
    {"speaker":"A","utterance_id":"a2","audio_path":"a2.wav","duration":2.5,"chrono_index":2,"text":"x"},
    {"speaker":"A","utterance_id":"a0","audio_path":"a0.wav","duration":3.0,"chrono_index":0,"text":"y"},
    {"speaker":"B","utterance_id":"b0","audio_path":"b0.wav","duration":3.0,"chrono_index":0,"text":"z"},
    {"speaker":"A","utterance_id":"a1","audio_path":"a1.wav","duration":4.0,"chrono_index":1,"text":"w"}])");
  REQUIRE(pool.by_speaker.size() == 2);
  const auto& a = pool.by_speaker.at("A");
  REQUIRE(a.size() == 3);
  CHECK(a[0].chrono_index == 0);
  CHECK(a[1].chrono_index == 1);
  CHECK(a[2].chrono_index == 2);
  CHECK(pool.find("b0")->speaker == "B");
  CHECK(pool.find("nope") == nullptr);
  CHECK(load_manifest(write_manifest(pool)) == pool);

  CHECK(kind_of([] {
          load_manifest(R"([
    {"speaker":"A","utterance_id":"a","audio_path":"a","duration":2,"chrono_index":0,"text":""},
    {"speaker":"A","utterance_id":"b","audio_path":"b","duration":2,"chrono_index":0,"text":""}])");
        }) == ErrorKind::kValidation);
  CHECK(kind_of([] {
          load_manifest(
              R"([{"speaker":"A","utterance_id":"a","audio_path":"a","duration":0,"chrono_index":0}])");
        }) == ErrorKind::kValidation);
}

TEST_CASE("filter_pool: inclusive bounds, identity, empty, idempotent") {
  UtterancePool pool;
  std::uint64_t k = 0;
  for (double d : {1.5, 2.0, 9.9, 10.0, 12.0}) {
    pool.by_speaker["A"].push_back({"A", "u" + std::to_string(k), "p", d, k, ""});
    ++k;
  }
  FilterReport rep;
  auto f = filter_pool(pool, 2.0, 10.0, &rep);
  std::vector<double> kept;
  for (const auto& e : f.by_speaker.at("A")) kept.push_back(e.duration);
  CHECK(kept == std::vector<double>{2.0, 9.9, 10.0});
  CHECK(rep.kept == 3);
  CHECK(rep.dropped == 2);
  CHECK(filter_pool(f, 2.0, 10.0) == f);
  CHECK(filter_pool(UtterancePool{}, 2.0, 10.0).utterance_count() == 0);

  UtterancePool only_short;
  only_short.by_speaker["B"].push_back({"B", "b", "p", 1.0, 0, ""});
  FilterReport r2;
  auto g = filter_pool(only_short, 2.0, 10.0, &r2);
  CHECK(g.by_speaker.count("B") == 1);
  CHECK(g.by_speaker.at("B").empty());
  CHECK(r2.emptied_speakers == std::vector<std::string>{"B"});

  CHECK(kind_of([&] { filter_pool(pool, 3.0, 2.0); }) == ErrorKind::kDomain);
  CHECK(kind_of([&] { filter_pool(pool, 0.0, 2.0); }) == ErrorKind::kDomain);
}
