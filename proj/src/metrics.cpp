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

#include "convsim/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "convsim/density.hpp"
#include "convsim/error.hpp"
#include "convsim/rng.hpp"
#include "detail/json_util.hpp"

namespace convsim {

using nlohmann::json;

namespace {
constexpr std::string_view kSc = "<sc>";
}  // namespace

std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == b) continue;
    const std::string_view raw = text.substr(b, i - b);
    if (raw == kSc) {
      out.emplace_back(kSc);
      continue;
    }
    std::string tok;
    tok.reserve(raw.size());
    for (char ch : raw) {
      const auto c = static_cast<unsigned char>(ch);
      if (c < 0x80 && std::ispunct(c)) continue;
      tok.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
    if (!tok.empty()) out.push_back(std::move(tok));
  }
  return out;
}

template <typename T>
EditCounts edit_distance(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const std::size_t m = ref.size(), n = hyp.size();
  std::vector<std::uint32_t> cost((m + 1) * (n + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return cost[i * (n + 1) + j];
  };
  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts out;
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++out.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++out.deletions;
      --i;
    } else {
      ++out.insertions;
      --j;
    }
  }
  return out;
}

template EditCounts edit_distance(const std::vector<std::string>&,
                                  const std::vector<std::string>&);
template EditCounts edit_distance(const std::vector<std::uint32_t>&,
                                  const std::vector<std::uint32_t>&);

Segments split_segments(const std::vector<std::string>& tokens) {
  Segments out(1);
  for (const auto& t : tokens) {
    if (t == kSc) {
      out.emplace_back();
    } else {
      out.back().push_back(t);
    }
  }
  return out;
}

std::vector<std::uint32_t> char_sequence(const std::vector<std::string>& words) {
  std::vector<std::uint32_t> out;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (w > 0) out.push_back(' ');
    const std::string& s = words[w];
    for (std::size_t i = 0; i < s.size();) {
      const auto c = static_cast<unsigned char>(s[i]);
      std::size_t len = 1;
      std::uint32_t cp = c;
      if (c >= 0xF0 && c < 0xF8) {
        len = 4;
        cp = c & 0x07;
      } else if (c >= 0xE0) {
        len = 3;
        cp = c & 0x0F;
      } else if (c >= 0xC0) {
        len = 2;
        cp = c & 0x1F;
      }
      bool valid = len > 1 && i + len <= s.size();
      for (std::size_t k = 1; valid && k < len; ++k) {
        const auto cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) valid = false;
        cp = (cp << 6) | (cc & 0x3F);
      }
      if (!valid) {
        // ASCII or a stray byte: one unit.
        out.push_back(c);
        ++i;
        continue;
      }
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

namespace {

std::vector<std::string> flatten(const Segments& segs) {
  std::vector<std::string> out;
  for (const auto& s : segs) out.insert(out.end(), s.begin(), s.end());
  return out;
}

template <typename T>
std::vector<T> units(const std::vector<std::string>& words);

template <>
std::vector<std::string> units(const std::vector<std::string>& words) {
  return words;
}

template <>
std::vector<std::uint32_t> units(const std::vector<std::string>& words) {
  return char_sequence(words);
}

// Appends one hypothesis unit to a DP column over the reference.
template <typename T>
void advance_column(const std::vector<T>& ref, std::vector<std::uint32_t>& col,
                    const T& unit) {
  std::uint32_t diag = col[0];
  col[0] += 1;
  for (std::size_t i = 1; i < col.size(); ++i) {
    const std::uint32_t up = col[i];
    col[i] = std::min({diag + (ref[i - 1] == unit ? 0u : 1u), up + 1, col[i - 1] + 1});
    diag = up;
  }
}

// Hypothesis unit sequence for an ordering of segments. Character sequences
// put a single space between consecutive non-empty segments.
template <typename T>
std::vector<T> ordered_units(const Segments& segs,
                             const std::vector<std::size_t>& order) {
  std::vector<std::string> words;
  for (std::size_t k : order) words.insert(words.end(), segs[k].begin(), segs[k].end());
  return units<T>(words);
}

template <typename T>
struct PermutationSearch {
  const std::vector<T>& ref;
  // Units contributed by each segment. Character search inserts a space
  // before a segment that follows earlier non-empty output.
  std::vector<std::vector<T>> pieces;
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::size_t> best_order;
  std::vector<std::size_t> order;
  std::vector<bool> used;

  void run(const std::vector<std::uint32_t>& col, bool any_units) {
    if (order.size() == pieces.size()) {
      if (col.back() < best) {
        best = col.back();
        best_order = order;
      }
      return;
    }
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (used[k]) continue;
      auto next = col;
      if constexpr (std::is_same_v<T, std::uint32_t>) {
        if (any_units && !pieces[k].empty()) advance_column(ref, next, T{' '});
      }
      for (const auto& u : pieces[k]) advance_column(ref, next, u);
      used[k] = true;
      order.push_back(k);
      run(next, any_units || !pieces[k].empty());
      order.pop_back();
      used[k] = false;
    }
  }
};

template <typename T>
PairScore score_cp_impl(const ScoredPair& pair) {
  const auto ref_words = flatten(split_segments(normalize(pair.reference)));
  const std::vector<T> ref = units<T>(ref_words);
  Segments segs;
  for (auto& s : split_segments(normalize(pair.hypothesis))) {
    if (!s.empty()) segs.push_back(std::move(s));
  }
  PairScore score;
  score.reference_length = ref.size();
  if (segs.size() <= 1) {
    std::vector<std::size_t> order(segs.size());
    std::iota(order.begin(), order.end(), 0);
    score.edits = edit_distance(ref, ordered_units<T>(segs, order));
    return score;
  }

  std::vector<std::size_t> best_order;
  if (segs.size() <= kMaxExhaustiveSegments) {
    PermutationSearch<T> search{ref, {}, std::numeric_limits<std::uint32_t>::max(),
                                {}, {}, std::vector<bool>(segs.size(), false)};
    for (const auto& s : segs) search.pieces.push_back(units<T>(s));
    std::vector<std::uint32_t> col(ref.size() + 1);
    std::iota(col.begin(), col.end(), 0u);
    search.run(col, false);
    best_order = search.best_order;
  } else {
    score.approximate = true;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      std::size_t best_pos = 0;
      std::size_t best_cost = std::numeric_limits<std::size_t>::max();
      for (std::size_t pos = 0; pos <= best_order.size(); ++pos) {
        auto trial = best_order;
        trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), k);
        const std::size_t c = edit_distance(ref, ordered_units<T>(segs, trial)).total();
        if (c < best_cost) {
          best_cost = c;
          best_pos = pos;
        }
      }
      best_order.insert(best_order.begin() + static_cast<std::ptrdiff_t>(best_pos), k);
    }
    // The greedy order may lose to the original order; keep the better one.
    std::vector<std::size_t> identity(segs.size());
    std::iota(identity.begin(), identity.end(), 0);
    if (edit_distance(ref, ordered_units<T>(segs, identity)).total() <=
        edit_distance(ref, ordered_units<T>(segs, best_order)).total()) {
      best_order = identity;
    }
  }
  score.edits = edit_distance(ref, ordered_units<T>(segs, best_order));
  return score;
}

template <typename T>
PairScore score_plain_impl(const ScoredPair& pair) {
  const auto ref = units<T>(flatten(split_segments(normalize(pair.reference))));
  const auto hyp = units<T>(flatten(split_segments(normalize(pair.hypothesis))));
  return {edit_distance(ref, hyp), ref.size(), false};
}

double pooled(const std::vector<PairScore>& scores) {
  std::size_t errors = 0, length = 0;
  for (const auto& s : scores) {
    errors += s.edits.total();
    length += s.reference_length;
  }
  if (length == 0) {
    fail(ErrorKind::kValidation, "total reference length is zero");
  }
  return 100.0 * static_cast<double>(errors) / static_cast<double>(length);
}

}  // namespace

PairScore score_plain(const ScoredPair& pair, ErrorUnit unit) {
  return unit == ErrorUnit::kWord ? score_plain_impl<std::string>(pair)
                                  : score_plain_impl<std::uint32_t>(pair);
}

PairScore score_cp(const ScoredPair& pair, ErrorUnit unit) {
  return unit == ErrorUnit::kWord ? score_cp_impl<std::string>(pair)
                                  : score_cp_impl<std::uint32_t>(pair);
}

namespace {
std::vector<PairScore> score_all(const std::vector<ScoredPair>& pairs,
                                 ErrorUnit unit, bool cp) {
  std::vector<PairScore> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(cp ? score_cp(p, unit) : score_plain(p, unit));
  return out;
}
}  // namespace

double wer(const std::vector<ScoredPair>& pairs) {
  return pooled(score_all(pairs, ErrorUnit::kWord, false));
}

double cer(const std::vector<ScoredPair>& pairs) {
  return pooled(score_all(pairs, ErrorUnit::kChar, false));
}

double cp_error(const std::vector<ScoredPair>& pairs, ErrorUnit unit) {
  return pooled(score_all(pairs, unit, true));
}

std::size_t count_sc(std::string_view text) {
  const auto tokens = normalize(text);
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), kSc));
}

double sc_accuracy(const std::vector<ScoredPair>& pairs) {
  if (pairs.empty()) fail(ErrorKind::kValidation, "sc_accuracy: no pairs");
  std::size_t ok = 0;
  for (const auto& p : pairs) {
    if (count_sc(p.reference) == count_sc(p.hypothesis)) ++ok;
  }
  return 100.0 * static_cast<double>(ok) / static_cast<double>(pairs.size());
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kWer: return "wer";
    case Metric::kCer: return "cer";
    case Metric::kCpWer: return "cpwer";
    case Metric::kCpCer: return "cpcer";
  }
  return "?";
}

Metric parse_metric(std::string_view text) {
  if (text == "wer") return Metric::kWer;
  if (text == "cer") return Metric::kCer;
  if (text == "cpwer") return Metric::kCpWer;
  if (text == "cpcer") return Metric::kCpCer;
  fail(ErrorKind::kValidation, "unknown metric '" + std::string(text) + "'");
}

MetricReport evaluate(const std::vector<ScoredPair>& pairs) {
  if (pairs.empty()) fail(ErrorKind::kValidation, "no pairs to evaluate");
  MetricReport report;
  std::vector<PairScore> w, c, cw, cc;
  for (const auto& p : pairs) {
    PairBreakdown b{p.id,
                    score_plain(p, ErrorUnit::kWord),
                    score_plain(p, ErrorUnit::kChar),
                    score_cp(p, ErrorUnit::kWord),
                    score_cp(p, ErrorUnit::kChar),
                    count_sc(p.reference),
                    count_sc(p.hypothesis)};
    w.push_back(b.wer);
    c.push_back(b.cer);
    cw.push_back(b.cpwer);
    cc.push_back(b.cpcer);
    if (b.cpwer.approximate || b.cpcer.approximate) ++report.approximate_pairs;
    report.pairs.push_back(std::move(b));
  }
  report.wer = pooled(w);
  report.cer = pooled(c);
  report.cpwer = pooled(cw);
  report.cpcer = pooled(cc);
  report.sc_acc = sc_accuracy(pairs);
  return report;
}

std::string report_json(const MetricReport& r) {
  std::size_t words = 0, chars = 0;
  for (const auto& p : r.pairs) {
    words += p.wer.reference_length;
    chars += p.cer.reference_length;
  }
  json doc = {{"wer", r.wer},
              {"cer", r.cer},
              {"cpwer", r.cpwer},
              {"cpcer", r.cpcer},
              {"sc_acc", r.sc_acc},
              {"pairs", r.pairs.size()},
              {"reference_words", words},
              {"reference_chars", chars},
              {"approximate_pairs", r.approximate_pairs}};
  return doc.dump(2) + "\n";
}

std::string report_pairs_csv(const MetricReport& r) {
  std::string out =
      "id,ref_words,word_errors,cp_word_errors,ref_chars,char_errors,"
      "cp_char_errors,ref_sc,hyp_sc,approximate\n";
  for (const auto& p : r.pairs) {
    out += p.id + ',' + std::to_string(p.wer.reference_length) + ',' +
           std::to_string(p.wer.edits.total()) + ',' +
           std::to_string(p.cpwer.edits.total()) + ',' +
           std::to_string(p.cer.reference_length) + ',' +
           std::to_string(p.cer.edits.total()) + ',' +
           std::to_string(p.cpcer.edits.total()) + ',' + std::to_string(p.ref_sc) +
           ',' + std::to_string(p.hyp_sc) + ',' +
           ((p.cpwer.approximate || p.cpcer.approximate) ? "1" : "0") + '\n';
  }
  return out;
}

// --- bootstrap -----------------------------------------------------------------

namespace {

PairScore score_metric(const ScoredPair& p, Metric metric) {
  switch (metric) {
    case Metric::kWer: return score_plain(p, ErrorUnit::kWord);
    case Metric::kCer: return score_plain(p, ErrorUnit::kChar);
    case Metric::kCpWer: return score_cp(p, ErrorUnit::kWord);
    case Metric::kCpCer: return score_cp(p, ErrorUnit::kChar);
  }
  return {};
}

}  // namespace

BootstrapResult bootstrap_compare(const std::vector<ScoredPair>& pairs_a,
                                  const std::vector<ScoredPair>& pairs_b,
                                  Metric metric, std::size_t resamples,
                                  double alpha, std::uint64_t seed) {
  if (pairs_a.size() != pairs_b.size()) {
    fail(ErrorKind::kValidation, "bootstrap: systems score different pair sets");
  }
  for (std::size_t i = 0; i < pairs_a.size(); ++i) {
    if (pairs_a[i].id != pairs_b[i].id) {
      fail(ErrorKind::kValidation, "bootstrap: id mismatch at position " +
                                       std::to_string(i) + " ('" + pairs_a[i].id +
                                       "' vs '" + pairs_b[i].id + "')");
    }
  }
  if (pairs_a.empty()) fail(ErrorKind::kValidation, "bootstrap: no pairs");
  if (resamples == 0) fail(ErrorKind::kValidation, "bootstrap: resamples must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::kValidation, "bootstrap: alpha must be in (0, 1)");
  }

  const std::size_t n = pairs_a.size();
  std::vector<std::size_t> err_a(n), err_b(n), len_a(n), len_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto sa = score_metric(pairs_a[i], metric);
    const auto sb = score_metric(pairs_b[i], metric);
    err_a[i] = sa.edits.total();
    err_b[i] = sb.edits.total();
    len_a[i] = sa.reference_length;
    len_b[i] = sb.reference_length;
  }
  auto rate = [](std::size_t e, std::size_t l) {
    return l == 0 ? 0.0 : 100.0 * static_cast<double>(e) / static_cast<double>(l);
  };
  auto total = [](const std::vector<std::size_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::size_t{0});
  };

  BootstrapResult out;
  out.metric = metric;
  out.resamples = resamples;
  out.alpha = alpha;
  out.diff = rate(total(err_a), total(len_a)) - rate(total(err_b), total(len_b));

  Rng rng(seed);
  std::vector<double> diffs(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    std::size_t ea = 0, eb = 0, la = 0, lb = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(rng.index(n));
      ea += err_a[i];
      eb += err_b[i];
      la += len_a[i];
      lb += len_b[i];
    }
    diffs[b] = rate(ea, la) - rate(eb, lb);
  }
  out.ci_low = quantile_linear(diffs, alpha / 2.0);
  out.ci_high = quantile_linear(diffs, 1.0 - alpha / 2.0);
  out.resample_median = quantile_linear(diffs, 0.5);
  out.significant = out.ci_low > 0.0 || out.ci_high < 0.0;
  return out;
}

std::string bootstrap_json(const BootstrapResult& r) {
  json doc = {{"metric", to_string(r.metric)},
              {"diff", r.diff},
              {"ci_low", r.ci_low},
              {"ci_high", r.ci_high},
              {"resample_median", r.resample_median},
              {"significant", r.significant},
              {"resamples", r.resamples},
              {"alpha", r.alpha}};
  return doc.dump(2) + "\n";
}

// --- transcript files ------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> parse_transcripts(
    std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '[') {
    const json doc = detail::parse_json(text);
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string path = "$[" + std::to_string(i) + "]";
      out.emplace_back(detail::require<std::string>(doc[i], "id", path),
                       detail::require<std::string>(doc[i], "text", path));
    }
  } else {
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      std::vector<std::string_view> fields;
      std::size_t b = 0;
      for (std::size_t t; (t = line.find('\t', b)) != std::string_view::npos; b = t + 1) {
        fields.push_back(line.substr(b, t - b));
      }
      fields.push_back(line.substr(b));
      if (fields.size() == 1) {
        throw ParseError(line_no, "expected tab-separated id and text");
      }
      if (fields.size() == 2) {
        out.emplace_back(std::string(fields[0]), std::string(fields[1]));
      } else {
        out.emplace_back(std::string(fields[0]) + "/" + std::string(fields[1]),
                         std::string(fields[2]));
      }
    }
  }
  std::map<std::string_view, int> seen;
  for (const auto& [id, _] : out) {
    if (seen[id]++) fail(ErrorKind::kValidation, "duplicate transcript id '" + id + "'");
  }
  return out;
}

std::vector<ScoredPair> join_transcripts(
    const std::vector<std::pair<std::string, std::string>>& reference,
    const std::vector<std::pair<std::string, std::string>>& hypothesis) {
  std::map<std::string, const std::string*> hyp;
  for (const auto& [id, text] : hypothesis) hyp[id] = &text;
  std::vector<ScoredPair> out;
  for (const auto& [id, text] : reference) {
    auto it = hyp.find(id);
    if (it == hyp.end()) {
      fail(ErrorKind::kValidation, "id '" + id + "' has no hypothesis");
    }
    out.push_back({id, text, *it->second});
    hyp.erase(it);
  }
  if (!hyp.empty()) {
    fail(ErrorKind::kValidation,
         "id '" + hyp.begin()->first + "' has no reference");
  }
  return out;
}

std::vector<ScoredPair> parse_scored_pairs(std::string_view text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_array()) fail(ErrorKind::kSchema, "$: expected an array");
  std::vector<ScoredPair> out;
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "$[" + std::to_string(i) + "]";
    ScoredPair p{detail::require<std::string>(doc[i], "id", path),
                 detail::require<std::string>(doc[i], "reference", path),
                 detail::require<std::string>(doc[i], "hypothesis", path)};
    if (seen[p.id]++) fail(ErrorKind::kValidation, "duplicate pair id '" + p.id + "'");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace convsim
