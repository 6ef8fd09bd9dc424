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

#include "convsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "convsim/error.hpp"
#include "detail/json_util.hpp"

namespace convsim {

using nlohmann::json;

std::string_view to_string(ModelMode mode) {
  return mode == ModelMode::kSasc ? "sasc" : "csasc";
}

ModelMode parse_model_mode(std::string_view text) {
  if (text == "sasc") return ModelMode::kSasc;
  if (text == "csasc") return ModelMode::kCSasc;
  fail(ErrorKind::kValidation, "unknown model mode '" + std::string(text) + "'");
}

void StatsModel::validate() const {
  const bool want_kde = mode == ModelMode::kSasc;
  for (const auto* r : {&residual_same, &residual_diff}) {
    if (std::holds_alternative<Kde1D>(*r) != want_kde) {
      fail(ErrorKind::kValidation,
           "residual representation does not match model mode");
    }
  }
}

double StatsModel::sample_residual(TransitionType t,
                                   std::optional<double> d_star,
                                   Rng& rng) const {
  const auto& res = residual(t);
  if (const auto* kde = std::get_if<Kde1D>(&res)) return kde->sample(rng);
  if (!d_star) {
    fail(ErrorKind::kInternal, "C-SASC residual draw without a duration");
  }
  const auto& cond = std::get<ConditionalResidual>(res);
  constexpr int kMaxDraws = 1000;
  double y = 0.0;
  for (int i = 0; i < kMaxDraws; ++i) {
    y = cond.kde.sample(*d_star, rng);
    if (cond.transform.in_range(y)) return cond.transform.inverse(y);
  }
  fail(ErrorKind::kInternal,
       "C-SASC residual draw stayed outside the transform range");
}

namespace {

Kde1D mean_kde(const std::vector<double>& means, double floor) {
  return Kde1D(means, silverman_bandwidth(means, floor));
}

ConditionalResidual fit_conditional(const std::vector<ResidualSample>& samples,
                                    const FitParams& params) {
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(s.residual);
  // Near-constant residuals (spread at rounding level) carry no shape
  // information; keep the identity transform for them.
  YeoJohnson transform(1.0);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (values.size() >= 3 && *hi - *lo > 1e-9) {
    transform = YeoJohnson::fit(values);
  }
  std::vector<ConditionalKde::Pair> pairs;
  pairs.reserve(samples.size());
  for (const auto& s : samples) {
    pairs.push_back({transform.forward(s.residual), s.duration});
  }
  return {transform,
          ConditionalKde::fit(std::move(pairs), params.floor_r, params.floor_d)};
}

}  // namespace

StatsModel fit_stats_model(const std::vector<ConversationAnnotation>& annotations,
                           ModelMode mode, const FitParams& params) {
  if (!(params.alpha > 0.0)) fail(ErrorKind::kValidation, "alpha must be > 0");
  if (!(params.floor_mu > 0.0) || !(params.floor_r > 0.0) ||
      !(params.floor_d > 0.0)) {
    fail(ErrorKind::kValidation, "bandwidth floors must be > 0");
  }
  std::vector<GapObservation> observations;
  std::vector<TurnSequence> sequences;
  for (const auto& conv : annotations) {
    auto obs = extract_gaps(conv);
    observations.insert(observations.end(), obs.begin(), obs.end());
    sequences.push_back(turn_sequences(conv));
  }
  if (observations.empty()) {
    fail(ErrorKind::kValidation, "no conversations to fit");
  }
  const auto means = speaker_means(observations, params.min_obs);
  std::vector<double> mu_same, mu_diff;
  for (const auto& s : means.summaries) {
    if (s.mean_same) mu_same.push_back(*s.mean_same);
    if (s.mean_diff) mu_diff.push_back(*s.mean_diff);
  }
  std::string missing;
  if (mu_same.size() < 2) missing += " same";
  if (mu_diff.size() < 2) missing += " diff";
  if (!missing.empty()) {
    fail(ErrorKind::kValidation,
         "fewer than 2 speakers with >= " + std::to_string(params.min_obs) +
             " observations for transition type(s):" + missing);
  }

  const auto res = residuals(observations, means.summaries);
  std::vector<ResidualSample> res_same, res_diff;
  for (const auto& r : res) {
    (r.transition == TransitionType::kSame ? res_same : res_diff).push_back(r);
  }

  ModelMeta meta;
  meta.source = params.source;
  meta.params = params;
  meta.overlap_ratio = overlap_ratio(observations);
  meta.counts.conversations = annotations.size();
  for (const auto& o : observations) {
    (o.transition == TransitionType::kSame ? meta.counts.observations_same
                                           : meta.counts.observations_diff)++;
  }
  meta.counts.speakers_same = mu_same.size();
  meta.counts.speakers_diff = mu_diff.size();
  meta.counts.residuals_same = res_same.size();
  meta.counts.residuals_diff = res_diff.size();
  meta.counts.omitted_speakers = means.omitted_speakers;

  auto residual_model = [&](const std::vector<ResidualSample>& s) -> ResidualModel {
    if (mode == ModelMode::kSasc) {
      std::vector<double> v;
      v.reserve(s.size());
      for (const auto& x : s) v.push_back(x.residual);
      return Kde1D(std::move(v), params.alpha);
    }
    return fit_conditional(s, params);
  };

  StatsModel model{mode,
                   mean_kde(mu_same, params.floor_mu),
                   mean_kde(mu_diff, params.floor_mu),
                   residual_model(res_same),
                   residual_model(res_diff),
                   estimate_transitions(sequences),
                   std::move(meta)};
  return model;
}

double p_overlap(const StatsModel& model, TransitionType t, double speaker_mu,
                 std::optional<double> d_star) {
  const auto& res = model.residual(t);
  if (const auto* kde = std::get_if<Kde1D>(&res)) return kde->cdf(-speaker_mu);
  if (!d_star) {
    fail(ErrorKind::kDomain, "p_overlap: C-SASC mode requires a duration");
  }
  const auto& cond = std::get<ConditionalResidual>(res);
  return cond.kde.cdf(cond.transform.forward(-speaker_mu), *d_star);
}

// --- JSON ------------------------------------------------------------------

namespace {

json kde_json(const Kde1D& kde) {
  return {{"samples", kde.samples()}, {"bandwidth", kde.bandwidth()}};
}

json residual_json(const ResidualModel& res) {
  if (const auto* kde = std::get_if<Kde1D>(&res)) return kde_json(*kde);
  const auto& cond = std::get<ConditionalResidual>(res);
  json pairs = json::array();
  for (const auto& p : cond.kde.pairs()) pairs.push_back({p.r, p.d});
  return {{"pairs", pairs},
          {"h_r", cond.kde.h_r()},
          {"h_d", cond.kde.h_d()},
          {"lambda", cond.transform.lambda()}};
}

Kde1D kde_from_json(const json& j, const std::string& path) {
  const auto& samples = detail::require_field(j, "samples", path);
  if (!samples.is_array()) fail(ErrorKind::kSchema, path + ".samples: expected array");
  std::vector<double> v;
  for (const auto& x : samples) {
    if (!x.is_number()) fail(ErrorKind::kSchema, path + ".samples: expected numbers");
    v.push_back(x.get<double>());
  }
  return Kde1D(std::move(v), detail::require<double>(j, "bandwidth", path));
}

ResidualModel residual_from_json(const json& j, ModelMode mode,
                                 const std::string& path,
                                 const FitParams& params) {
  if (mode == ModelMode::kSasc) return kde_from_json(j, path);
  const auto& pairs_j = detail::require_field(j, "pairs", path);
  if (!pairs_j.is_array()) fail(ErrorKind::kSchema, path + ".pairs: expected array");
  std::vector<ConditionalKde::Pair> pairs;
  for (const auto& p : pairs_j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail(ErrorKind::kSchema, path + ".pairs: expected [r, d] number pairs");
    }
    pairs.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  const double h_r = detail::require<double>(j, "h_r", path);
  const double h_d = detail::require<double>(j, "h_d", path);
  return ConditionalResidual{
      YeoJohnson(detail::require<double>(j, "lambda", path)),
      ConditionalKde(std::move(pairs), h_r, h_d,
                     std::min(h_r, params.floor_r), std::min(h_d, params.floor_d))};
}

}  // namespace

std::string stats_model_to_json(const StatsModel& model) {
  const auto& p = model.meta.params;
  const auto& c = model.meta.counts;
  json probs = json::array();
  for (const auto& row : model.transition.probs()) probs.push_back(row);
  json doc = {
      {"version", "1"},
      {"mode", to_string(model.mode)},
      {"mean_same", kde_json(model.mean_same)},
      {"mean_diff", kde_json(model.mean_diff)},
      {"residual_same", residual_json(model.residual_same)},
      {"residual_diff", residual_json(model.residual_diff)},
      {"transition",
       {{"states", TransitionMatrix::state_labels()}, {"probs", probs}}},
      {"metadata",
       {{"source", model.meta.source},
        {"alpha", p.alpha},
        {"floors", {{"mu", p.floor_mu}, {"r", p.floor_r}, {"d", p.floor_d}}},
        {"min_obs", p.min_obs},
        {"overlap_ratio", model.meta.overlap_ratio},
        {"counts",
         {{"conversations", c.conversations},
          {"observations_same", c.observations_same},
          {"observations_diff", c.observations_diff},
          {"speakers_same", c.speakers_same},
          {"speakers_diff", c.speakers_diff},
          {"residuals_same", c.residuals_same},
          {"residuals_diff", c.residuals_diff},
          {"omitted_speakers", c.omitted_speakers}}}}}};
  return doc.dump(2) + "\n";
}

StatsModel stats_model_from_json(std::string_view text) {
  const json doc = detail::parse_json(text);
  const std::string version = detail::require<std::string>(doc, "version", "$");
  if (version != "1") {
    fail(ErrorKind::kUnsupported, "stats model version '" + version + "'");
  }
  const ModelMode mode =
      parse_model_mode(detail::require<std::string>(doc, "mode", "$"));

  const auto& meta_j = detail::require_field(doc, "metadata", "$");
  ModelMeta meta;
  meta.source = detail::require<std::string>(meta_j, "source", "$.metadata");
  meta.overlap_ratio =
      detail::optional<double>(meta_j, "overlap_ratio", "$.metadata").value_or(0.0);
  auto& p = meta.params;
  p.source = meta.source;
  p.alpha = detail::require<double>(meta_j, "alpha", "$.metadata");
  p.min_obs = detail::optional<std::size_t>(meta_j, "min_obs", "$.metadata")
                  .value_or(kDefaultMinObservations);
  const auto& floors = detail::require_field(meta_j, "floors", "$.metadata");
  p.floor_mu = detail::require<double>(floors, "mu", "$.metadata.floors");
  p.floor_r = detail::require<double>(floors, "r", "$.metadata.floors");
  p.floor_d = detail::require<double>(floors, "d", "$.metadata.floors");
  if (auto it = meta_j.find("counts"); it != meta_j.end()) {
    const std::string path = "$.metadata.counts";
    auto get = [&](const char* key) {
      return detail::optional<std::size_t>(*it, key, path).value_or(0);
    };
    auto& c = meta.counts;
    c.conversations = get("conversations");
    c.observations_same = get("observations_same");
    c.observations_diff = get("observations_diff");
    c.speakers_same = get("speakers_same");
    c.speakers_diff = get("speakers_diff");
    c.residuals_same = get("residuals_same");
    c.residuals_diff = get("residuals_diff");
    c.omitted_speakers = get("omitted_speakers");
  }

  const auto& tr = detail::require_field(doc, "transition", "$");
  const auto& probs_j = detail::require_field(tr, "probs", "$.transition");
  if (!probs_j.is_array() || probs_j.size() != TransitionMatrix::kStates) {
    fail(ErrorKind::kSchema, "$.transition.probs: expected a 2x2 matrix");
  }
  std::array<TransitionMatrix::Row, TransitionMatrix::kStates> probs{};
  for (int i = 0; i < TransitionMatrix::kStates; ++i) {
    const auto& row = probs_j[i];
    if (!row.is_array() || row.size() != TransitionMatrix::kStates) {
      fail(ErrorKind::kSchema, "$.transition.probs: expected a 2x2 matrix");
    }
    for (int j = 0; j < TransitionMatrix::kStates; ++j) {
      if (!row[j].is_number()) {
        fail(ErrorKind::kSchema, "$.transition.probs: expected numbers");
      }
      probs[i][j] = row[j].get<double>();
    }
  }

  StatsModel model{
      mode,
      kde_from_json(detail::require_field(doc, "mean_same", "$"), "$.mean_same"),
      kde_from_json(detail::require_field(doc, "mean_diff", "$"), "$.mean_diff"),
      residual_from_json(detail::require_field(doc, "residual_same", "$"), mode,
                         "$.residual_same", p),
      residual_from_json(detail::require_field(doc, "residual_diff", "$"), mode,
                         "$.residual_diff", p),
      TransitionMatrix(probs),
      std::move(meta)};
  model.validate();
  return model;
}

// --- density curves ----------------------------------------------------------

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(n - 1);
  }
  return xs;
}

std::pair<double, double> auto_range(const std::vector<double>& samples,
                                     double h, const CurveGrid& grid) {
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const double pad = 6.0 * std::max(h, 1e-3);
  return {grid.x_min.value_or(*lo - pad), grid.x_max.value_or(*hi + pad)};
}

DensityCurve kde_curve(std::string name, const Kde1D& kde,
                       const CurveGrid& grid) {
  const auto [lo, hi] = auto_range(kde.samples(), kde.bandwidth(), grid);
  DensityCurve c{std::move(name), linspace(lo, hi, grid.points), {}};
  c.density.reserve(c.x.size());
  for (double x : c.x) {
    c.density.push_back(kde.bandwidth() > 0.0 ? kde.density(x) : 0.0);
  }
  return c;
}

// Derivative of the Yeo-Johnson transform: (1 + |x|)^((lambda - 1) sgn x).
double yj_jacobian(double x, double lambda) {
  return x >= 0.0 ? std::pow(1.0 + x, lambda - 1.0)
                  : std::pow(1.0 - x, 1.0 - lambda);
}

DensityCurve conditional_curve(std::string name, const ConditionalResidual& cond,
                               double d_star, const CurveGrid& grid) {
  std::vector<double> raw;
  for (const auto& p : cond.kde.pairs()) {
    // Grid bounds in seconds; transformed points outside the inverse range
    // have no preimage and are skipped.
    if (cond.transform.in_range(p.r)) raw.push_back(cond.transform.inverse(p.r));
  }
  if (raw.empty()) raw.push_back(0.0);
  // Pad in residual space by the bandwidth mapped through the inverse slope.
  const auto [lo0, hi0] = std::minmax_element(raw.begin(), raw.end());
  const double span = std::max(*hi0 - *lo0, 1e-3);
  const double pad = 6.0 * cond.kde.h_r() + 0.5 * span;
  const double lo = grid.x_min.value_or(*lo0 - pad);
  const double hi = grid.x_max.value_or(*hi0 + pad);
  DensityCurve c{std::move(name), linspace(lo, hi, grid.points), {}};
  c.density.reserve(c.x.size());
  for (double x : c.x) {
    const double y = cond.transform.forward(x);
    c.density.push_back(cond.kde.density(y, d_star) *
                        yj_jacobian(x, cond.transform.lambda()));
  }
  return c;
}

std::string format_d(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", d);
  return buf;
}

}  // namespace

std::vector<DensityCurve> density_curves(const StatsModel& model,
                                         const CurveGrid& grid,
                                         const std::vector<double>& d_stars) {
  if (grid.points < 2) fail(ErrorKind::kValidation, "curve grid needs >= 2 points");
  std::vector<DensityCurve> out;
  out.push_back(kde_curve("mean_same", model.mean_same, grid));
  out.push_back(kde_curve("mean_diff", model.mean_diff, grid));
  for (auto t : {TransitionType::kSame, TransitionType::kDiff}) {
    const std::string base = "residual_" + std::string(to_string(t));
    const auto& res = model.residual(t);
    if (const auto* kde = std::get_if<Kde1D>(&res)) {
      out.push_back(kde_curve(base, *kde, grid));
      continue;
    }
    const auto& cond = std::get<ConditionalResidual>(res);
    for (double d : d_stars) {
      out.push_back(conditional_curve(base + "_d" + format_d(d), cond, d, grid));
    }
  }
  return out;
}

std::string curve_csv(const DensityCurve& curve) {
  std::string out = "x,density\n";
  char buf[80];
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", curve.x[i], curve.density[i]);
    out += buf;
  }
  return out;
}

}  // namespace convsim
