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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "convsim/annotations.hpp"
#include "convsim/density.hpp"
#include "convsim/rng.hpp"
#include "convsim/stats.hpp"
#include "convsim/turns.hpp"

namespace convsim {

enum class ModelMode { kSasc, kCSasc };

std::string_view to_string(ModelMode mode);
ModelMode parse_model_mode(std::string_view text);

struct FitParams {
  double alpha = 0.1;  // fixed residual bandwidth (SASC), seconds
  double floor_mu = 0.01;
  double floor_r = 0.01;
  double floor_d = 0.05;
  std::size_t min_obs = kDefaultMinObservations;
  std::string source = "unnamed";
};

// Duration-conditioned residual model: a conditional KDE fitted on
// Yeo-Johnson transformed residuals.
struct ConditionalResidual {
  YeoJohnson transform;
  ConditionalKde kde;

  bool operator==(const ConditionalResidual&) const = default;
};

using ResidualModel = std::variant<Kde1D, ConditionalResidual>;

struct ModelCounts {
  std::size_t conversations = 0;
  std::size_t observations_same = 0;
  std::size_t observations_diff = 0;
  std::size_t speakers_same = 0;
  std::size_t speakers_diff = 0;
  std::size_t residuals_same = 0;
  std::size_t residuals_diff = 0;
  std::size_t omitted_speakers = 0;

  bool operator==(const ModelCounts&) const = default;
};

struct ModelMeta {
  std::string source;
  ModelCounts counts;
  double overlap_ratio = 0.0;
  FitParams params;

  bool operator==(const ModelMeta& o) const {
    return source == o.source && counts == o.counts &&
           overlap_ratio == o.overlap_ratio && params.alpha == o.params.alpha &&
           params.floor_mu == o.params.floor_mu &&
           params.floor_r == o.params.floor_r &&
           params.floor_d == o.params.floor_d &&
           params.min_obs == o.params.min_obs;
  }
};

// The fitted conversational timing model. In SASC mode both residual models
// hold a Kde1D; in C-SASC mode both hold a ConditionalResidual.
struct StatsModel {
  ModelMode mode = ModelMode::kSasc;
  Kde1D mean_same;
  Kde1D mean_diff;
  ResidualModel residual_same;
  ResidualModel residual_diff;
  TransitionMatrix transition;
  ModelMeta meta;

  const Kde1D& mean_kde(TransitionType t) const {
    return t == TransitionType::kSame ? mean_same : mean_diff;
  }
  const ResidualModel& residual(TransitionType t) const {
    return t == TransitionType::kSame ? residual_same : residual_diff;
  }

  // Throws Error(kValidation) when the residual representation does not
  // match the mode.
  void validate() const;

  // Residual draw. d_star is required in C-SASC mode and ignored otherwise.
  // In C-SASC mode the draw is made in transformed space and mapped back;
  // draws outside the inverse transform's range are redrawn.
  double sample_residual(TransitionType t, std::optional<double> d_star,
                         Rng& rng) const;

  bool operator==(const StatsModel&) const = default;
};

StatsModel fit_stats_model(const std::vector<ConversationAnnotation>& annotations,
                           ModelMode mode, const FitParams& params);

// Probability that mu + residual < 0 for the given transition type.
double p_overlap(const StatsModel& model, TransitionType t, double speaker_mu,
                 std::optional<double> d_star = std::nullopt);

// JSON with "version": "1". Samples and bandwidths are stored verbatim, so
// a round trip reproduces every double bit for bit.
std::string stats_model_to_json(const StatsModel& model);
StatsModel stats_model_from_json(std::string_view text);

struct DensityCurve {
  std::string name;
  std::vector<double> x;
  std::vector<double> density;
};

struct CurveGrid {
  std::optional<double> x_min;  // default: data range +- 6 bandwidths
  std::optional<double> x_max;
  std::size_t points = 1001;
};

// Mean-pause and residual density curves. Residual curves are in seconds;
// C-SASC residual curves are emitted once per requested duration and include
// the Jacobian of the Yeo-Johnson transform.
std::vector<DensityCurve> density_curves(const StatsModel& model,
                                         const CurveGrid& grid,
                                         const std::vector<double>& d_stars);

std::string curve_csv(const DensityCurve& curve);

}  // namespace convsim
