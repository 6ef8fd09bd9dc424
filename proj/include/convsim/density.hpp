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

#include <span>
#include <utility>
#include <vector>

#include "convsim/rng.hpp"

namespace convsim {

double normal_pdf(double z);
double normal_cdf(double z);

// Silverman's rule, 0.9 * min(sd, IQR / 1.34) * n^(-1/5), with the sample
// standard deviation (n - 1) and type-7 (linear interpolation) quartiles.
// Returns `floor` when the rule yields zero. Requires >= 2 samples.
double silverman_bandwidth(std::span<const double> samples, double floor);

struct ScottBandwidths {
  double h_r = 0.0;
  double h_d = 0.0;
};

// Scott's rule sd * N^(-1/6) on each axis, lower-bounded by the floors.
ScottBandwidths scott_bandwidths(std::span<const std::pair<double, double>> pairs,
                                 double floor_r, double floor_d);

// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> xs);
// Quantile with linear interpolation between order statistics (type 7).
double quantile_linear(std::vector<double> xs, double p);

// Gaussian kernel density estimate over a fixed sample set. A zero bandwidth
// is a mixture of point masses: it can be sampled and has a step CDF, but
// no density.
class Kde1D {
 public:
  Kde1D(std::vector<double> samples, double bandwidth);

  const std::vector<double>& samples() const { return samples_; }
  double bandwidth() const { return bandwidth_; }

  double density(double x) const;
  double cdf(double x) const;
  double sample(Rng& rng) const;

  bool operator==(const Kde1D&) const = default;

 private:
  std::vector<double> samples_;
  double bandwidth_;
};

// Nadaraya-Watson conditional density of a residual r given a duration d,
// with Gaussian kernels on both axes.
class ConditionalKde {
 public:
  struct Pair {
    double r = 0.0;
    double d = 0.0;
    bool operator==(const Pair&) const = default;
  };

  // Bandwidths are raised to their floors here.
  ConditionalKde(std::vector<Pair> pairs, double h_r, double h_d,
                 double floor_r, double floor_d);

  // Bandwidths from Scott's rule, then floored.
  static ConditionalKde fit(std::vector<Pair> pairs, double floor_r,
                            double floor_d);

  const std::vector<Pair>& pairs() const { return pairs_; }
  double h_r() const { return h_r_; }
  double h_d() const { return h_d_; }

  // Normalised duration weights K_d((d* - d_i) / h_d) / sum. When every
  // weight underflows, falls back to uniform weights and sets *fell_back.
  std::vector<double> weights(double d_star, bool* fell_back = nullptr) const;

  double density(double r, double d_star) const;
  // Mixture CDF in r at duration d_star.
  double cdf(double r, double d_star) const;
  double sample(double d_star, Rng& rng) const;

  bool operator==(const ConditionalKde&) const = default;

 private:
  std::vector<Pair> pairs_;
  double h_r_;
  double h_d_;
};

// Yeo-Johnson power transform with a fixed lambda.
class YeoJohnson {
 public:
  explicit YeoJohnson(double lambda = 1.0) : lambda_(lambda) {}

  double lambda() const { return lambda_; }
  double forward(double x) const;
  // Throws Error(kDomain) when y is outside the transform's range.
  double inverse(double y) const;
  // True when inverse(y) is defined.
  bool in_range(double y) const;

  // Lambda maximising the Gaussian profile log-likelihood of the transformed
  // samples over [-5, 5]: grid at 0.01, then golden-section refinement.
  // Requires >= 3 samples that are not all equal.
  static YeoJohnson fit(std::span<const double> samples);

  // Profile log-likelihood (up to a constant) used by fit().
  static double log_likelihood(std::span<const double> samples, double lambda);

  bool operator==(const YeoJohnson&) const = default;

 private:
  double lambda_;
};

double yj_forward(double x, double lambda);
double yj_inverse(double y, double lambda);

}  // namespace convsim
