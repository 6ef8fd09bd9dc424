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

#include "convsim/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "convsim/error.hpp"

namespace convsim {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;
}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

double sample_sd(std::span<const double> xs) {
  const auto n = xs.size();
  if (n < 2) fail(ErrorKind::kDomain, "standard deviation needs >= 2 samples");
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double quantile_linear(std::vector<double> xs, double p) {
  if (xs.empty()) fail(ErrorKind::kDomain, "quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double silverman_bandwidth(std::span<const double> samples, double floor) {
  if (samples.size() < 2) {
    fail(ErrorKind::kDomain, "Silverman bandwidth needs >= 2 samples");
  }
  std::vector<double> xs(samples.begin(), samples.end());
  const double sd = sample_sd(xs);
  const double iqr = quantile_linear(xs, 0.75) - quantile_linear(xs, 0.25);
  const double h = 0.9 * std::min(sd, iqr / 1.34) *
                   std::pow(static_cast<double>(xs.size()), -0.2);
  return h > 0.0 ? h : floor;
}

ScottBandwidths scott_bandwidths(
    std::span<const std::pair<double, double>> pairs, double floor_r,
    double floor_d) {
  if (pairs.size() < 2) {
    fail(ErrorKind::kDomain, "Scott bandwidths need >= 2 pairs");
  }
  std::vector<double> rs, ds;
  rs.reserve(pairs.size());
  ds.reserve(pairs.size());
  for (const auto& [r, d] : pairs) {
    rs.push_back(r);
    ds.push_back(d);
  }
  const double scale = std::pow(static_cast<double>(pairs.size()), -1.0 / 6.0);
  return {std::max(sample_sd(rs) * scale, floor_r),
          std::max(sample_sd(ds) * scale, floor_d)};
}

// --- Kde1D ---------------------------------------------------------------

Kde1D::Kde1D(std::vector<double> samples, double bandwidth)
    : samples_(std::move(samples)), bandwidth_(bandwidth) {
  if (samples_.empty()) fail(ErrorKind::kValidation, "KDE needs samples");
  if (!(bandwidth_ >= 0.0) || !std::isfinite(bandwidth_)) {
    fail(ErrorKind::kValidation, "KDE bandwidth must be finite and >= 0");
  }
  for (double x : samples_) {
    if (!std::isfinite(x)) fail(ErrorKind::kValidation, "non-finite KDE sample");
  }
}

double Kde1D::density(double x) const {
  if (bandwidth_ == 0.0) {
    fail(ErrorKind::kDomain, "point-mass KDE has no density");
  }
  double acc = 0.0;
  for (double xi : samples_) acc += normal_pdf((x - xi) / bandwidth_);
  return acc / (static_cast<double>(samples_.size()) * bandwidth_);
}

double Kde1D::cdf(double x) const {
  double acc = 0.0;
  if (bandwidth_ == 0.0) {
    for (double xi : samples_) acc += x >= xi ? 1.0 : 0.0;
  } else {
    for (double xi : samples_) acc += normal_cdf((x - xi) / bandwidth_);
  }
  return acc / static_cast<double>(samples_.size());
}

double Kde1D::sample(Rng& rng) const {
  const double center = samples_[rng.index(samples_.size())];
  const double z = rng.normal();
  return center + bandwidth_ * z;
}

// --- ConditionalKde --------------------------------------------------------

ConditionalKde::ConditionalKde(std::vector<Pair> pairs, double h_r, double h_d,
                               double floor_r, double floor_d)
    : pairs_(std::move(pairs)),
      h_r_(std::max(h_r, floor_r)),
      h_d_(std::max(h_d, floor_d)) {
  if (pairs_.empty()) {
    fail(ErrorKind::kValidation, "conditional KDE needs at least one pair");
  }
  if (!(h_r_ > 0.0) || !(h_d_ > 0.0) || !std::isfinite(h_r_) ||
      !std::isfinite(h_d_)) {
    fail(ErrorKind::kValidation, "conditional KDE bandwidths must be > 0");
  }
}

ConditionalKde ConditionalKde::fit(std::vector<Pair> pairs, double floor_r,
                                   double floor_d) {
  std::vector<std::pair<double, double>> xy;
  xy.reserve(pairs.size());
  for (const auto& p : pairs) xy.emplace_back(p.r, p.d);
  const auto bw = scott_bandwidths(xy, floor_r, floor_d);
  return ConditionalKde(std::move(pairs), bw.h_r, bw.h_d, floor_r, floor_d);
}

std::vector<double> ConditionalKde::weights(double d_star,
                                            bool* fell_back) const {
  std::vector<double> w(pairs_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const double z = (d_star - pairs_[i].d) / h_d_;
    w[i] = std::exp(-0.5 * z * z);
    total += w[i];
  }
  const bool underflow = !(total > 0.0);
  if (fell_back) *fell_back = underflow;
  if (underflow) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (double& x : w) x /= total;
  return w;
}

namespace {
std::vector<double> weights_or_warn(const ConditionalKde& kde, double d_star) {
  bool fell_back = false;
  auto w = kde.weights(d_star, &fell_back);
  if (fell_back) {
    warn("conditional KDE: all duration weights underflowed at d*=" +
         std::to_string(d_star) + "; using unconditional residuals");
  }
  return w;
}
}  // namespace

double ConditionalKde::density(double r, double d_star) const {
  const auto w = weights_or_warn(*this, d_star);
  double acc = 0.0;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (w[i] != 0.0) acc += w[i] * normal_pdf((r - pairs_[i].r) / h_r_);
  }
  return acc / h_r_;
}

double ConditionalKde::cdf(double r, double d_star) const {
  const auto w = weights_or_warn(*this, d_star);
  double acc = 0.0;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (w[i] != 0.0) acc += w[i] * normal_cdf((r - pairs_[i].r) / h_r_);
  }
  return acc;
}

double ConditionalKde::sample(double d_star, Rng& rng) const {
  const auto w = weights_or_warn(*this, d_star);
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t chosen = pairs_.size() - 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (u < cum) {
      chosen = i;
      break;
    }
  }
  // Rounding can leave cum slightly below 1; the tail maps to the last
  // index with nonzero weight.
  while (w[chosen] == 0.0 && chosen > 0) --chosen;
  return pairs_[chosen].r + h_r_ * rng.normal();
}

// --- Yeo-Johnson -----------------------------------------------------------

double yj_forward(double x, double lambda) {
  if (x >= 0.0) {
    if (lambda == 0.0) return std::log1p(x);
    return std::expm1(lambda * std::log1p(x)) / lambda;
  }
  const double q = 2.0 - lambda;
  if (q == 0.0) return -std::log1p(-x);
  return -std::expm1(q * std::log1p(-x)) / q;
}

double yj_inverse(double y, double lambda) {
  if (!YeoJohnson(lambda).in_range(y)) {
    fail(ErrorKind::kDomain, "Yeo-Johnson inverse: " + std::to_string(y) +
                                 " outside the range for lambda " +
                                 std::to_string(lambda));
  }
  if (y >= 0.0) {
    if (lambda == 0.0) return std::expm1(y);
    return std::expm1(std::log1p(lambda * y) / lambda);
  }
  const double q = 2.0 - lambda;
  if (q == 0.0) return -std::expm1(-y);
  return -std::expm1(std::log1p(-q * y) / q);
}

double YeoJohnson::forward(double x) const { return yj_forward(x, lambda_); }
double YeoJohnson::inverse(double y) const { return yj_inverse(y, lambda_); }

bool YeoJohnson::in_range(double y) const {
  if (!std::isfinite(y)) return false;
  if (y >= 0.0) return lambda_ >= 0.0 || 1.0 + lambda_ * y > 0.0;
  return lambda_ <= 2.0 || 1.0 - (2.0 - lambda_) * y > 0.0;
}

double YeoJohnson::log_likelihood(std::span<const double> samples,
                                  double lambda) {
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  double jacobian = 0.0;
  std::vector<double> t(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    t[i] = yj_forward(samples[i], lambda);
    mean += t[i];
    jacobian += std::copysign(std::log1p(std::abs(samples[i])), samples[i]);
  }
  mean /= n;
  double var = 0.0;
  for (double v : t) var += (v - mean) * (v - mean);
  var /= n;
  if (!(var > 0.0) || !std::isfinite(var)) {
    return -std::numeric_limits<double>::infinity();
  }
  return -0.5 * n * std::log(var) + (lambda - 1.0) * jacobian;
}

YeoJohnson YeoJohnson::fit(std::span<const double> samples) {
  if (samples.size() < 3) {
    fail(ErrorKind::kDomain, "Yeo-Johnson fit needs >= 3 samples");
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  if (*lo_it == *hi_it) {
    fail(ErrorKind::kDomain, "Yeo-Johnson fit: all samples are equal");
  }
  constexpr double kMin = -5.0, kMax = 5.0, kStep = 0.01;
  constexpr int kSteps = 1000;
  int best_k = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kSteps; ++k) {
    const double ll = log_likelihood(samples, kMin + kStep * k);
    if (ll > best_ll) {
      best_ll = ll;
      best_k = k;
    }
  }
  if (!std::isfinite(best_ll)) {
    fail(ErrorKind::kDomain, "Yeo-Johnson fit: likelihood is degenerate");
  }
  // Golden-section search on the bracket around the best grid point.
  double a = std::max(kMin, kMin + kStep * (best_k - 1));
  double b = std::min(kMax, kMin + kStep * (best_k + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_likelihood(samples, c);
  double fd = log_likelihood(samples, d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_likelihood(samples, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_likelihood(samples, d);
    }
  }
  const double refined = 0.5 * (a + b);
  const double grid = kMin + kStep * best_k;
  return YeoJohnson(log_likelihood(samples, refined) >= best_ll ? refined
                                                                : grid);
}

}  // namespace convsim
