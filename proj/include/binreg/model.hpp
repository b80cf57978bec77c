#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "binreg/links.hpp"

namespace binreg {

using Gradient = std::vector<double>;

/// Coefficients θ of the linear predictor z = θ₀ + Σ θ_j x_j. Index 0 is the
/// intercept; the features never carry their own constant column.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::vector<double> values);
  ParameterVector(std::initializer_list<double> values);

  static ParameterVector zeros(std::size_t feature_dim);

  /// Number of features d; the vector holds d + 1 entries.
  std::size_t feature_dim() const { return values_.size() - 1; }
  std::size_t size() const { return values_.size(); }
  double intercept() const { return values_.front(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

 private:
  std::vector<double> values_;
};

struct Observation {
  std::vector<double> features;
  int label = 0;
};

/// n labelled observations with a common feature dimension, stored row-major.
class Dataset {
 public:
  explicit Dataset(std::size_t feature_dim);
  explicit Dataset(const std::vector<Observation>& observations);

  void add(std::span<const double> features, int label);
  void reserve(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t feature_dim() const { return dim_; }
  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }
  std::span<const double> flat_features() const { return features_; }

  /// FNV-1a over the raw bytes of features and labels.
  std::size_t content_hash() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<int> labels_;
};

void require_label(int y);

/// θ₀ + Σ_j θ_j x_j. ContractError unless dim(θ) = dim(x) + 1.
double linear_predictor(const ParameterVector& theta, std::span<const double> x);

/// q(y|x;θ): G(z) for y = 1 and Ḡ(z) for y = 0.
double conditional_prob(Link link, const ParameterVector& theta, std::span<const double> x,
                        int y);

/// Escort probability q_γ(y|x;θ) = q(y)^{γ+1} / Σ_m q(m)^{γ+1}, formed in the
/// log domain. ParameterError at γ = -1 where the normalizer degenerates.
double escort_probability(Link link, const ParameterVector& theta, std::span<const double> x,
                          int y, double gamma);

/// ∇_θ log q(y|x;θ).
Gradient score(Link link, const ParameterVector& theta, std::span<const double> x, int y);

/// ∇_θ log q_γ(y|x;θ). At γ = 0 this is score() itself.
Gradient escort_score(Link link, const ParameterVector& theta, std::span<const double> x, int y,
                      double gamma);

/// log Σ_i exp(a_i) for two terms.
double log_sum_exp(double a, double b);

}  // namespace binreg
