#pragma once

#include <random>
#include <span>
#include <variant>
#include <vector>

#include "binreg/links.hpp"
#include "binreg/model.hpp"

namespace binreg {

// Conditional laws p(y = 1 | x).

/// The binary regression model itself at fixed parameters (correct specification).
struct ModelConditional {
  Link link;
  ParameterVector theta;
};

/// p(1|x) = probability for every x.
struct ConstantConditional {
  double probability;
};

/// Posterior class-1 probability of a two-population normal mixture:
/// class 1 ~ N(mean1, I), class 0 ~ N(mean0, scale0·I), prior P(Y = 1) = rate.
struct BinormalConditional {
  double rate;
  std::vector<double> mean1;
  std::vector<double> mean0;
  double scale0;
};

using Conditional = std::variant<ModelConditional, ConstantConditional, BinormalConditional>;

// Feature distributions p(x).

/// Independent Unif[lower, upper] coordinates.
struct UniformBoxSampler {
  std::size_t dim;
  double lower;
  double upper;
};

/// Independent N(0, 1) coordinates.
struct StandardNormalSampler {
  std::size_t dim;
};

/// Marginal of the binormal mixture described by BinormalConditional.
struct BinormalMixtureSampler {
  double rate;
  std::vector<double> mean1;
  std::vector<double> mean0;
  double scale0;
};

using FeatureSampler = std::variant<UniformBoxSampler, StandardNormalSampler, BinormalMixtureSampler>;

/// Population truth p(x)·p(y|x) used by the diagnostics and the pseudo-true
/// parameter search.
struct TruthModel {
  Conditional conditional;
  FeatureSampler features;

  std::size_t feature_dim() const;
  /// p(y | x), always within [0, 1]. The y = 0 value is computed directly, not
  /// as 1 - p(1 | x), so it keeps its precision when p(1 | x) rounds to 1.
  double prob(std::span<const double> x, int y) const;
  double prob_one(std::span<const double> x) const { return prob(x, 1); }
  /// Draws n feature vectors, row-major.
  std::vector<double> sample_features(std::size_t n, std::mt19937_64& rng) const;

  /// Binormal truth with conditional and marginal that agree with each other.
  static TruthModel binormal(double rate, std::vector<double> mean1, std::vector<double> mean0,
                             double scale0);
};

}  // namespace binreg
