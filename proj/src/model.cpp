#include "binreg/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

#include "binreg/errors.hpp"

namespace binreg {

namespace {

constexpr double kGeometricTolerance = 1e-8;

void require_dims(const ParameterVector& theta, std::span<const double> x) {
  if (theta.size() != x.size() + 1) {
    throw ContractError("parameter vector has " + std::to_string(theta.size()) +
                        " entries but the feature vector has " + std::to_string(x.size()) +
                        " (expected d + 1 = " + std::to_string(x.size() + 1) + ")");
  }
}

void require_escort_gamma(double gamma) {
  if (!std::isfinite(gamma)) throw ParameterError("escort exponent must be finite");
  if (std::fabs(gamma + 1.0) < kGeometricTolerance) {
    throw ParameterError(
        "escort distribution is undefined at gamma = -1; use the geometric-limit loss "
        "(gamma:-1) instead");
  }
}

Gradient scaled_design(double factor, std::span<const double> x) {
  Gradient out(x.size() + 1);
  out[0] = factor;
  for (std::size_t j = 0; j < x.size(); ++j) out[j + 1] = factor * x[j];
  return out;
}

}  // namespace

ParameterVector::ParameterVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ContractError("parameter vector needs at least an intercept");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ContractError("parameter vector entries must be finite");
  }
}

ParameterVector::ParameterVector(std::initializer_list<double> values)
    : ParameterVector(std::vector<double>(values)) {}

ParameterVector ParameterVector::zeros(std::size_t feature_dim) {
  return ParameterVector(std::vector<double>(feature_dim + 1, 0.0));
}

Dataset::Dataset(std::size_t feature_dim) : dim_(feature_dim) {}

Dataset::Dataset(const std::vector<Observation>& observations)
    : dim_(observations.empty() ? 0 : observations.front().features.size()) {
  reserve(observations.size());
  for (const auto& obs : observations) add(obs.features, obs.label);
}

void Dataset::reserve(std::size_t n) {
  features_.reserve(n * dim_);
  labels_.reserve(n);
}

void Dataset::add(std::span<const double> features, int label) {
  if (features.size() != dim_) {
    throw ContractError("observation has " + std::to_string(features.size()) +
                        " features, dataset expects " + std::to_string(dim_));
  }
  require_label(label);
  for (double v : features) {
    if (!std::isfinite(v)) throw ContractError("feature values must be finite");
  }
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

std::size_t Dataset::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&dim_, sizeof dim_);
  mix(features_.data(), features_.size() * sizeof(double));
  mix(labels_.data(), labels_.size() * sizeof(int));
  return static_cast<std::size_t>(h);
}

void require_label(int y) {
  if (y != 0 && y != 1) throw ContractError("label must be 0 or 1, got " + std::to_string(y));
}

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == -HUGE_VAL) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

double linear_predictor(const ParameterVector& theta, std::span<const double> x) {
  require_dims(theta, x);
  double z = theta[0];
  for (std::size_t j = 0; j < x.size(); ++j) z += theta[j + 1] * x[j];
  return z;
}

double conditional_prob(Link link, const ParameterVector& theta, std::span<const double> x,
                        int y) {
  require_label(y);
  const double z = linear_predictor(theta, x);
  return y == 1 ? cdf(link, z) : sf(link, z);
}

double escort_probability(Link link, const ParameterVector& theta, std::span<const double> x,
                          int y, double gamma) {
  require_label(y);
  require_escort_gamma(gamma);
  const double z = linear_predictor(theta, x);
  const double u = gamma + 1.0;
  const double a1 = u * log_cdf(link, z);
  const double a0 = u * log_sf(link, z);
  return std::exp((y == 1 ? a1 : a0) - log_sum_exp(a0, a1));
}

Gradient score(Link link, const ParameterVector& theta, std::span<const double> x, int y) {
  require_label(y);
  const double z = linear_predictor(theta, x);
  const double factor = y == 1 ? hazard_lower(link, z) : -hazard_upper(link, z);
  return scaled_design(factor, x);
}

Gradient escort_score(Link link, const ParameterVector& theta, std::span<const double> x, int y,
                      double gamma) {
  if (gamma == 0.0) return score(link, theta, x, y);
  require_label(y);
  require_escort_gamma(gamma);
  const double z = linear_predictor(theta, x);
  const LinkEval e = evaluate(link, z);
  const double u = gamma + 1.0;
  const double norm = log_sum_exp(u * e.log_sf, u * e.log_cdf);
  // d/dz log q_γ(y) = u · q_γ(1-y) · (g/G + g/Ḡ), signed towards class y.
  const double hazard_sum = e.hazard_lower + e.hazard_upper;
  const double factor = y == 1 ? u * std::exp(u * e.log_sf - norm) * hazard_sum
                               : -u * std::exp(u * e.log_cdf - norm) * hazard_sum;
  return scaled_design(factor, x);
}

}  // namespace binreg
