#include "binreg/truth.hpp"

#include <cmath>

#include "binreg/errors.hpp"

namespace binreg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double squared_distance(std::span<const double> x, const std::vector<double>& mean) {
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - mean[j];
    acc += d * d;
  }
  return acc;
}

}  // namespace

std::size_t TruthModel::feature_dim() const {
  return std::visit(overloaded{
                        [](const UniformBoxSampler& s) { return s.dim; },
                        [](const StandardNormalSampler& s) { return s.dim; },
                        [](const BinormalMixtureSampler& s) { return s.mean1.size(); },
                    },
                    features);
}

double TruthModel::prob(std::span<const double> x, int y) const {
  if (y != 0 && y != 1) throw ContractError("label must be 0 or 1");
  return std::visit(
      overloaded{
          [&](const ModelConditional& c) { return conditional_prob(c.link, c.theta, x, y); },
          [&](const ConstantConditional& c) { return y == 1 ? c.probability : 1.0 - c.probability; },
          [&](const BinormalConditional& c) {
            if (x.size() != c.mean1.size()) throw ContractError("binormal truth dimension mismatch");
            const double d = static_cast<double>(x.size());
            const double log_odds = std::log(c.rate) - std::log1p(-c.rate) -
                                    0.5 * squared_distance(x, c.mean1) +
                                    0.5 * squared_distance(x, c.mean0) / c.scale0 +
                                    0.5 * d * std::log(c.scale0);
            return y == 1 ? cdf(Link::logit, log_odds) : sf(Link::logit, log_odds);
          },
      },
      conditional);
}

std::vector<double> TruthModel::sample_features(std::size_t n, std::mt19937_64& rng) const {
  const std::size_t d = feature_dim();
  std::vector<double> out;
  out.reserve(n * d);
  std::visit(overloaded{
                 [&](const UniformBoxSampler& s) {
                   std::uniform_real_distribution<double> unif(s.lower, s.upper);
                   for (std::size_t i = 0; i < n * d; ++i) out.push_back(unif(rng));
                 },
                 [&](const StandardNormalSampler&) {
                   std::normal_distribution<double> normal(0.0, 1.0);
                   for (std::size_t i = 0; i < n * d; ++i) out.push_back(normal(rng));
                 },
                 [&](const BinormalMixtureSampler& s) {
                   std::bernoulli_distribution is_one(s.rate);
                   std::normal_distribution<double> normal(0.0, 1.0);
                   const double sd0 = std::sqrt(s.scale0);
                   for (std::size_t i = 0; i < n; ++i) {
                     const bool one = is_one(rng);
                     for (std::size_t j = 0; j < d; ++j) {
                       out.push_back(one ? s.mean1[j] + normal(rng) : s.mean0[j] + sd0 * normal(rng));
                     }
                   }
                 },
             },
             features);
  return out;
}

TruthModel TruthModel::binormal(double rate, std::vector<double> mean1, std::vector<double> mean0,
                                double scale0) {
  if (!(rate > 0.0 && rate < 1.0)) throw ParameterError("class-1 rate must lie in (0, 1)");
  if (!(scale0 > 0.0)) throw ParameterError("class-0 covariance scale must be positive");
  if (mean1.size() != mean0.size() || mean1.empty()) {
    throw ParameterError("binormal means must share a positive dimension");
  }
  return TruthModel{BinormalConditional{rate, mean1, mean0, scale0},
                    BinormalMixtureSampler{rate, std::move(mean1), std::move(mean0), scale0}};
}

}  // namespace binreg
