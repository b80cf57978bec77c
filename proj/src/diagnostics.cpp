#include "binreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "binreg/errors.hpp"

namespace binreg {

double contamination_effect(const LossSpec& spec, Link link, int y, double z, double z_prime) {
  if (!std::isfinite(z_prime)) throw DomainError("contamination target z' must be finite");
  const double slope = psi(spec, link, y, z);
  // No displacement, no effect, even where ψ itself has overflowed.
  if (z_prime == z) return 0.0;
  return slope * (z_prime - z);
}

std::string_view tail_class_name(TailClass c) {
  return c == TailClass::bounded ? "bounded" : "diverging";
}

std::string_view probe_outcome_name(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::to_zero: return "to_zero";
    case ProbeOutcome::to_infinity: return "to_infinity";
    case ProbeOutcome::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> default_scan_grid(Link link) {
  const double half_width = link == Link::cauchit ? 100.0 : 30.0;
  return linspace(-half_width, half_width, 1201);
}

BoundednessReport boundedness_scan(const LossSpec& spec, Link link, int y, double z_prime,
                                   std::span<const double> grid) {
  if (grid.empty()) throw ContractError("scan grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ContractError("scan grid must be strictly increasing");
  }

  BoundednessReport report;
  report.grid.assign(grid.begin(), grid.end());
  report.values.reserve(grid.size());
  for (double z : grid) report.values.push_back(contamination_effect(spec, link, y, z, z_prime));

  const auto n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(report.values[i]) > report.max_abs) {
      report.max_abs = std::fabs(report.values[i]);
      report.argmax_z = grid[i];
    }
  }

  const double center = 0.5 * (grid.front() + grid.back());
  const double inner_radius = 0.25 * (grid.back() - grid.front());
  double inner_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(grid[i] - center) <= inner_radius) {
      inner_max = std::max(inner_max, std::fabs(report.values[i]));
    }
  }
  const double edge = std::max(std::fabs(report.values.front()), std::fabs(report.values.back()));
  report.tail_classification = edge > 2.0 * inner_max ? TailClass::diverging : TailClass::bounded;
  return report;
}

ProbeOutcome tail_limit_probe(Link link, double c, TailSide side, std::span<const double> z_grid) {
  if (!(c > 0.0 && c <= 1.0)) throw ParameterError("tail exponent c must lie in (0, 1]");
  if (z_grid.size() < 4) throw ContractError("probe grid needs at least four points");
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (!(z_grid[i] > 0.0) || (i > 0 && !(z_grid[i] > z_grid[i - 1]))) {
      throw ContractError("probe grid must be positive and strictly increasing");
    }
  }
  if (z_grid.back() < 20.0) throw ContractError("probe grid must reach z >= 20");

  // |z|·g/T^c = |z|·(g/T)·T^{1-c} with T the relevant tail.
  std::vector<double> log_values;
  log_values.reserve(z_grid.size());
  for (double z : z_grid) {
    double log_hazard;
    double log_tail;
    if (side == TailSide::L1) {
      log_hazard = std::log(hazard_upper(link, z));
      log_tail = log_sf(link, z);
    } else {
      log_hazard = std::log(hazard_lower(link, -z));
      log_tail = log_cdf(link, -z);
    }
    const double tail_term = c == 1.0 ? 0.0 : (1.0 - c) * log_tail;
    log_values.push_back(std::log(z) + log_hazard + tail_term);
  }

  const std::size_t start = log_values.size() / 2;
  bool decreasing = true;
  bool increasing = true;
  for (std::size_t i = start + 1; i < log_values.size(); ++i) {
    if (!(log_values[i] < log_values[i - 1])) decreasing = false;
    if (!(log_values[i] > log_values[i - 1])) increasing = false;
  }
  const double log_ten = std::log(10.0);
  if (decreasing && log_values.back() < log_values.front() - log_ten) return ProbeOutcome::to_zero;
  if (increasing && log_values.back() > log_values.front() + log_ten) {
    return ProbeOutcome::to_infinity;
  }
  return ProbeOutcome::inconclusive;
}

Gradient expected_conditional_score(const LossSpec& spec, Link link, const ParameterVector& theta,
                                    const TruthModel& truth, std::span<const double> x) {
  const double p1 = truth.prob(x, 1);
  const double p0 = truth.prob(x, 0);
  const double z = linear_predictor(theta, x);
  const double slope = p1 * psi(spec, link, 1, z) + p0 * psi(spec, link, 0, z);
  Gradient out(theta.size());
  out[0] = slope;
  for (std::size_t j = 0; j < x.size(); ++j) out[j + 1] = slope * x[j];
  return out;
}

double fisher_consistency_check(const LossSpec& spec, Link link, const ParameterVector& theta0,
                                const TruthModel& truth, std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw ContractError("fisher_consistency_check needs n >= 1000 feature draws");
  if (truth.feature_dim() + 1 != theta0.size()) {
    throw ContractError("truth feature dimension does not match the parameter vector");
  }
  std::mt19937_64 rng(seed);
  const std::vector<double> xs = truth.sample_features(n, rng);
  const std::size_t d = truth.feature_dim();
  Gradient mean(theta0.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Gradient b =
        expected_conditional_score(spec, link, theta0, truth, std::span(xs).subspan(i * d, d));
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += b[j];
  }
  double norm2 = 0.0;
  for (double& m : mean) {
    m /= static_cast<double>(n);
    norm2 += m * m;
  }
  return std::sqrt(norm2);
}

}  // namespace binreg
