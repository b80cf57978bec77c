#include "binreg/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "binreg/errors.hpp"

namespace binreg {

namespace {

using Vec = std::vector<double>;

double inf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool finite_eval(const RiskEvaluation& e) { return std::isfinite(e.value) && all_finite(e.gradient); }

// Dense symmetric matrix stored row-major; the problems here have d + 1 <= a few dozen.
struct InverseHessian {
  std::size_t n;
  Vec m;

  explicit InverseHessian(std::size_t size) : n(size), m(size * size, 0.0) { reset(1.0); }

  void reset(double scale) {
    std::fill(m.begin(), m.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = scale;
  }

  Vec apply(const Vec& v) const {
    Vec out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[i] += m[i * n + j] * v[j];
    }
    return out;
  }

  // H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
  void update(const Vec& s, const Vec& y) {
    const double sy = dot(s, y);
    const double rho = 1.0 / sy;
    const Vec hy = apply(y);
    const double yhy = dot(y, hy);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        m[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
      }
    }
  }
};

RiskEvaluation evaluate_checked(const Objective& objective, const Vec& theta) {
  if (!all_finite(theta)) {
    return {std::numeric_limits<double>::infinity(), Vec(theta.size(), 0.0)};
  }
  return objective(theta);
}

Objective dataset_objective(const LossSpec& spec, Link link, const Dataset& data) {
  return [&spec, link, &data](std::span<const double> theta) {
    return risk_and_gradient(spec, link, theta, data);
  };
}

void require_compatible(const ParameterVector& theta, const Dataset& data) {
  if (data.empty()) throw ContractError("dataset is empty");
  if (theta.size() != data.feature_dim() + 1) {
    throw ContractError("parameter vector has " + std::to_string(theta.size()) +
                        " entries, dataset needs " + std::to_string(data.feature_dim() + 1));
  }
}

// Multi-start driver shared by fit() and pseudo_true_parameter().
FitResult best_of(const Objective& objective, const std::vector<ParameterVector>& starts,
                  const FitOptions& options) {
  FitResult best;
  bool have_best = false;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    FitResult r = minimize(objective, starts[k], options);
    r.initializer_used = k;
    if (!have_best ||
        (r.status != FitStatus::numerical_failure &&
         (best.status == FitStatus::numerical_failure || r.final_risk < best.final_risk))) {
      best = std::move(r);
      have_best = true;
    }
  }
  return best;
}

}  // namespace

void FitOptions::validate() const {
  if (max_iterations < 1) throw ParameterError("max_iterations must be at least 1");
  if (!(gradient_tolerance > 0.0)) throw ParameterError("gradient_tolerance must be positive");
  if (!(risk_relative_tolerance > 0.0)) {
    throw ParameterError("risk_relative_tolerance must be positive");
  }
  if (!(line_search_shrink > 0.0 && line_search_shrink < 1.0)) {
    throw ParameterError("line_search_shrink must lie in (0, 1)");
  }
  if (!(armijo_constant > 0.0 && armijo_constant < 1.0)) {
    throw ParameterError("armijo_constant must lie in (0, 1)");
  }
}

std::string_view fit_status_name(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::stalled_at_initial: return "stalled_at_initial";
    case FitStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

FitStatus parse_fit_status(std::string_view name) {
  for (FitStatus s : {FitStatus::converged, FitStatus::max_iterations,
                      FitStatus::stalled_at_initial, FitStatus::numerical_failure}) {
    if (fit_status_name(s) == name) return s;
  }
  throw ParameterError("unknown fit status '" + std::string(name) + "'");
}

RiskEvaluation risk_and_gradient(const LossSpec& spec, Link link, std::span<const double> theta,
                                 const Dataset& data) {
  const std::size_t d = data.feature_dim();
  if (data.empty()) throw ContractError("dataset is empty");
  if (theta.size() != d + 1) throw ContractError("parameter/dataset dimension mismatch");
  RiskEvaluation out{0.0, Vec(d + 1, 0.0)};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    double z = theta[0];
    for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * x[j];
    if (!std::isfinite(z)) {
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    const LossValue lv = loss_and_psi(spec, link, data.label(i), z);
    out.value += lv.value;
    out.gradient[0] += lv.psi;
    for (std::size_t j = 0; j < d; ++j) out.gradient[j + 1] += lv.psi * x[j];
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  out.value *= inv_n;
  for (double& g : out.gradient) g *= inv_n;
  return out;
}

double empirical_risk(const LossSpec& spec, Link link, const ParameterVector& theta,
                      const Dataset& data) {
  require_compatible(theta, data);
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    acc += loss(spec, link, data.label(i), linear_predictor(theta, data.features(i)));
  }
  return acc / static_cast<double>(data.size());
}

Gradient risk_gradient(const LossSpec& spec, Link link, const ParameterVector& theta,
                       const Dataset& data) {
  require_compatible(theta, data);
  return risk_and_gradient(spec, link, theta.values(), data).gradient;
}

FitResult minimize(const Objective& objective, const ParameterVector& start,
                   const FitOptions& options) {
  options.validate();
  const std::size_t p = start.size();
  Vec theta(start.values().begin(), start.values().end());

  FitResult result;
  result.theta_hat = start;
  RiskEvaluation current = evaluate_checked(objective, theta);
  if (!finite_eval(current)) {
    result.final_risk = current.value;
    result.gradient_norm = std::numeric_limits<double>::infinity();
    result.status = FitStatus::numerical_failure;
    return result;
  }
  result.risk_trace.push_back(current.value);

  InverseHessian h(p);
  bool scaled = false;
  bool fresh_curvature = true;
  int accepted = 0;
  FitStatus status = FitStatus::max_iterations;

  while (true) {
    if (inf_norm(current.gradient) <= options.gradient_tolerance) {
      status = FitStatus::converged;
      break;
    }
    if (accepted >= options.max_iterations) {
      status = FitStatus::max_iterations;
      break;
    }

    Vec direction = h.apply(current.gradient);
    for (double& v : direction) v = -v;
    double slope = dot(current.gradient, direction);
    if (!(slope < 0.0) || !all_finite(direction)) {
      h.reset(1.0);
      fresh_curvature = true;
      direction = current.gradient;
      for (double& v : direction) v = -v;
      slope = dot(current.gradient, direction);
    }

    // Armijo backtracking.
    double step = 1.0;
    bool found = false;
    Vec trial(p);
    RiskEvaluation next;
    for (int k = 0; k < 200 && step > 0.0; ++k) {
      for (std::size_t i = 0; i < p; ++i) trial[i] = theta[i] + step * direction[i];
      next = evaluate_checked(objective, trial);
      if (finite_eval(next) &&
          next.value <= current.value + options.armijo_constant * step * slope) {
        found = true;
        break;
      }
      step *= options.line_search_shrink;
    }

    if (!found) {
      if (!fresh_curvature) {
        // Stale curvature can point along a useless direction; retry steepest descent.
        h.reset(1.0);
        fresh_curvature = true;
        continue;
      }
      status = accepted == 0 ? FitStatus::stalled_at_initial : FitStatus::converged;
      break;
    }

    Vec s(p);
    Vec y(p);
    for (std::size_t i = 0; i < p; ++i) {
      s[i] = trial[i] - theta[i];
      y[i] = next.gradient[i] - current.gradient[i];
    }
    const double decrease = current.value - next.value;
    const double scale = std::max({std::fabs(current.value), std::fabs(next.value),
                                   std::numeric_limits<double>::min()});
    theta = trial;
    current = std::move(next);
    ++accepted;
    result.risk_trace.push_back(current.value);

    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (!scaled) {
        h.reset(sy / dot(y, y));
        scaled = true;
      }
      h.update(s, y);
      fresh_curvature = false;
    }

    if (decrease <= options.risk_relative_tolerance * scale) {
      status = FitStatus::converged;
      break;
    }
  }

  result.theta_hat = ParameterVector(theta);
  result.final_risk = current.value;
  result.gradient_norm = inf_norm(current.gradient);
  result.iterations = accepted;
  result.status = status;
  return result;
}

FitResult fit(const LossSpec& spec, Link link, const Dataset& data, const FitOptions& options) {
  options.validate();
  if (data.empty()) throw ContractError("cannot fit an empty dataset");
  const std::size_t d = data.feature_dim();

  std::vector<ParameterVector> starts = options.initializers;
  if (starts.empty()) {
    starts.push_back(ParameterVector::zeros(d));
    if (spec.family() != LossFamily::ml) {
      FitOptions ml_options = options;
      ml_options.initializers = {ParameterVector::zeros(d)};
      const FitResult ml = fit(LossSpec::ml(), link, data, ml_options);
      if (ml.status != FitStatus::numerical_failure) starts.push_back(ml.theta_hat);
    }
  }
  for (const auto& s : starts) require_compatible(s, data);

  FitResult best = best_of(dataset_objective(spec, link, data), starts, options);

  std::size_t ones = 0;
  for (int y : data.labels()) ones += static_cast<std::size_t>(y);
  if (ones == 0 || ones == data.size()) {
    best.warnings.push_back("all labels are " + std::to_string(ones == 0 ? 0 : 1) +
                            "; the intercept diverges and no finite minimizer exists");
  }
  if (data.size() < d + 2) {
    best.warnings.push_back("fewer than d + 2 observations");
  }
  return best;
}

int classify(Link link, const ParameterVector& theta, std::span<const double> x, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ParameterError("classification threshold must lie in [0, 1]");
  }
  return conditional_prob(link, theta, x, 1) >= threshold ? 1 : 0;
}

ParameterVector pseudo_true_parameter(const LossSpec& spec, Link link, const TruthModel& truth,
                                      std::size_t n_large, std::uint64_t seed,
                                      const FitOptions& options) {
  if (n_large < 100000) throw ContractError("pseudo_true_parameter needs n_large >= 1e5");
  options.validate();
  const std::size_t d = truth.feature_dim();
  std::mt19937_64 rng(seed);
  const Vec xs = truth.sample_features(n_large, rng);
  Vec p1(n_large);
  Vec p0(n_large);
  for (std::size_t i = 0; i < n_large; ++i) {
    p1[i] = truth.prob(std::span(xs).subspan(i * d, d), 1);
    p0[i] = truth.prob(std::span(xs).subspan(i * d, d), 0);
  }

  auto make_objective = [&](const LossSpec& s) -> Objective {
    return [&xs, &p1, &p0, s, link, d, n_large](std::span<const double> theta) {
      RiskEvaluation out{0.0, Vec(d + 1, 0.0)};
      for (std::size_t i = 0; i < n_large; ++i) {
        const double* x = xs.data() + i * d;
        double z = theta[0];
        for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * x[j];
        if (!std::isfinite(z)) {
          out.value = std::numeric_limits<double>::infinity();
          return out;
        }
        const LossValue one = loss_and_psi(s, link, 1, z);
        const LossValue zero = loss_and_psi(s, link, 0, z);
        out.value += p1[i] * one.value + p0[i] * zero.value;
        const double slope = p1[i] * one.psi + p0[i] * zero.psi;
        out.gradient[0] += slope;
        for (std::size_t j = 0; j < d; ++j) out.gradient[j + 1] += slope * x[j];
      }
      const double inv_n = 1.0 / static_cast<double>(n_large);
      out.value *= inv_n;
      for (double& g : out.gradient) g *= inv_n;
      return out;
    };
  };

  std::vector<ParameterVector> starts = options.initializers;
  if (starts.empty()) {
    starts.push_back(ParameterVector::zeros(d));
    if (spec.family() != LossFamily::ml) {
      const FitResult ml = best_of(make_objective(LossSpec::ml()), {ParameterVector::zeros(d)},
                                   options);
      if (ml.status != FitStatus::numerical_failure) starts.push_back(ml.theta_hat);
    }
  }
  return best_of(make_objective(spec), starts, options).theta_hat;
}

}  // namespace binreg
