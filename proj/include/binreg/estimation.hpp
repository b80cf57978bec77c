#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "binreg/links.hpp"
#include "binreg/losses.hpp"
#include "binreg/model.hpp"
#include "binreg/truth.hpp"

namespace binreg {

struct FitOptions {
  int max_iterations = 500;
  /// Infinity norm of the risk gradient.
  double gradient_tolerance = 1e-8;
  double risk_relative_tolerance = 1e-10;
  /// Starting points. Empty means the zero vector plus, for non-ml losses, the
  /// maximum-likelihood estimate.
  std::vector<ParameterVector> initializers;
  double line_search_shrink = 0.5;
  double armijo_constant = 1e-4;

  void validate() const;
};

enum class FitStatus { converged, max_iterations, stalled_at_initial, numerical_failure };
std::string_view fit_status_name(FitStatus s);
FitStatus parse_fit_status(std::string_view name);

struct FitResult {
  ParameterVector theta_hat;
  double final_risk = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  FitStatus status = FitStatus::numerical_failure;
  std::size_t initializer_used = 0;
  /// Risk at the starting point followed by the risk after every accepted step.
  std::vector<double> risk_trace;
  std::vector<std::string> warnings;

  bool converged() const { return status == FitStatus::converged; }
};

struct RiskEvaluation {
  double value;
  Gradient gradient;
};

/// (1/n)·Σ_i Ψ(Y_i, θᵀx̃_i).
double empirical_risk(const LossSpec& spec, Link link, const ParameterVector& theta,
                      const Dataset& data);
/// (1/n)·Σ_i ψ(Y_i, θᵀx̃_i)·x̃_i.
Gradient risk_gradient(const LossSpec& spec, Link link, const ParameterVector& theta,
                       const Dataset& data);
RiskEvaluation risk_and_gradient(const LossSpec& spec, Link link, std::span<const double> theta,
                                 const Dataset& data);

using Objective = std::function<RiskEvaluation(std::span<const double>)>;

/// Quasi-Newton descent (BFGS inverse-Hessian updates, Armijo backtracking)
/// from a single starting point. The accepted risk sequence never increases.
FitResult minimize(const Objective& objective, const ParameterVector& start,
                   const FitOptions& options);

/// Minimizes the empirical risk from every initializer and keeps the lowest
/// final risk. Deterministic for fixed inputs.
FitResult fit(const LossSpec& spec, Link link, const Dataset& data, const FitOptions& options = {});

/// 1 iff q(1|x;θ) >= threshold.
int classify(Link link, const ParameterVector& theta, std::span<const double> x,
             double threshold = 0.5);

/// Monte Carlo approximation of the population minimizer θ*: n_large feature
/// draws from the truth, labels integrated out exactly through p(y|x).
ParameterVector pseudo_true_parameter(const LossSpec& spec, Link link, const TruthModel& truth,
                                      std::size_t n_large, std::uint64_t seed,
                                      const FitOptions& options = {});

}  // namespace binreg
