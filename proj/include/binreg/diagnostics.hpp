#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "binreg/links.hpp"
#include "binreg/losses.hpp"
#include "binreg/model.hpp"
#include "binreg/truth.hpp"

namespace binreg {

/// Effect of moving the linear predictor from z towards z′:
/// b(y, z, z′) = ψ(y, z)·(z′ − z).
double contamination_effect(const LossSpec& spec, Link link, int y, double z, double z_prime);

enum class TailClass { bounded, diverging };
std::string_view tail_class_name(TailClass c);

struct BoundednessReport {
  std::vector<double> grid;
  std::vector<double> values;
  double max_abs = 0.0;
  double argmax_z = 0.0;
  TailClass tail_classification = TailClass::bounded;
};

/// Evaluates b(y, ·, z′) on a strictly increasing grid. The curve is called
/// diverging when |b| at either end of the grid exceeds twice the largest |b|
/// over the central half of the grid span.
BoundednessReport boundedness_scan(const LossSpec& spec, Link link, int y, double z_prime,
                                   std::span<const double> grid);

/// 1201 points on [-30, 30]; [-100, 100] for cauchit, whose tails need room.
std::vector<double> default_scan_grid(Link link);

/// `count` equally spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

enum class TailSide { L1, L2 };
enum class ProbeOutcome { to_zero, to_infinity, inconclusive };
std::string_view probe_outcome_name(ProbeOutcome o);

/// Numerical probe of the tail limits
///   L1(c) = lim |z|·g(z)/Ḡ(z)^c,   L2(c) = lim |z|·g(-z)/G(-z)^c,   z → ∞,
/// evaluated in the log domain as log z + log hazard + (1 - c)·log tail.
/// to_zero: strictly decreasing over the second half of the grid and the last
/// value is below a tenth of the first; to_infinity symmetrically.
ProbeOutcome tail_limit_probe(Link link, double c, TailSide side, std::span<const double> z_grid);

/// B(θ, x) = Σ_y p(y|x)·ψ(y, θᵀx̃)·x̃.
Gradient expected_conditional_score(const LossSpec& spec, Link link, const ParameterVector& theta,
                                    const TruthModel& truth, std::span<const double> x);

/// Euclidean norm of the sample mean of B(θ₀, X_i) over n feature draws.
double fisher_consistency_check(const LossSpec& spec, Link link, const ParameterVector& theta0,
                                const TruthModel& truth, std::size_t n, std::uint64_t seed);

}  // namespace binreg
