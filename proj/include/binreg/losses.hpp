#pragma once

#include <span>
#include <string>
#include <string_view>

#include "binreg/links.hpp"
#include "binreg/model.hpp"

namespace binreg {

enum class LossFamily { ml, beta, gamma };

/// Loss-family selector with its tuning parameter.
///
/// - ml: negative log-likelihood, param unused.
/// - beta(β), β > 0: density power divergence loss.
/// - gamma(γ), γ ≠ 0: γ-divergence loss through the escort distribution.
///   γ = -2 is the Brier loss (y - G(z))²; |γ + 1| < 1e-8 selects the
///   geometric-limit loss ½·(q(1-y)/q(y))^{1/2}.
class LossSpec {
 public:
  static LossSpec ml() { return LossSpec(LossFamily::ml, 0.0); }
  static LossSpec beta(double beta);
  static LossSpec gamma(double gamma);

  LossFamily family() const { return family_; }
  double param() const { return param_; }

  bool is_geometric() const;
  bool is_brier() const;

  /// "ml", "beta:<float>" or "gamma:<float>" (round-trips through parse_loss_spec).
  std::string to_string() const;

  friend bool operator==(const LossSpec&, const LossSpec&) = default;

 private:
  LossSpec(LossFamily family, double param) : family_(family), param_(param) {}

  LossFamily family_;
  double param_;
};

/// Parses the CLI grammar "ml" | "beta:<float>" | "gamma:<float>".
LossSpec parse_loss_spec(std::string_view text);

/// |γ + 1| up to this (plus one ulp of 1) routes gamma(γ) to the geometric-limit
/// closed form.
inline constexpr double kGeometricDispatchTolerance = 1e-8;

/// Per-sample loss Ψ(y, z).
double loss(const LossSpec& spec, Link link, int y, double z);

/// ψ(y, z) = ∂Ψ(y, z)/∂z, so that ψ·x̃ is the θ-gradient of the loss.
double psi(const LossSpec& spec, Link link, int y, double z);

/// Loss and its z-derivative from one link evaluation.
struct LossValue {
  double value;
  double psi;
};
LossValue loss_and_psi(const LossSpec& spec, Link link, int y, double z);

/// ψ(y, θᵀx̃)·x̃.
Gradient per_sample_gradient(const LossSpec& spec, Link link, const ParameterVector& theta,
                             std::span<const double> x, int y);

}  // namespace binreg
