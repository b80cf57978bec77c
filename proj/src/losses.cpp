#include "binreg/losses.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <system_error>

#include "binreg/errors.hpp"
#include "binreg/format.hpp"

namespace binreg {

namespace {

// Brier loss (y - G)² and its derivative 2(G - y)g.
LossValue brier(int y, const LinkEval& e) {
  const double g = std::exp(e.log_pdf);
  if (y == 1) return {e.sf * e.sf, -2.0 * e.sf * g};
  return {e.cdf * e.cdf, 2.0 * e.cdf * g};
}

// ½·sqrt(q(1-y)/q(y)); ψ = ∓½·(g/G + g/Ḡ)·Ψ.
LossValue geometric(int y, const LinkEval& e) {
  const double hazard_sum = e.hazard_lower + e.hazard_upper;
  if (y == 1) {
    const double value = 0.5 * std::exp(0.5 * (e.log_sf - e.log_cdf));
    return {value, -0.5 * hazard_sum * value};
  }
  const double value = 0.5 * std::exp(0.5 * (e.log_cdf - e.log_sf));
  return {value, 0.5 * hazard_sum * value};
}

LossValue maximum_likelihood(int y, const LinkEval& e) {
  if (y == 1) return {-e.log_cdf, -e.hazard_lower};
  return {-e.log_sf, e.hazard_upper};
}

LossValue density_power(double beta, int y, const LinkEval& e) {
  const double lq1 = e.log_cdf;
  const double lq0 = e.log_sf;
  const double lqy = y == 1 ? lq1 : lq0;
  const double value = -std::exp(beta * lqy) / beta +
                       (std::exp((beta + 1.0) * lq0) + std::exp((beta + 1.0) * lq1)) / (beta + 1.0);
  // y = 1: -(Ḡ·G^β·g/G + Ḡ^β·g);  y = 0: +(G·Ḡ^β·g/Ḡ + G^β·g)
  double slope;
  if (y == 1) {
    slope = -(std::exp(lq0 + beta * lq1) * e.hazard_lower + std::exp(beta * lq0 + e.log_pdf));
  } else {
    slope = std::exp(lq1 + beta * lq0) * e.hazard_upper + std::exp(beta * lq1 + e.log_pdf);
  }
  return {value, slope};
}

LossValue escort_power(double gamma, int y, const LinkEval& e) {
  const double u = gamma + 1.0;
  const double a1 = u * e.log_cdf;
  const double a0 = u * e.log_sf;
  const double norm = log_sum_exp(a0, a1);
  const double log_w1 = a1 - norm;
  const double log_w0 = a0 - norm;
  const double log_wy = y == 1 ? log_w1 : log_w0;
  const double log_wother = y == 1 ? log_w0 : log_w1;

  // Ψ = -(1/γ)·q_γ(y)^{γ/(γ+1)}
  const double ratio = gamma / u;
  const double value = -std::exp(ratio * log_wy) / gamma;

  // ψ = -(1/u)·q_γ(y)^{γ/u}·∂_z log q_γ(y), and ∂_z log q_γ(y) = ±u·q_γ(1-y)·(g/G + g/Ḡ);
  // the 1/u cancels, so the sign no longer depends on which side of -1 γ sits.
  const double log_hazard_sum = std::log(e.hazard_lower + e.hazard_upper);
  const double magnitude = std::exp(ratio * log_wy + log_wother + log_hazard_sum);
  return {value, y == 1 ? -magnitude : magnitude};
}

}  // namespace

LossSpec LossSpec::beta(double beta) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw ParameterError("beta loss needs beta > 0, got " + format_shortest(beta));
  }
  return LossSpec(LossFamily::beta, beta);
}

LossSpec LossSpec::gamma(double gamma) {
  if (!std::isfinite(gamma)) throw ParameterError("gamma must be finite");
  if (gamma == 0.0) throw ParameterError("gamma = 0 is maximum likelihood; use 'ml'");
  return LossSpec(LossFamily::gamma, gamma);
}

bool LossSpec::is_geometric() const {
  // One ulp of slack: -1 + 1e-8 evaluates to γ + 1 = 1.000000005e-8.
  return family_ == LossFamily::gamma &&
         std::fabs(param_ + 1.0) <= kGeometricDispatchTolerance + std::numeric_limits<double>::epsilon();
}

bool LossSpec::is_brier() const { return family_ == LossFamily::gamma && param_ == -2.0; }

std::string LossSpec::to_string() const {
  switch (family_) {
    case LossFamily::ml: return "ml";
    case LossFamily::beta: return "beta:" + format_shortest(param_);
    case LossFamily::gamma: return "gamma:" + format_shortest(param_);
  }
  return "?";
}

LossSpec parse_loss_spec(std::string_view text) {
  if (text == "ml") return LossSpec::ml();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParameterError("unknown loss '" + std::string(text) +
                         "' (expected ml, beta:<float> or gamma:<float>)");
  }
  const std::string_view family = text.substr(0, colon);
  const std::string_view number = text.substr(colon + 1);
  double value = 0.0;
  const auto res = std::from_chars(number.data(), number.data() + number.size(), value);
  if (number.empty() || res.ec != std::errc{} || res.ptr != number.data() + number.size()) {
    throw ParameterError("malformed loss parameter in '" + std::string(text) + "'");
  }
  if (family == "beta") return LossSpec::beta(value);
  if (family == "gamma") return LossSpec::gamma(value);
  throw ParameterError("unknown loss family '" + std::string(family) + "'");
}

LossValue loss_and_psi(const LossSpec& spec, Link link, int y, double z) {
  require_label(y);
  const LinkEval e = evaluate(link, z);
  switch (spec.family()) {
    case LossFamily::ml: return maximum_likelihood(y, e);
    case LossFamily::beta: return density_power(spec.param(), y, e);
    case LossFamily::gamma:
      if (spec.is_brier()) return brier(y, e);
      if (spec.is_geometric()) return geometric(y, e);
      return escort_power(spec.param(), y, e);
  }
  return {0.0, 0.0};
}

double loss(const LossSpec& spec, Link link, int y, double z) {
  return loss_and_psi(spec, link, y, z).value;
}

double psi(const LossSpec& spec, Link link, int y, double z) {
  return loss_and_psi(spec, link, y, z).psi;
}

Gradient per_sample_gradient(const LossSpec& spec, Link link, const ParameterVector& theta,
                             std::span<const double> x, int y) {
  const double z = linear_predictor(theta, x);
  const double slope = psi(spec, link, y, z);
  Gradient out(theta.size());
  out[0] = slope;
  for (std::size_t j = 0; j < x.size(); ++j) out[j + 1] = slope * x[j];
  return out;
}

}  // namespace binreg
