#pragma once

#include <array>
#include <string>
#include <string_view>

namespace binreg {

/// Inverse link G of a binary regression model: a continuous CDF on the real
/// line. The upper tail Ḡ(z) = 1 - G(z) is always evaluated by its own formula.
enum class Link { logit, probit, cloglog, cauchit };

inline constexpr std::array<Link, 4> kAllLinks{Link::logit, Link::probit, Link::cloglog,
                                               Link::cauchit};

std::string_view link_name(Link link);

/// Parses "logit", "probit", "cloglog" or "cauchit". Throws ParameterError otherwise.
Link parse_link(std::string_view name);

/// True for links with G(-z) = Ḡ(z).
bool is_symmetric(Link link);

// All functions below throw DomainError for non-finite z.

double cdf(Link link, double z);
double sf(Link link, double z);
double log_cdf(Link link, double z);
double log_sf(Link link, double z);
double pdf(Link link, double z);
double log_pdf(Link link, double z);

/// g(z) / G(z), evaluated without forming the ratio of two tails.
double hazard_lower(Link link, double z);
/// g(z) / Ḡ(z).
double hazard_upper(Link link, double z);

/// Everything the losses need at one linear-predictor value, computed in one
/// pass. Each field is bitwise identical to the corresponding free function.
struct LinkEval {
  double cdf;
  double sf;
  double log_cdf;
  double log_sf;
  double log_pdf;
  double hazard_lower;
  double hazard_upper;
};

LinkEval evaluate(Link link, double z);

/// Standard normal Mills ratio Ḡ(t)/g(t) for t >= 0, by continued fraction
/// beyond t = 8.
double normal_mills_ratio(double t);

}  // namespace binreg
