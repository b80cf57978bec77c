#include "binreg/links.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "binreg/errors.hpp"

namespace binreg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
constexpr double kMillsSwitch = 8.0;

void require_finite(double z) {
  if (!std::isfinite(z)) {
    throw DomainError("link evaluated at non-finite linear predictor " + std::to_string(z));
  }
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// ---- logit ----------------------------------------------------------------

double logit_cdf(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---- probit ---------------------------------------------------------------

double probit_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }
double probit_log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }
double probit_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

double probit_log_cdf(double z) {
  if (z < -kMillsSwitch) return probit_log_pdf(z) + std::log(normal_mills_ratio(-z));
  if (z < 0.0) return std::log(probit_cdf(z));
  return std::log1p(-probit_cdf(-z));
}

double probit_hazard_lower(double z) {
  if (z < -kMillsSwitch) return 1.0 / normal_mills_ratio(-z);
  return probit_pdf(z) / probit_cdf(z);
}

// ---- complementary log-log: G(z) = 1 - exp(-exp(z)) -------------------------

double cloglog_cdf(double z) { return -std::expm1(-std::exp(z)); }
double cloglog_sf(double z) { return std::exp(-std::exp(z)); }

double cloglog_log_cdf(double z) {
  const double w = std::exp(z);
  // log((1 - e^{-w}) / w) = -w/2 + O(w^2)
  if (z < -30.0) return z - 0.5 * w;
  if (w > 1.0) return std::log1p(-std::exp(-w));
  return std::log(-std::expm1(-w));
}

double cloglog_hazard_lower(double z) {
  const double w = std::exp(z);
  if (w == 0.0) return 1.0;
  return w / std::expm1(w);
}

// ---- cauchit --------------------------------------------------------------

double cauchit_cdf(double z) {
  if (z <= -1.0) return std::atan(-1.0 / z) / kPi;
  if (z < 1.0) return 0.5 + std::atan(z) / kPi;
  return 1.0 - std::atan(1.0 / z) / kPi;
}

double cauchit_pdf(double z) {
  if (std::fabs(z) > 1.0) {
    const double r = 1.0 / z;
    return r * r / (kPi * (1.0 + r * r));
  }
  return 1.0 / (kPi * (1.0 + z * z));
}

double cauchit_hazard_lower(double z) {
  if (z <= -1.0) {
    // (1/(pi(1+z^2))) / (atan(-1/z)/pi), with 1+z^2 kept as z^2(1+1/z^2)
    const double r = -1.0 / z;
    return r * r / ((1.0 + r * r) * std::atan(r));
  }
  return cauchit_pdf(z) / cauchit_cdf(z);
}

}  // namespace

double normal_mills_ratio(double t) {
  require_finite(t);
  if (t < kMillsSwitch) return 0.5 * std::erfc(t * std::numbers::sqrt2 / 2.0) / probit_pdf(t);
  // Modified Lentz evaluation of t + 1/(t + 2/(t + 3/(t + ...))).
  constexpr double tiny = 1e-300;
  double f = t;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 500; ++j) {
    d = t + j * d;
    if (d == 0.0) d = tiny;
    d = 1.0 / d;
    c = t + j / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

std::string_view link_name(Link link) {
  switch (link) {
    case Link::logit: return "logit";
    case Link::probit: return "probit";
    case Link::cloglog: return "cloglog";
    case Link::cauchit: return "cauchit";
  }
  return "unknown";
}

Link parse_link(std::string_view name) {
  for (Link link : kAllLinks) {
    if (link_name(link) == name) return link;
  }
  throw ParameterError("unknown link '" + std::string(name) +
                       "' (expected logit, probit, cloglog or cauchit)");
}

bool is_symmetric(Link link) { return link != Link::cloglog; }

double cdf(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return logit_cdf(z);
    case Link::probit: return probit_cdf(z);
    case Link::cloglog: return cloglog_cdf(z);
    case Link::cauchit: return cauchit_cdf(z);
  }
  return 0.0;
}

double sf(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return logit_cdf(-z);
    case Link::probit: return probit_cdf(-z);
    case Link::cloglog: return cloglog_sf(z);
    case Link::cauchit: return cauchit_cdf(-z);
  }
  return 0.0;
}

double log_cdf(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return -softplus(-z);
    case Link::probit: return probit_log_cdf(z);
    case Link::cloglog: return cloglog_log_cdf(z);
    case Link::cauchit: return z < 0.0 ? std::log(cauchit_cdf(z)) : std::log1p(-cauchit_cdf(-z));
  }
  return 0.0;
}

double log_sf(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return -softplus(z);
    case Link::probit: return probit_log_cdf(-z);
    case Link::cloglog: return -std::exp(z);
    case Link::cauchit: return z > 0.0 ? std::log(cauchit_cdf(-z)) : std::log1p(-cauchit_cdf(z));
  }
  return 0.0;
}

double pdf(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return logit_cdf(z) * logit_cdf(-z);
    case Link::probit: return probit_pdf(z);
    case Link::cloglog: return std::exp(z - std::exp(z));
    case Link::cauchit: return cauchit_pdf(z);
  }
  return 0.0;
}

double log_pdf(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return -softplus(-z) - softplus(z);
    case Link::probit: return probit_log_pdf(z);
    case Link::cloglog: return z - std::exp(z);
    case Link::cauchit: return std::log(cauchit_pdf(z));
  }
  return 0.0;
}

double hazard_lower(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return logit_cdf(-z);
    case Link::probit: return probit_hazard_lower(z);
    case Link::cloglog: return cloglog_hazard_lower(z);
    case Link::cauchit: return cauchit_hazard_lower(z);
  }
  return 0.0;
}

double hazard_upper(Link link, double z) {
  require_finite(z);
  switch (link) {
    case Link::logit: return logit_cdf(z);
    case Link::probit: return probit_hazard_lower(-z);
    case Link::cloglog: return std::exp(z);
    case Link::cauchit: return cauchit_hazard_lower(-z);
  }
  return 0.0;
}

LinkEval evaluate(Link link, double z) {
  return LinkEval{cdf(link, z),      sf(link, z),           log_cdf(link, z),
                  log_sf(link, z),   log_pdf(link, z),      hazard_lower(link, z),
                  hazard_upper(link, z)};
}

}  // namespace binreg
