#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "binreg/errors.hpp"
#include "binreg/estimation.hpp"
#include "oracles.hpp"

using namespace binreg;

namespace {

Dataset draw_logistic(const ParameterVector& theta, std::size_t n, std::uint64_t seed, Link link = Link::logit) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Dataset data(theta.feature_dim());
  std::vector<double> x(theta.feature_dim());
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = u(rng);
    std::bernoulli_distribution coin(conditional_prob(link, theta, x, 1));
    data.add(x, coin(rng) ? 1 : 0);
  }
  return data;
}

double inf_norm_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

std::vector<double> to_vec(const ParameterVector& theta) { return {theta.values().begin(), theta.values().end()}; }

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1]) return false;
  }
  return true;
}

// Damped Newton iteration in long double with a finite-difference Hessian;
// shares nothing with the library optimizer.
std::vector<double> newton(const std::function<std::vector<oracle::ld>(const std::vector<double>&)>& grad,
                           std::vector<double> theta, int iterations) {
  const std::size_t p = theta.size();
  for (int it = 0; it < iterations; ++it) {
    const auto g = grad(theta);
    std::vector<std::vector<oracle::ld>> H(p, std::vector<oracle::ld>(p));
    const double h = 1e-6;
    for (std::size_t j = 0; j < p; ++j) {
      auto up = theta;
      auto down = theta;
      up[j] += h;
      down[j] -= h;
      const auto gu = grad(up);
      const auto gd = grad(down);
      for (std::size_t i = 0; i < p; ++i) H[i][j] = (gu[i] - gd[i]) / (2 * h);
    }
    // Gaussian elimination on H·step = g.
    std::vector<oracle::ld> rhs(g.begin(), g.end());
    for (std::size_t c = 0; c < p; ++c) {
      for (std::size_t r = c + 1; r < p; ++r) {
        const oracle::ld f = H[r][c] / H[c][c];
        for (std::size_t k = c; k < p; ++k) H[r][k] -= f * H[c][k];
        rhs[r] -= f * rhs[c];
      }
    }
    std::vector<oracle::ld> step(p);
    for (std::size_t c = p; c-- > 0;) {
      oracle::ld s = rhs[c];
      for (std::size_t k = c + 1; k < p; ++k) s -= H[c][k] * step[k];
      step[c] = s / H[c][c];
    }
    for (std::size_t j = 0; j < p; ++j) theta[j] -= static_cast<double>(step[j]);
  }
  return theta;
}

std::vector<oracle::ld> logistic_ml_gradient(const Dataset& data, const std::vector<double>& theta) {
  std::vector<oracle::ld> g(theta.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    oracle::ld z = theta[0];
    for (std::size_t j = 0; j < x.size(); ++j) z += theta[j + 1] * x[j];
    const oracle::ld r = oracle::cdf(Link::logit, z) - data.label(i);
    g[0] += r;
    for (std::size_t j = 0; j < x.size(); ++j) g[j + 1] += r * x[j];
  }
  for (auto& v : g) v /= data.size();
  return g;
}

std::vector<oracle::ld> brier_gradient(Link link, const Dataset& data, const std::vector<double>& theta) {
  std::vector<oracle::ld> g(theta.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    oracle::ld z = theta[0];
    for (std::size_t j = 0; j < x.size(); ++j) z += theta[j + 1] * x[j];
    const oracle::ld r = -2 * (data.label(i) - oracle::cdf(link, z)) * oracle::pdf(link, z);
    g[0] += r;
    for (std::size_t j = 0; j < x.size(); ++j) g[j + 1] += r * x[j];
  }
  for (auto& v : g) v /= data.size();
  return g;
}

}  // namespace

TEST_CASE("fit options validation") {
  FitOptions o;
  CHECK_NOTHROW(o.validate());
  o.max_iterations = 0;
  CHECK_THROWS_AS(o.validate(), ParameterError);
  o = FitOptions{};
  o.line_search_shrink = 1.0;
  CHECK_THROWS_AS(o.validate(), ParameterError);
  o = FitOptions{};
  o.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(o.validate(), ParameterError);
  for (FitStatus s : {FitStatus::converged, FitStatus::max_iterations, FitStatus::stalled_at_initial,
                      FitStatus::numerical_failure}) {
    CHECK(parse_fit_status(fit_status_name(s)) == s);
  }
}

TEST_CASE("empirical risk identities") {
  const Dataset data = draw_logistic({0.2, 0.9, -1.3}, 300, 17);
  CHECK(empirical_risk(LossSpec::ml(), Link::logit, ParameterVector::zeros(2), data) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (Link link : kAllLinks) {
    for (int k = 0; k < 10; ++k) {
      const ParameterVector theta{u(rng), u(rng), u(rng)};
      double brier = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data.label(i) - conditional_prob(link, theta, data.features(i), 1);
        brier += r * r;
      }
      brier /= static_cast<double>(data.size());
      const double g2 = empirical_risk(LossSpec::gamma(-2.0), link, theta, data);
      CHECK(std::fabs(g2 - brier) <= 1e-12);
      CHECK(std::fabs(empirical_risk(LossSpec::beta(1.0), link, theta, data) - g2 + 0.5) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(empirical_risk(LossSpec::ml(), Link::logit, ParameterVector::zeros(1), data), ContractError);
  CHECK_THROWS_AS(empirical_risk(LossSpec::ml(), Link::logit, ParameterVector::zeros(2), Dataset(2)), ContractError);
}

TEST_CASE("risk gradient matches finite differences") {
  const Dataset data = draw_logistic({-0.4, 0.7, 0.5}, 150, 23);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::vector<LossSpec> specs{LossSpec::ml(), LossSpec::beta(0.5), LossSpec::gamma(0.5),
                                    LossSpec::gamma(-2.0), LossSpec::gamma(-3.0), LossSpec::gamma(-1.0)};
  for (const auto& spec : specs) {
    for (Link link : kAllLinks) {
      const ParameterVector theta{u(rng), u(rng), u(rng)};
      const auto analytic = risk_gradient(spec, link, theta, data);
      const auto numeric = oracle::numeric_gradient(
          [&](const std::vector<double>& t) { return empirical_risk(spec, link, ParameterVector(t), data); },
          to_vec(theta), 1e-6);
      for (std::size_t j = 0; j < numeric.size(); ++j) {
        CAPTURE(spec.to_string());
        CAPTURE(link_name(link));
        CHECK(oracle::close_rel(analytic[j], numeric[j], 1e-6, 1e-9));
      }
      const RiskEvaluation both = risk_and_gradient(spec, link, theta.values(), data);
      CHECK(both.value == doctest::Approx(empirical_risk(spec, link, theta, data)).epsilon(1e-13));
      CHECK(both.gradient == analytic);
    }
  }

  Dataset balanced(1);
  for (double x : {1.0, -1.0}) {
    balanced.add(std::vector<double>{x}, 1);
    balanced.add(std::vector<double>{x}, 0);
  }
  for (double v : risk_gradient(LossSpec::ml(), Link::logit, ParameterVector::zeros(1), balanced)) CHECK(v == 0.0);
}

TEST_CASE("logistic maximum likelihood against Newton") {
  const ParameterVector truth{0.0, 1.0, -1.0};
  const Dataset data = draw_logistic(truth, 10000, 99);
  const FitResult r = fit(LossSpec::ml(), Link::logit, data);
  REQUIRE(r.converged());
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(r.theta_hat[j] - truth[j]) < 0.1);
  CHECK(inf_norm_of(risk_gradient(LossSpec::ml(), Link::logit, r.theta_hat, data)) < 1e-6);

  const auto reference = newton([&](const std::vector<double>& t) { return logistic_ml_gradient(data, t); },
                                {0.0, 0.0, 0.0}, 25);
  for (std::size_t j = 0; j < 3; ++j) CHECK(r.theta_hat[j] == doctest::Approx(reference[j]).epsilon(1e-6));
  CHECK(non_increasing(r.risk_trace));
}

TEST_CASE("Brier fits against Newton") {
  for (Link link : {Link::logit, Link::probit}) {
    const Dataset data = draw_logistic({0.3, -0.8}, 400, 31, link);
    const FitResult r = fit(LossSpec::gamma(-2.0), link, data);
    REQUIRE(r.converged());
    const auto reference = newton([&](const std::vector<double>& t) { return brier_gradient(link, data, t); },
                                  to_vec(fit(LossSpec::ml(), link, data).theta_hat), 30);
    const double ref_risk = empirical_risk(LossSpec::gamma(-2.0), link, ParameterVector(reference), data);
    CHECK(std::fabs(r.final_risk - ref_risk) < 1e-8);
    for (std::size_t j = 0; j < 2; ++j) CHECK(r.theta_hat[j] == doctest::Approx(reference[j]).epsilon(1e-5));
  }
}

TEST_CASE("fits are deterministic, monotone and agree where they must") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset data = draw_logistic({u(rng), u(rng), u(rng)}, 200, 1000 + rep);
    for (const auto& spec : {LossSpec::ml(), LossSpec::beta(0.5), LossSpec::gamma(1.0), LossSpec::gamma(-3.0)}) {
      const FitResult a = fit(spec, Link::logit, data);
      const FitResult b = fit(spec, Link::logit, data);
      CHECK(a.theta_hat == b.theta_hat);
      CHECK(a.final_risk == b.final_risk);
      CHECK(a.risk_trace == b.risk_trace);
      CHECK(a.iterations == b.iterations);
      CHECK(non_increasing(a.risk_trace));
      CHECK(a.final_risk <= a.risk_trace.front());
    }

    // The logistic likelihood is convex: any start reaches the same optimum.
    // The relative-risk stop alone leaves θ loose near 1e-5, so only the
    // gradient test ends these fits.
    FitOptions tight;
    tight.risk_relative_tolerance = 1e-18;
    FitOptions from_zero = tight;
    from_zero.initializers = {ParameterVector::zeros(2)};
    FitOptions from_elsewhere = tight;
    from_elsewhere.initializers = {ParameterVector{u(rng), u(rng), u(rng)}};
    const FitResult a = fit(LossSpec::ml(), Link::logit, data, from_zero);
    const FitResult b = fit(LossSpec::ml(), Link::logit, data, from_elsewhere);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(a.theta_hat[j] - b.theta_hat[j]) < 1e-6);

    const FitResult brier = fit(LossSpec::gamma(-2.0), Link::logit, data, tight);
    const FitResult beta = fit(LossSpec::beta(1.0), Link::logit, data, tight);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(brier.theta_hat[j] - beta.theta_hat[j]) < 1e-6);
  }
}

TEST_CASE("single-class data does not crash the fit") {
  Dataset ones(1);
  for (double x : {-1.0, 0.0, 0.5, 2.0, 3.0}) ones.add(std::vector<double>{x}, 1);
  const FitResult r = fit(LossSpec::ml(), Link::logit, ones);
  CHECK((r.status == FitStatus::max_iterations || r.status == FitStatus::converged));
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.theta_hat.intercept() > 5.0);
  CHECK(non_increasing(r.risk_trace));
}

TEST_CASE("optimizer statuses") {
  // Rosenbrock valley.
  const Objective rosen = [](std::span<const double> t) {
    const double a = 1.0 - t[0];
    const double b = t[1] - t[0] * t[0];
    return RiskEvaluation{a * a + 100.0 * b * b, {-2.0 * a - 400.0 * t[0] * b, 200.0 * b}};
  };
  FitOptions o;
  o.max_iterations = 2000;
  const FitResult r = minimize(rosen, {-1.2, 1.0}, o);
  CHECK(r.converged());
  CHECK(r.theta_hat[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.theta_hat[1] == doctest::Approx(1.0).epsilon(1e-4));

  o.max_iterations = 3;
  CHECK(minimize(rosen, {-1.2, 1.0}, o).status == FitStatus::max_iterations);

  const Objective broken = [](std::span<const double>) {
    return RiskEvaluation{std::nan(""), {0.0, 0.0}};
  };
  CHECK(minimize(broken, {0.0, 0.0}, FitOptions{}).status == FitStatus::numerical_failure);

  // A gradient that points nowhere useful: every trial step raises the value.
  const Objective spike = [](std::span<const double> t) {
    const bool home = t[0] == 0.0 && t[1] == 0.0;
    return RiskEvaluation{home ? 0.0 : 1.0, {1.0, -1.0}};
  };
  const FitResult stalled = minimize(spike, {0.0, 0.0}, FitOptions{});
  CHECK(stalled.status == FitStatus::stalled_at_initial);
  CHECK(stalled.theta_hat == ParameterVector{0.0, 0.0});
}

TEST_CASE("classification") {
  CHECK(classify(Link::logit, ParameterVector::zeros(2), std::vector<double>{1.0, 2.0}) == 1);
  CHECK(classify(Link::probit, ParameterVector::zeros(1), std::vector<double>{-4.0}) == 1);
  CHECK(classify(Link::logit, {0.0, 1.0, -1.0}, std::vector<double>{2.0, 1.0}) == 1);
  CHECK(classify(Link::logit, {0.0, 1.0, -1.0}, std::vector<double>{1.0, 2.0}) == 0);
  CHECK(classify(Link::logit, {0.0, 1.0, -1.0}, std::vector<double>{2.0, 1.0}, 0.8) == 0);
  CHECK(classify(Link::logit, {0.0, 1.0, -1.0}, std::vector<double>{1.0, 2.0}, 0.0) == 1);
  CHECK_THROWS_AS(classify(Link::logit, {0.0, 1.0}, std::vector<double>{1.0}, 1.01), ParameterError);
  CHECK_THROWS_AS(classify(Link::logit, {0.0, 1.0}, std::vector<double>{1.0}, -0.1), ParameterError);
}

TEST_CASE("pseudo-true parameters") {
  const ParameterVector theta0{0.3, 0.8, -0.6};
  const TruthModel truth{ModelConditional{Link::logit, theta0}, UniformBoxSampler{2, -3.0, 3.0}};
  const ParameterVector ml = pseudo_true_parameter(LossSpec::ml(), Link::logit, truth, 100000, 7);
  const ParameterVector robust = pseudo_true_parameter(LossSpec::beta(0.5), Link::logit, truth, 100000, 7);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::fabs(ml[j] - theta0[j]) < 0.05);
    CHECK(std::fabs(robust[j] - theta0[j]) < 0.05);
  }

  // Equal covariances: the Bayes boundary is linear with normal μ₁ - μ₀.
  const TruthModel binormal = TruthModel::binormal(0.3, {2.0, 1.0}, {0.0, 0.0}, 1.0);
  const ParameterVector direction = pseudo_true_parameter(LossSpec::ml(), Link::logit, binormal, 100000, 11);
  const double angle = std::atan2(direction[2], direction[1]) - std::atan2(1.0, 2.0);
  CHECK(std::fabs(angle) * 180.0 / std::numbers::pi < 2.0);

  const ParameterVector g1 = pseudo_true_parameter(LossSpec::gamma(1.0), Link::logit, binormal, 100000, 1);
  const ParameterVector g2 = pseudo_true_parameter(LossSpec::gamma(1.0), Link::logit, binormal, 100000, 2);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::isfinite(g1[j]));
    CHECK(std::fabs(g1[j] - g2[j]) < 0.05);
  }
  CHECK_THROWS_AS(pseudo_true_parameter(LossSpec::ml(), Link::logit, truth, 99999, 1), ContractError);
}
