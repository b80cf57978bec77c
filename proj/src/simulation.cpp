#include "binreg/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "binreg/errors.hpp"
#include "binreg/format.hpp"

namespace binreg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Logistic labels for θ = (0, a, -a), optionally with the sign of z flipped.
int draw_scenario1_label(double a, double x1, double x2, bool flipped, std::mt19937_64& rng) {
  const double z = a * (x1 - x2);
  std::bernoulli_distribution coin(cdf(Link::logit, flipped ? -z : z));
  return coin(rng) ? 1 : 0;
}

Dataset scenario1_sample(const Scenario1Config& c, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  Dataset data(2);
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x[2] = {unif(rng), unif(rng)};
    data.add(x, draw_scenario1_label(c.a, x[0], x[1], false, rng));
  }
  return data;
}

// Two-class sample with n₁ ~ Binomial(n, r); class-1 rows come first.
template <class Noise1, class Noise0>
Dataset two_class_sample(std::size_t n, double r, const std::vector<double>& mean1,
                         const std::vector<double>& mean0, Noise1&& noise1, Noise0&& noise0,
                         std::mt19937_64& rng, std::size_t* n_one) {
  std::binomial_distribution<std::size_t> count(n, r);
  const std::size_t n1 = count(rng);
  Dataset data(2);
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool one = i < n1;
    const auto& mean = one ? mean1 : mean0;
    double x[2];
    for (int j = 0; j < 2; ++j) x[j] = mean[j] + (one ? noise1(rng) : noise0(rng));
    data.add(x, one ? 1 : 0);
  }
  if (n_one != nullptr) *n_one = n1;
  return data;
}

void require(bool ok, const char* message) {
  if (!ok) throw ParameterError(message);
}

}  // namespace

void Scenario1Config::validate() const {
  require(n >= 1 && test_n >= 1, "scenario1 needs n >= 1 and test_n >= 1");
  require(a > 0.0 && std::isfinite(a), "scenario1 needs a > 0");
  require(p_out >= 0.0 && p_out < 1.0, "scenario1 needs p_out in [0, 1)");
}

void CaseAConfig::validate() const {
  require(n >= 1 && test_n >= 1, "caseA needs n >= 1 and test_n >= 1");
  require(r > 0.0 && r < 1.0, "caseA needs r in (0, 1)");
  require(D > 0.0 && std::isfinite(D), "caseA needs D > 0");
  require(s > 0.0 && std::isfinite(s), "caseA needs s > 0");
}

void CaseBConfig::validate() const {
  require(n >= 1 && test_n >= 1, "caseB needs n >= 1 and test_n >= 1");
  require(r > 0.0 && r < 1.0, "caseB needs r in (0, 1)");
  require(D > 0.0 && std::isfinite(D), "caseB needs D > 0");
  require(nu1 > 0.0 && nu0 > 0.0, "caseB needs positive degrees of freedom");
}

std::string_view placement_name(MeanPlacement p) {
  return p == MeanPlacement::axis ? "axis" : "diagonal";
}

MeanPlacement parse_placement(std::string_view name) {
  if (name == "axis") return MeanPlacement::axis;
  if (name == "diagonal") return MeanPlacement::diagonal;
  throw ParameterError("unknown mean placement '" + std::string(name) +
                       "' (expected axis or diagonal)");
}

std::pair<std::vector<double>, std::vector<double>> class_means(double D, MeanPlacement placement) {
  std::vector<double> mean1 = placement == MeanPlacement::axis ? std::vector<double>{D, 0.0}
                                                                : std::vector<double>{D, D};
  return {std::move(mean1), std::vector<double>{0.0, 0.0}};
}

std::string describe(const ScenarioConfig& config) {
  return std::visit(
      overloaded{
          [](const Scenario1Config& c) {
            return "scenario1 n=" + std::to_string(c.n) + " a=" + format_shortest(c.a) +
                   " p_out=" + format_shortest(c.p_out);
          },
          [](const CaseAConfig& c) {
            return "caseA n=" + std::to_string(c.n) + " r=" + format_shortest(c.r) +
                   " D=" + format_shortest(c.D) + " s=" + format_shortest(c.s) +
                   " placement=" + std::string(placement_name(c.placement));
          },
          [](const CaseBConfig& c) {
            return "caseB n=" + std::to_string(c.n) + " r=" + format_shortest(c.r) +
                   " D=" + format_shortest(c.D) + " nu1=" + format_shortest(c.nu1) +
                   " nu0=" + format_shortest(c.nu0) +
                   " placement=" + std::string(placement_name(c.placement));
          },
      },
      config);
}

GeneratedData gen_scenario1(const Scenario1Config& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  Dataset clean = scenario1_sample(config, config.n, rng);

  std::binomial_distribution<std::size_t> count(config.n, config.p_out);
  const std::size_t n_out = count(rng);
  std::vector<std::size_t> rows(config.n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::size_t> replaced;
  replaced.reserve(n_out);
  std::sample(rows.begin(), rows.end(), std::back_inserter(replaced), n_out, rng);

  std::vector<int> labels(clean.labels().begin(), clean.labels().end());
  for (std::size_t i : replaced) {
    const auto x = clean.features(i);
    labels[i] = draw_scenario1_label(config.a, x[0], x[1], true, rng);
  }
  Dataset train(2);
  train.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) train.add(clean.features(i), labels[i]);

  Dataset test = scenario1_sample(config, config.test_n, rng);
  return {std::move(train), std::move(test), n_out};
}

GeneratedData gen_caseA(const CaseAConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const auto [mean1, mean0] = class_means(config.D, config.placement);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd0 = std::sqrt(config.s);
  auto noise1 = [&](std::mt19937_64& g) { return normal(g); };
  auto noise0 = [&](std::mt19937_64& g) { return sd0 * normal(g); };
  std::size_t n1 = 0;
  Dataset train = two_class_sample(config.n, config.r, mean1, mean0, noise1, noise0, rng, &n1);
  Dataset test = two_class_sample(config.test_n, config.r, mean1, mean0, noise1, noise0, rng, nullptr);
  return {std::move(train), std::move(test), n1};
}

GeneratedData gen_caseB(const CaseBConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const auto [mean1, mean0] = class_means(config.D, config.placement);
  std::student_t_distribution<double> t1(config.nu1);
  std::student_t_distribution<double> t0(config.nu0);
  auto noise1 = [&](std::mt19937_64& g) { return t1(g); };
  auto noise0 = [&](std::mt19937_64& g) { return t0(g); };
  std::size_t n1 = 0;
  Dataset train = two_class_sample(config.n, config.r, mean1, mean0, noise1, noise0, rng, &n1);
  Dataset test = two_class_sample(config.test_n, config.r, mean1, mean0, noise1, noise0, rng, nullptr);
  return {std::move(train), std::move(test), n1};
}

GeneratedData generate(const ScenarioConfig& config, std::uint64_t seed) {
  return std::visit(overloaded{
                        [seed](const Scenario1Config& c) { return gen_scenario1(c, seed); },
                        [seed](const CaseAConfig& c) { return gen_caseA(c, seed); },
                        [seed](const CaseBConfig& c) { return gen_caseB(c, seed); },
                    },
                    config);
}

double accuracy(Link link, const ParameterVector& theta, const Dataset& test, double threshold) {
  if (test.empty()) throw ContractError("accuracy needs a nonempty test set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (classify(link, theta, test.features(i), threshold) == test.label(i)) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
}

std::size_t MonteCarloOptions::effective_failure_threshold() const {
  if (failure_threshold > 0) return failure_threshold;
  return (replicates + 9) / 10;
}

bool is_failure(FitStatus status) { return status != FitStatus::converged; }

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t k) {
  return base_seed ^ static_cast<std::uint64_t>(k);
}

MonteCarloReport run_monte_carlo(const ScenarioConfig& config, std::span<const LossSpec> methods,
                                 const MonteCarloOptions& options) {
  if (options.replicates < 1) throw ParameterError("replicates must be at least 1");
  if (methods.empty()) throw ParameterError("at least one method is required");
  std::visit([](const auto& c) { c.validate(); }, config);
  options.fit.validate();

  const std::size_t reps = options.replicates;
  const std::size_t m = methods.size();
  const bool has_ml = std::any_of(methods.begin(), methods.end(),
                                  [](const LossSpec& s) { return s.family() == LossFamily::ml; });

  struct Outcome {
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    bool failed = true;
    std::size_t hash = 0;
  };
  std::vector<Outcome> outcomes(reps * m);

  auto run_replicate = [&](std::size_t k) {
    const GeneratedData data = generate(config, replicate_seed(options.base_seed, k));
    const std::size_t hash = data.train.content_hash() ^ (data.test.content_hash() << 1);
    const std::size_t d = data.train.feature_dim();

    // The ML fit doubles as the second initializer of every robust method.
    std::optional<FitResult> ml_fit;
    auto ml = [&]() -> const FitResult& {
      if (!ml_fit) {
        FitOptions o = options.fit;
        o.initializers = {ParameterVector::zeros(d)};
        ml_fit = fit(LossSpec::ml(), options.link, data.train, o);
      }
      return *ml_fit;
    };
    if (has_ml) ml();

    for (std::size_t j = 0; j < m; ++j) {
      const LossSpec& spec = methods[j];
      FitResult result;
      if (spec.family() == LossFamily::ml) {
        result = ml();
      } else {
        FitOptions o = options.fit;
        if (o.initializers.empty()) {
          o.initializers = {ParameterVector::zeros(d)};
          if (ml().status != FitStatus::numerical_failure) o.initializers.push_back(ml().theta_hat);
        }
        result = fit(spec, options.link, data.train, o);
      }
      Outcome& out = outcomes[k * m + j];
      out.hash = hash;
      out.failed = is_failure(result.status);
      if (!out.failed) out.accuracy = accuracy(options.link, result.theta_hat, data.test);
    }
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    for (std::size_t k = 0; k < reps; ++k) run_replicate(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < reps; k = next++) {
          try {
            run_replicate(k);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  MonteCarloReport report;
  const std::string setting = describe(config);
  const std::size_t threshold = options.effective_failure_threshold();
  for (std::size_t j = 0; j < m; ++j) {
    MonteCarloRow row;
    row.setting = setting;
    row.method = methods[j].to_string();
    row.n_replicates = reps;
    double sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t k = 0; k < reps; ++k) {
      const Outcome& o = outcomes[k * m + j];
      row.accuracies.push_back(o.accuracy);
      if (o.failed) {
        ++row.n_failures;
      } else {
        sum += o.accuracy;
        ++ok;
      }
    }
    if (ok > 0) row.mean_accuracy = sum / static_cast<double>(ok);
    row.dash_marker = row.n_failures >= threshold;
    report.rows.push_back(std::move(row));
  }
  report.data_hashes.assign(reps, std::vector<std::size_t>(m));
  for (std::size_t k = 0; k < reps; ++k) {
    for (std::size_t j = 0; j < m; ++j) report.data_hashes[k][j] = outcomes[k * m + j].hash;
  }
  return report;
}

std::string report_csv(const MonteCarloReport& report) {
  std::ostringstream out;
  out << "setting,method,mean_accuracy,n_failures,n_replicates\n";
  for (const auto& row : report.rows) {
    out << row.setting << ',' << row.method << ',';
    if (row.dash_marker) {
      out << "--";
    } else if (row.mean_accuracy) {
      out << format_fixed(*row.mean_accuracy, 3);
    } else {
      out << "nan";
    }
    out << ',' << row.n_failures << ',' << row.n_replicates << '\n';
  }
  return out.str();
}

}  // namespace binreg
