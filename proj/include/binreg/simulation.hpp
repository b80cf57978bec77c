#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "binreg/estimation.hpp"
#include "binreg/links.hpp"
#include "binreg/losses.hpp"
#include "binreg/model.hpp"

namespace binreg {

/// Logistic truth θ* = (0, a, -a) on Unif[-3, 3]² features; a Binomial(n, p_out)
/// subset of training labels is redrawn from the sign-flipped model. Test data
/// are clean.
struct Scenario1Config {
  std::size_t n = 400;
  double a = 1.0;
  double p_out = 0.0;
  std::size_t test_n = 50000;

  void validate() const;
};

/// Where the two class means sit, given the separation parameter D.
///   axis:     μ₀ = (0, 0), μ₁ = (D, 0); ‖μ₁ - μ₀‖ = D.
///   diagonal: μ₀ = (0, 0), μ₁ = (D, D); ‖μ₁ - μ₀‖ = D·√2.
/// The reference Case A/B accuracies are only reachable with the diagonal
/// layout (with the axis layout they exceed the Bayes rate), so it is the default.
enum class MeanPlacement { axis, diagonal };
std::string_view placement_name(MeanPlacement p);
MeanPlacement parse_placement(std::string_view name);

/// Binormal classes: class 1 ~ N(μ₁, I₂), class 0 ~ N(μ₀, s·I₂), n₁ ~ Binomial(n, r).
struct CaseAConfig {
  std::size_t n = 400;
  double r = 0.5;
  double D = 2.0;
  double s = 1.0;
  std::size_t test_n = 50000;
  MeanPlacement placement = MeanPlacement::diagonal;

  void validate() const;
};

/// As Case A but each class is its mean plus two independent Student-t(ν_k) coordinates.
struct CaseBConfig {
  std::size_t n = 400;
  double r = 0.5;
  double D = 2.0;
  double nu1 = 7.0;
  double nu0 = 7.0;
  std::size_t test_n = 50000;
  MeanPlacement placement = MeanPlacement::diagonal;

  void validate() const;
};

using ScenarioConfig = std::variant<Scenario1Config, CaseAConfig, CaseBConfig>;

/// Human-readable setting label, e.g. "scenario1 n=400 a=1 p_out=0.05".
std::string describe(const ScenarioConfig& config);

/// The two class means for a Case A/B layout.
std::pair<std::vector<double>, std::vector<double>> class_means(double D, MeanPlacement placement);

struct GeneratedData {
  Dataset train;
  Dataset test;
  /// Scenario 1: relabelled training rows. Case A/B: class-1 training rows.
  std::size_t count = 0;
};

GeneratedData gen_scenario1(const Scenario1Config& config, std::uint64_t seed);
GeneratedData gen_caseA(const CaseAConfig& config, std::uint64_t seed);
GeneratedData gen_caseB(const CaseBConfig& config, std::uint64_t seed);
GeneratedData generate(const ScenarioConfig& config, std::uint64_t seed);

/// Percentage of test rows whose classify() label equals the recorded label.
double accuracy(Link link, const ParameterVector& theta, const Dataset& test,
                double threshold = 0.5);

struct MonteCarloOptions {
  std::size_t replicates = 1000;
  /// 0 means ceil(0.1 · replicates).
  std::size_t failure_threshold = 0;
  std::uint64_t base_seed = 1;
  Link link = Link::logit;
  FitOptions fit;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;

  std::size_t effective_failure_threshold() const;
};

struct MonteCarloRow {
  std::string setting;
  std::string method;
  /// Mean over non-failed replicates; empty when every replicate failed.
  std::optional<double> mean_accuracy;
  std::size_t n_failures = 0;
  std::size_t n_replicates = 0;
  bool dash_marker = false;
  /// Per-replicate accuracy, NaN where the fit failed.
  std::vector<double> accuracies;
};

struct MonteCarloReport {
  std::vector<MonteCarloRow> rows;
  /// [replicate][method] hash of the train and test data handed to that fit.
  std::vector<std::vector<std::size_t>> data_hashes;
};

/// A fit counts as failed unless its status is converged.
bool is_failure(FitStatus status);

/// Seed of replicate k: base_seed XOR k.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t k);

/// Every replicate generates one train/test pair and fits every method on it.
MonteCarloReport run_monte_carlo(const ScenarioConfig& config, std::span<const LossSpec> methods,
                                 const MonteCarloOptions& options);

/// Header `setting,method,mean_accuracy,n_failures,n_replicates`; accuracies
/// with three decimals or `--`.
std::string report_csv(const MonteCarloReport& report);

}  // namespace binreg
