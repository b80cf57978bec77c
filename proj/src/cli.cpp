#include "binreg/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "binreg/diagnostics.hpp"
#include "binreg/errors.hpp"
#include "binreg/estimation.hpp"
#include "binreg/format.hpp"
#include "binreg/io.hpp"
#include "binreg/simulation.hpp"

namespace binreg {

namespace {

using Config = std::vector<std::pair<std::string, std::string>>;

struct ScenarioFlags {
  std::string name;
  std::size_t n = 400;
  double a = 1.0;
  double p_out = 0.0;
  double r = 0.5;
  double D = 2.0;
  double s = 1.0;
  double nu1 = 7.0;
  double nu0 = 7.0;
  std::size_t test_n = 50000;
  std::string placement = "diagonal";
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("scenario", f.name, "scenario1, caseA or caseB")
      ->required()
      ->check(CLI::IsMember({"scenario1", "caseA", "caseB"}));
  cmd->add_option("--n", f.n, "training sample size")->capture_default_str();
  cmd->add_option("--test-n", f.test_n, "test sample size")->capture_default_str();
  cmd->add_option("--a", f.a, "scenario1: slope magnitude")->capture_default_str();
  cmd->add_option("--pout", f.p_out, "scenario1: relabelling probability")->capture_default_str();
  cmd->add_option("--r", f.r, "caseA/caseB: class-1 proportion")->capture_default_str();
  cmd->add_option("--D", f.D, "caseA/caseB: mean separation")->capture_default_str();
  cmd->add_option("--s", f.s, "caseA: class-0 variance")->capture_default_str();
  cmd->add_option("--nu1", f.nu1, "caseB: class-1 degrees of freedom")->capture_default_str();
  cmd->add_option("--nu0", f.nu0, "caseB: class-0 degrees of freedom")->capture_default_str();
  cmd->add_option("--placement", f.placement, "caseA/caseB: axis or diagonal")
      ->check(CLI::IsMember({"axis", "diagonal"}))
      ->capture_default_str();
}

ScenarioConfig build_scenario(const ScenarioFlags& f, Config& echo) {
  echo.emplace_back("scenario", f.name);
  echo.emplace_back("n", std::to_string(f.n));
  echo.emplace_back("test_n", std::to_string(f.test_n));
  if (f.name == "scenario1") {
    echo.emplace_back("a", format_shortest(f.a));
    echo.emplace_back("p_out", format_shortest(f.p_out));
    Scenario1Config c{f.n, f.a, f.p_out, f.test_n};
    c.validate();
    return c;
  }
  echo.emplace_back("r", format_shortest(f.r));
  echo.emplace_back("D", format_shortest(f.D));
  echo.emplace_back("placement", f.placement);
  const MeanPlacement placement = parse_placement(f.placement);
  if (f.name == "caseA") {
    echo.emplace_back("s", format_shortest(f.s));
    CaseAConfig c{f.n, f.r, f.D, f.s, f.test_n, placement};
    c.validate();
    return c;
  }
  echo.emplace_back("nu1", format_shortest(f.nu1));
  echo.emplace_back("nu0", format_shortest(f.nu0));
  CaseBConfig c{f.n, f.r, f.D, f.nu1, f.nu0, f.test_n, placement};
  c.validate();
  return c;
}

std::string manifest_text(const RunManifest& m) {
  std::ostringstream out;
  write_manifest(out, m);
  return out.str();
}

// Writes `contents` to `path` with a `.manifest` sidecar, or to stdout when
// no path was given.
void emit(const std::string& path, const std::string& contents, RunManifest manifest,
          std::ostream& out) {
  if (path.empty()) {
    out << contents;
    return;
  }
  write_text_file(path, contents);
  manifest.finished_at = utc_timestamp();
  write_text_file(path + ".manifest", manifest_text(manifest));
}

RunManifest start_manifest(std::string command, std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.seed = seed;
  m.started_at = utc_timestamp();
  return m;
}

struct FitFlags {
  std::string data;
  std::string link = "logit";
  std::string loss = "ml";
  std::string out;
  int max_iterations = FitOptions{}.max_iterations;
  double tolerance = FitOptions{}.gradient_tolerance;
  std::uint64_t seed = 0;
};

int cmd_fit(const FitFlags& f, std::ostream& out, std::ostream& err) {
  const Link link = parse_link(f.link);
  const LossSpec spec = parse_loss_spec(f.loss);
  FitOptions options;
  options.max_iterations = f.max_iterations;
  options.gradient_tolerance = f.tolerance;
  options.validate();

  RunManifest manifest = start_manifest("fit", f.seed);
  manifest.config = {{"data", f.data},
                     {"link", f.link},
                     {"loss", spec.to_string()},
                     {"max_iterations", std::to_string(f.max_iterations)},
                     {"gradient_tolerance", format_shortest(f.tolerance)}};

  const Dataset data = load_dataset(f.data);
  const FitResult result = fit(spec, link, data, options);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  std::ostringstream text;
  write_model(text, ModelFile{link, spec, result.theta_hat});
  text << "final_risk=" << format_precise(result.final_risk) << '\n';
  text << "gradient_norm=" << format_precise(result.gradient_norm) << '\n';
  text << "iterations=" << result.iterations << '\n';
  text << "status=" << fit_status_name(result.status) << '\n';
  text << "n=" << data.size() << '\n';
  manifest.finished_at = utc_timestamp();
  write_manifest(text, manifest);

  if (f.out.empty()) {
    out << text.str();
  } else {
    write_text_file(f.out, text.str());
  }
  if (!result.converged()) {
    err << "fit did not converge: " << fit_status_name(result.status) << '\n';
    return 2;
  }
  return 0;
}

struct PredictFlags {
  std::string model;
  std::string data;
  double threshold = 0.5;
  std::string out;
};

int cmd_predict(const PredictFlags& f, std::ostream& out) {
  RunManifest manifest = start_manifest("predict", 0);
  manifest.config = {{"model", f.model}, {"data", f.data}, {"threshold", format_shortest(f.threshold)}};
  const ModelFile model = load_model(f.model);
  const Dataset data = load_dataset(f.data);
  if (model.theta.feature_dim() != data.feature_dim()) {
    throw ContractError("dimension mismatch: model has d=" +
                        std::to_string(model.theta.feature_dim()) + ", data has d=" +
                        std::to_string(data.feature_dim()));
  }
  std::ostringstream text;
  text << "q1,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    text << format_precise(conditional_prob(model.link, model.theta, x, 1)) << ','
         << classify(model.link, model.theta, x, f.threshold) << '\n';
  }
  emit(f.out, text.str(), std::move(manifest), out);
  return 0;
}

struct DiagnoseFlags {
  std::string link = "logit";
  std::string loss = "ml";
  int y = 1;
  double z_prime = 0.0;
  std::optional<double> z_min;
  std::optional<double> z_max;
  std::optional<std::size_t> points;
  std::string out;
};

int cmd_diagnose(const DiagnoseFlags& f, std::ostream& out) {
  const Link link = parse_link(f.link);
  const LossSpec spec = parse_loss_spec(f.loss);
  const std::vector<double> fallback = default_scan_grid(link);
  const double lo = f.z_min.value_or(fallback.front());
  const double hi = f.z_max.value_or(fallback.back());
  const std::size_t count = f.points.value_or(fallback.size());
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ParameterError("grid needs finite zmin < zmax");
  }
  if (count < 3) throw ParameterError("grid needs at least 3 points");
  const std::vector<double> grid = linspace(lo, hi, count);

  RunManifest manifest = start_manifest("diagnose", 0);
  manifest.config = {{"link", f.link},          {"loss", spec.to_string()},
                     {"y", std::to_string(f.y)}, {"z_prime", format_shortest(f.z_prime)},
                     {"zmin", format_shortest(lo)}, {"zmax", format_shortest(hi)},
                     {"points", std::to_string(count)}};

  const BoundednessReport report = boundedness_scan(spec, link, f.y, f.z_prime, grid);
  if (!f.out.empty()) {
    std::ostringstream csv;
    csv << "z,b\n";
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
      csv << format_precise(report.grid[i]) << ',' << format_precise(report.values[i]) << '\n';
    }
    emit(f.out, csv.str(), std::move(manifest), out);
  }
  out << tail_class_name(report.tail_classification) << '\n';
  return 0;
}

struct SimulateFlags {
  ScenarioFlags scenario;
  std::vector<std::string> methods{"ml"};
  std::size_t replicates = 1000;
  std::size_t failure_threshold = 0;
  std::uint64_t seed = 1;
  std::string link = "logit";
  unsigned threads = 0;
  int max_iterations = FitOptions{}.max_iterations;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  // Every method string is checked before any data are generated.
  std::vector<LossSpec> methods;
  for (const auto& m : f.methods) methods.push_back(parse_loss_spec(m));
  const Link link = parse_link(f.link);

  RunManifest manifest = start_manifest("simulate", f.seed);
  const ScenarioConfig config = build_scenario(f.scenario, manifest.config);
  std::string joined;
  for (const auto& m : methods) joined += (joined.empty() ? "" : ";") + m.to_string();
  manifest.config.emplace_back("methods", joined);
  manifest.config.emplace_back("replicates", std::to_string(f.replicates));
  manifest.config.emplace_back("link", f.link);
  manifest.config.emplace_back("max_iterations", std::to_string(f.max_iterations));

  MonteCarloOptions options;
  options.replicates = f.replicates;
  options.failure_threshold = f.failure_threshold;
  options.base_seed = f.seed;
  options.link = link;
  options.threads = f.threads;
  options.fit.max_iterations = f.max_iterations;
  manifest.config.emplace_back("failure_threshold",
                               std::to_string(options.effective_failure_threshold()));

  const MonteCarloReport report = run_monte_carlo(config, methods, options);
  emit(f.out, report_csv(report), std::move(manifest), out);
  return 0;
}

struct GenFlags {
  ScenarioFlags scenario;
  std::uint64_t seed = 1;
  std::string out;
  std::string test_out;
};

int cmd_gen(const GenFlags& f, std::ostream& out) {
  RunManifest manifest = start_manifest("gen", f.seed);
  const ScenarioConfig config = build_scenario(f.scenario, manifest.config);
  const GeneratedData data = generate(config, f.seed);
  std::ostringstream train;
  write_dataset_csv(train, data.train);
  if (!f.test_out.empty()) {
    std::ostringstream test;
    write_dataset_csv(test, data.test);
    RunManifest test_manifest = manifest;
    test_manifest.config.emplace_back("part", "test");
    emit(f.test_out, test.str(), std::move(test_manifest), out);
  }
  manifest.config.emplace_back("part", "train");
  emit(f.out, train.str(), std::move(manifest), out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust binary regression: fitting, prediction, diagnostics and simulation"};
  app.name("binreg");
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  FitFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a binary regression model to a dataset CSV");
  fit_cmd->add_option("data", fit_flags.data, "dataset CSV (header y,x1,...,xd)")->required();
  fit_cmd->add_option("--link", fit_flags.link, "logit, probit, cloglog or cauchit")->capture_default_str();
  fit_cmd->add_option("--loss", fit_flags.loss, "ml, beta:<b> or gamma:<g>")->capture_default_str();
  fit_cmd->add_option("--out", fit_flags.out, "result file (default: stdout)");
  fit_cmd->add_option("--max-iter", fit_flags.max_iterations, "iteration budget per start")
      ->capture_default_str();
  fit_cmd->add_option("--tol", fit_flags.tolerance, "gradient tolerance")->capture_default_str();
  fit_cmd->add_option("--seed", fit_flags.seed, "echoed in the manifest")->capture_default_str();

  PredictFlags predict_flags;
  auto* predict_cmd = app.add_subcommand("predict", "Class probabilities and labels from a fitted model");
  predict_cmd->add_option("model", predict_flags.model, "result file written by fit")->required();
  predict_cmd->add_option("data", predict_flags.data, "dataset CSV")->required();
  predict_cmd->add_option("--threshold", predict_flags.threshold, "label 1 iff q1 >= threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  predict_cmd->add_option("--out", predict_flags.out, "output CSV (default: stdout)");

  DiagnoseFlags diag_flags;
  auto* diag_cmd = app.add_subcommand("diagnose", "Scan the contamination effect over a z grid");
  diag_cmd->add_option("--link", diag_flags.link, "link function")->capture_default_str();
  diag_cmd->add_option("--loss", diag_flags.loss, "loss spec")->capture_default_str();
  diag_cmd->add_option("--y", diag_flags.y, "label")->check(CLI::IsMember({0, 1}))->capture_default_str();
  diag_cmd->add_option("--zprime", diag_flags.z_prime, "contamination target z'")->capture_default_str();
  diag_cmd->add_option("--zmin", diag_flags.z_min, "grid start");
  diag_cmd->add_option("--zmax", diag_flags.z_max, "grid end");
  diag_cmd->add_option("--points", diag_flags.points, "grid size");
  diag_cmd->add_option("--out", diag_flags.out, "write the z,b curve to this CSV");

  SimulateFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo accuracy study");
  add_scenario_flags(sim_cmd, sim_flags.scenario);
  sim_cmd->add_option("--methods", sim_flags.methods, "comma-separated loss specs")
      ->delimiter(',')
      ->capture_default_str();
  sim_cmd->add_option("--replicates", sim_flags.replicates, "number of replicates")
      ->check(CLI::Validator(
          [](std::string& v) {
            return v.find_first_not_of("0") == std::string::npos ? std::string("must be at least 1")
                                                                 : std::string();
          },
          "POSITIVE"))
      ->capture_default_str();
  sim_cmd->add_option("--failure-threshold", sim_flags.failure_threshold,
                      "failures that trigger a -- entry (0: 10% of replicates)")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_flags.seed, "base seed")->capture_default_str();
  sim_cmd->add_option("--link", sim_flags.link, "link used for fitting")->capture_default_str();
  sim_cmd->add_option("--threads", sim_flags.threads, "worker threads (0: all cores)")
      ->capture_default_str();
  sim_cmd->add_option("--max-iter", sim_flags.max_iterations, "iteration budget per start")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim_flags.out, "report CSV (default: stdout)");

  GenFlags gen_flags;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a scenario dataset as CSV");
  add_scenario_flags(gen_cmd, gen_flags.scenario);
  gen_cmd->add_option("--seed", gen_flags.seed, "seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_flags.out, "training CSV (default: stdout)");
  gen_cmd->add_option("--test-out", gen_flags.test_out, "also write the test set here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_flags, out, err);
    if (*predict_cmd) return cmd_predict(predict_flags, out);
    if (*diag_cmd) return cmd_diagnose(diag_flags, out);
    if (*sim_cmd) return cmd_simulate(sim_flags, out);
    if (*gen_cmd) return cmd_gen(gen_flags, out);
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace binreg
