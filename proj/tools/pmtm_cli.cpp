#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pmtm/diagnostics.hpp"
#include "pmtm/errors.hpp"
#include "pmtm/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kUsage = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<long long> iters;
  std::optional<std::string> out;
  std::optional<int> workers;
  bool write_chains = false;
};

void apply(const Overrides& o, pmtm::ExperimentConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.reps) cfg.repetitions = *o.reps;
  if (o.iters) cfg.iterations = *o.iters;
  if (o.out) cfg.output_dir = *o.out;
  if (o.workers) cfg.workers = *o.workers;
  if (o.write_chains) cfg.write_chains = true;
}

void print_summary(const pmtm::ExperimentConfig& cfg, const pmtm::ExperimentResult& result) {
  std::printf("%s / %s: %d repetitions, acceptance %.3f -> %s\n", cfg.target.c_str(),
              std::string(pmtm::to_string(cfg.sampler)).c_str(), cfg.repetitions,
              result.acceptance_rate, cfg.output_dir.string().c_str());
  for (const pmtm::SummaryRow& s : result.summary) {
    if (s.metric == pmtm::MetricKind::coverage_component ||
        s.metric == pmtm::MetricKind::coverage_joint) {
      const long long last = cfg.effective_iterations(
          pmtm::make_benchmark_target(cfg.target).dim());
      if (!s.n || *s.n != last) continue;
    }
    std::printf("  %-18s k=%d  median %.4g  mean %.4g  [%.4g, %.4g]",
                std::string(pmtm::to_string(s.metric)).c_str(), s.component, s.median, s.mean,
                s.q025, s.q975);
    if (s.missing) std::printf("  missing %lld", s.missing);
    std::printf("\n");
  }
}

int cmd_run(const std::string& path, const Overrides& o) {
  pmtm::ExperimentConfig cfg = pmtm::load_config(path);
  apply(o, cfg);
  cfg.validate();
  print_summary(cfg, pmtm::run_experiment(cfg));
  return kOk;
}

int cmd_reproduce(const std::string& study, double scale, const std::string& only,
                  const Overrides& o) {
  const auto presets = pmtm::study_presets(study, scale);
  const std::filesystem::path base = o.out ? *o.out : "pmtm_out/" + study;
  bool ran = false;
  for (auto [name, cfg] : presets) {
    if (!only.empty() && name != only) continue;
    apply(o, cfg);
    cfg.output_dir = base / name;
    cfg.validate();
    print_summary(cfg, pmtm::run_experiment(cfg));
    ran = true;
  }
  if (!ran) throw pmtm::ConfigError("study '" + study + "' has no sampler '" + only + "'");
  return kOk;
}

int cmd_diagnose(const std::string& path) {
  const pmtm::StoredChain stored = pmtm::read_chain_file(path);
  const pmtm::TargetDistribution target = pmtm::make_benchmark_target(stored.config.target);
  const auto metrics = pmtm::compute_metrics(stored.config, target, stored.chain, stored.repetition);
  std::cout << pmtm::metrics_csv(metrics);
  return kOk;
}

int cmd_quantile_check() {
  struct Case {
    double level;
    int df;
    double expected;
  };
  const Case cases[] = {{0.99, 1, 6.6349}, {0.99, 5, 15.0863}, {0.95, 2, 5.9915}};
  bool ok = true;
  for (const Case& c : cases) {
    const double z = pmtm::chisq_quantile(c.level, c.df);
    const bool pass = std::abs(z - c.expected) <= 1e-3;
    ok = ok && pass;
    std::printf("%s chisq(%.2f, %d) = %.6f (table %.4f)\n", pass ? "PASS" : "FAIL", c.level, c.df,
                z, c.expected);
  }
  return ok ? kOk : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive component-wise multiple-try Metropolis experiments"};
  app.require_subcommand(1);

  Overrides o;
  auto add_overrides = [&o](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--reps", o.reps, "Number of repetitions")->check(CLI::PositiveNumber);
    sub->add_option("--iters", o.iters, "Iterations per repetition")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--write-chains", o.write_chains, "Also dump chains/r<k>.bin");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  add_overrides(run);

  std::string study;
  double scale = 1.0;
  std::string only;
  auto* reproduce = app.add_subcommand("reproduce", "Run a built-in study");
  reproduce->add_option("study", study, "Study name")
      ->required()
      ->check(CLI::IsMember(pmtm::study_names()));
  reproduce->add_option("--scale", scale, "Multiplier on the benchmark iteration counts")
      ->check(CLI::PositiveNumber);
  reproduce->add_option("--sampler", only, "Run only this sampler");
  add_overrides(reproduce);

  std::string chain_path;
  auto* diagnose = app.add_subcommand("diagnose", "Recompute metrics from a chain file");
  diagnose->add_option("chain", chain_path, "Chain file")->required();

  auto* quantile = app.add_subcommand("quantile-check", "Check chi-square quantiles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, o);
    if (*reproduce) return cmd_reproduce(study, scale, only, o);
    if (*diagnose) return cmd_diagnose(chain_path);
    if (*quantile) return cmd_quantile_check();
  } catch (const pmtm::ConfigError& e) {
    std::fprintf(stderr, "pmtm: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pmtm: %s\n", e.what());
    return kRuntimeFailure;
  }
  return kUsage;
}
