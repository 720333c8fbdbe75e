#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmtm/diagnostics.hpp"
#include "pmtm/mtm.hpp"
#include "pmtm/targets.hpp"

namespace pmtm {

// Bumped whenever the metrics.csv columns or their meaning change.
inline constexpr int kMetricsSchemaVersion = 1;
inline constexpr std::string_view kMetricsHeader = "repetition,metric,component,n,value";

enum class StartPolicy {
  fixed,        // start_point, or the origin when empty
  uniform_box,  // uniform on [-start_box, start_box]^d, drawn per repetition
  far_start,  // (50, ..., 50)
};

struct ExperimentConfig {
  // [experiment]
  std::string target = "pi4";
  SamplerKind sampler = SamplerKind::ap;
  long long iterations = 1000;
  int repetitions = 1;
  double burn_in_fraction = 0.5;
  bool match_evaluations = false;  // mh runs d * M * iterations steps
  std::uint64_t seed = 1;
  StartPolicy start = StartPolicy::uniform_box;
  std::vector<double> start_point;
  double start_box = 5.0;
  std::vector<MetricKind> metrics = {MetricKind::act, MetricKind::asjd};
  double coverage_level = 0.99;
  double hitting_level = 0.95;
  bool analytic_variance = true;  // normalize ACT by known target variances

  // [sampler]
  int trials = 5;
  WeightKind weight_fn = WeightKind::norm_power;
  std::optional<double> alpha;  // default 2.5, or 2.9 for ag2
  double beta = 1.0;
  double upsilon_init = 1.0;
  double sigma = 0.05;
  double varsigma = 3.0;
  bool contiguous_centers = false;
  std::vector<double> gaussian_sds_init;  // default 2^{j-2}
  double eta_over = 0.4;
  double eta_under = 0.1;
  ReferenceConvention reference = ReferenceConvention::selected_slot;
  bool count_on_accept = false;

  // [adaptation]
  long long interval = 50;
  double eta1 = 0.4;
  double eta2 = 0.4;
  Schedule schedule = Schedule::burn_in_only;
  double epsilon = 1e-6;
  double delta_max = 1e6;
  double containment_lo = -1e8;
  double containment_hi = 1e8;
  bool per_component_gate = false;

  // [output]
  std::filesystem::path output_dir = "pmtm_out";
  bool write_chains = false;
  int workers = 1;

  void validate() const;

  // Iterations actually run: iterations, or d * M * iterations for a
  // random-walk run with match_evaluations.
  long long effective_iterations(int dim) const;
  long long burn_in_iterations(int dim) const;

  SamplerConfig sampler_config(const TargetDistribution& target) const;
  Vector start_for(int repetition, int dim) const;

  // Canonical config-file text; parse_config(to_text()) round-trips.
  std::string to_text(bool include_output = true) const;
  // FNV-1a of the result-relevant part of the canonical text.
  std::uint64_t hash() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string_view to_string(SamplerKind s);
SamplerKind parse_sampler(std::string_view name);
std::string_view to_string(Schedule s);
Schedule parse_schedule(std::string_view name);
std::string_view to_string(WeightKind w);
WeightKind parse_weight_kind(std::string_view name);

// Iterations at which coverage curves are reported: 1, 2, 5, 10, 20, 50, ...
// up to N, plus N itself.
std::vector<long long> coverage_report_points(long long n_iterations);

// The chain of repetition r (1-based) under cfg.
ChainRecord run_repetition(const ExperimentConfig& cfg, const TargetDistribution& target,
                           int repetition);

// Every configured metric of one chain, in output order.
std::vector<MetricRecord> compute_metrics(const ExperimentConfig& cfg,
                                          const TargetDistribution& target,
                                          const ChainRecord& chain, int repetition);

struct SummaryRow {
  MetricKind metric;
  int component;
  std::optional<long long> n;
  long long count;   // records with a value
  long long missing; // records without one (e.g. never hit)
  double mean;
  double median;
  double q025;
  double q975;
};

// Empirical quantile of sorted data with linear interpolation between order
// statistics: position (size - 1) * p, zero-based.
double empirical_quantile(std::span<const double> sorted, double p);

// Mean, median and 2.5% / 97.5% quantiles per (metric, component, n).
std::vector<SummaryRow> summarize(std::span<const MetricRecord> metrics);

std::string format_metric_row(const MetricRecord& m);
std::string metrics_csv(std::span<const MetricRecord> metrics);

struct ExperimentResult {
  std::vector<MetricRecord> metrics;
  std::vector<SummaryRow> summary;
  long long trial_evaluations = 0;
  long long reference_evaluations = 0;
  double acceptance_rate = 0.0;  // mean over repetitions
};

// Runs every repetition (on cfg.workers threads), then writes metrics.csv,
// summary.json, config.toml and optionally chains/r<k>.bin into
// cfg.output_dir. Output bytes depend only on the config and seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Same computation without touching the filesystem.
ExperimentResult compute_experiment(const ExperimentConfig& cfg);

// Chain dump: magic, JSON header (config text, repetition, shape), then the
// raw state / selection / acceptance arrays.
void write_chain_file(const std::filesystem::path& path, const ExperimentConfig& cfg,
                      int repetition, const ChainRecord& chain);

struct StoredChain {
  ExperimentConfig config;
  int repetition = 0;
  ChainRecord chain;
};

StoredChain read_chain_file(const std::filesystem::path& path);

// Writes text to path via a temporary file and rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view text);

// Named desk-scale studies. `scale` multiplies the iteration counts of the
// benchmark studies. Each entry is (sub-directory, config).
std::vector<std::pair<std::string, ExperimentConfig>> study_presets(std::string_view study,
                                                                    double scale = 1.0);
std::vector<std::string> study_names();

}  // namespace pmtm
