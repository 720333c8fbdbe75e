#include "pmtm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pmtm/config_file.hpp"
#include "pmtm/errors.hpp"

namespace pmtm {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_doubles(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::string_view to_string(StartPolicy s) {
  switch (s) {
    case StartPolicy::fixed: return "fixed";
    case StartPolicy::uniform_box: return "uniform_box";
    case StartPolicy::far_start: return "far_start";
  }
  return "?";
}

StartPolicy parse_start(std::string_view name) {
  if (name == "fixed") return StartPolicy::fixed;
  if (name == "uniform_box") return StartPolicy::uniform_box;
  if (name == "far_start") return StartPolicy::far_start;
  throw ConfigError("unknown start policy '" + std::string(name) + "'");
}

std::string_view to_string(ReferenceConvention r) {
  return r == ReferenceConvention::selected_slot ? "selected_slot" : "last_slot";
}

ReferenceConvention parse_reference(std::string_view name) {
  if (name == "selected_slot") return ReferenceConvention::selected_slot;
  if (name == "last_slot") return ReferenceConvention::last_slot;
  throw ConfigError("unknown reference convention '" + std::string(name) + "'");
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

std::string_view to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::ap: return "ap";
    case SamplerKind::ag1: return "ag1";
    case SamplerKind::ag2: return "ag2";
    case SamplerKind::mh: return "mh";
  }
  return "?";
}

SamplerKind parse_sampler(std::string_view name) {
  if (name == "ap") return SamplerKind::ap;
  if (name == "ag1") return SamplerKind::ag1;
  if (name == "ag2") return SamplerKind::ag2;
  if (name == "mh") return SamplerKind::mh;
  throw ConfigError("unknown sampler '" + std::string(name) + "'");
}

std::string_view to_string(Schedule s) {
  switch (s) {
    case Schedule::diminishing: return "diminishing";
    case Schedule::always: return "always";
    case Schedule::burn_in_only: return "burn_in_only";
    case Schedule::off: return "off";
  }
  return "?";
}

Schedule parse_schedule(std::string_view name) {
  if (name == "diminishing") return Schedule::diminishing;
  if (name == "always") return Schedule::always;
  if (name == "burn_in_only") return Schedule::burn_in_only;
  if (name == "off") return Schedule::off;
  throw ConfigError("unknown schedule '" + std::string(name) + "'");
}

std::string_view to_string(WeightKind w) {
  switch (w) {
    case WeightKind::norm_power: return "norm_power";
    case WeightKind::mean_inverse: return "mean_inverse";
    case WeightKind::product_power: return "product_power";
    case WeightKind::unit: return "unit";
  }
  return "?";
}

WeightKind parse_weight_kind(std::string_view name) {
  if (name == "norm_power") return WeightKind::norm_power;
  if (name == "mean_inverse") return WeightKind::mean_inverse;
  if (name == "product_power") return WeightKind::product_power;
  if (name == "unit") return WeightKind::unit;
  throw ConfigError("unknown weight function '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  const TargetDistribution t = make_benchmark_target(target);
  const int d = t.dim();
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  check(iterations >= 1, "iterations must be at least 1");
  check(repetitions >= 1, "repetitions must be at least 1");
  check(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0, "burn_in_fraction must lie in [0, 1)");
  check(trials >= 2 && trials <= 127, "trials must lie in 2..127");
  check(workers >= 1, "workers must be at least 1");
  check(start != StartPolicy::fixed || start_point.empty() ||
            static_cast<int>(start_point.size()) == d,
        "start_point has the wrong dimension");
  check(start_box > 0.0, "start_box must be positive");
  check(coverage_level > 0.0 && coverage_level < 1.0, "coverage_level must lie in (0, 1)");
  check(hitting_level > 0.0 && hitting_level < 1.0, "hitting_level must lie in (0, 1)");
  check(containment_lo < containment_hi, "containment bounds are empty");
  check(gaussian_sds_init.empty() || static_cast<int>(gaussian_sds_init.size()) == trials,
        "gaussian_sds_init needs one entry per trial");
  for (MetricKind m : metrics) {
    if (m == MetricKind::coverage_joint || m == MetricKind::hitting_time) {
      check(t.covariance().has_value(), std::string(to_string(m)) + " needs a target covariance");
    }
    if (m == MetricKind::coverage_component) {
      check(t.component_variances().has_value(),
            "coverage_component needs known target variances");
    }
  }
  const long long kept = effective_iterations(d) + 1 - burn_in_iterations(d);
  for (MetricKind m : metrics) {
    if (m == MetricKind::act) check(kept >= 10, "act needs at least 10 post burn-in states");
  }
  try {
    sampler_config(t).validate(d);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

long long ExperimentConfig::effective_iterations(int dim) const {
  if (sampler == SamplerKind::mh && match_evaluations) {
    return static_cast<long long>(dim) * trials * iterations;
  }
  return iterations;
}

long long ExperimentConfig::burn_in_iterations(int dim) const {
  return static_cast<long long>(
      std::floor(burn_in_fraction * static_cast<double>(effective_iterations(dim))));
}

SamplerConfig ExperimentConfig::sampler_config(const TargetDistribution& t) const {
  SamplerConfig sc = SamplerConfig::defaults(sampler, trials);
  sc.weight.kind = weight_fn;
  if (weight_fn == WeightKind::product_power) sc.weight.exponent = beta;
  else if (alpha) sc.weight.exponent = *alpha;
  sc.plateau = {upsilon_init, sigma, varsigma, trials,
                contiguous_centers ? PlateauLayout::contiguous : PlateauLayout::gapped};
  if (!gaussian_sds_init.empty()) sc.gaussian_init.sds = gaussian_sds_init;
  sc.eta_over = eta_over;
  sc.eta_under = eta_under;
  sc.reference = reference;
  sc.count_on_accept = count_on_accept;
  sc.adaptation.interval = interval;
  sc.adaptation.eta1 = eta1;
  sc.adaptation.eta2 = eta2;
  sc.adaptation.schedule = schedule;
  sc.adaptation.burn_in = burn_in_iterations(t.dim());
  sc.adaptation.epsilon = epsilon;
  sc.adaptation.delta_max = delta_max;
  sc.adaptation.containment = ContainmentBox::cube(t.dim(), containment_lo, containment_hi);
  sc.adaptation.per_component_gate = per_component_gate;
  if (sampler == SamplerKind::mh) sc.mh_proposal = mh_proposal_for(parse_benchmark_target(target));
  return sc;
}

Vector ExperimentConfig::start_for(int repetition, int dim) const {
  switch (start) {
    case StartPolicy::fixed:
      if (start_point.empty()) return Vector::Zero(dim);
      return Eigen::Map<const Vector>(start_point.data(), dim);
    case StartPolicy::far_start:
      return Vector::Constant(dim, 50.0);
    case StartPolicy::uniform_box: {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(repetition), StreamPurpose::start_point);
      Vector x(dim);
      for (int k = 0; k < dim; ++k) x[k] = -start_box + 2.0 * start_box * uniform01(rng);
      return x;
    }
  }
  return Vector::Zero(dim);
}

std::string ExperimentConfig::to_text(bool include_output) const {
  std::ostringstream o;
  o << "[experiment]\n";
  o << "target = " << quoted(target) << "\n";
  o << "sampler = " << quoted(to_string(sampler)) << "\n";
  o << "iterations = " << iterations << "\n";
  o << "repetitions = " << repetitions << "\n";
  o << "burn_in_fraction = " << format_double(burn_in_fraction) << "\n";
  o << "match_evaluations = " << (match_evaluations ? "true" : "false") << "\n";
  o << "seed = " << seed << "\n";
  o << "start = " << quoted(to_string(start)) << "\n";
  o << "start_point = " << format_doubles(start_point) << "\n";
  o << "start_box = " << format_double(start_box) << "\n";
  o << "metrics = [";
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    o << (i ? ", " : "") << quoted(to_string(metrics[i]));
  }
  o << "]\n";
  o << "coverage_level = " << format_double(coverage_level) << "\n";
  o << "hitting_level = " << format_double(hitting_level) << "\n";
  o << "analytic_variance = " << (analytic_variance ? "true" : "false") << "\n";
  o << "\n[sampler]\n";
  o << "trials = " << trials << "\n";
  o << "weight_fn = " << quoted(to_string(weight_fn)) << "\n";
  if (alpha) o << "alpha = " << format_double(*alpha) << "\n";
  o << "beta = " << format_double(beta) << "\n";
  o << "upsilon_init = " << format_double(upsilon_init) << "\n";
  o << "sigma = " << format_double(sigma) << "\n";
  o << "varsigma = " << format_double(varsigma) << "\n";
  o << "contiguous_centers = " << (contiguous_centers ? "true" : "false") << "\n";
  o << "gaussian_sds_init = " << format_doubles(gaussian_sds_init) << "\n";
  o << "eta_over = " << format_double(eta_over) << "\n";
  o << "eta_under = " << format_double(eta_under) << "\n";
  o << "reference = " << quoted(to_string(reference)) << "\n";
  o << "count_on_accept = " << (count_on_accept ? "true" : "false") << "\n";
  o << "\n[adaptation]\n";
  o << "L = " << interval << "\n";
  o << "eta1 = " << format_double(eta1) << "\n";
  o << "eta2 = " << format_double(eta2) << "\n";
  o << "schedule = " << quoted(to_string(schedule)) << "\n";
  o << "epsilon = " << format_double(epsilon) << "\n";
  o << "delta_max = " << format_double(delta_max) << "\n";
  o << "containment_lo = " << format_double(containment_lo) << "\n";
  o << "containment_hi = " << format_double(containment_hi) << "\n";
  o << "per_component_gate = " << (per_component_gate ? "true" : "false") << "\n";
  if (include_output) {
    o << "\n[output]\n";
    o << "dir = " << quoted(output_dir.string()) << "\n";
    o << "write_chains = " << (write_chains ? "true" : "false") << "\n";
    o << "workers = " << workers << "\n";
  }
  return o.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(to_text(false)); }

ExperimentConfig parse_config(std::string_view text) {
  const KeyValueDocument doc = KeyValueDocument::parse(text);
  doc.reject_unknown({
      "experiment.target", "experiment.sampler", "experiment.iterations",
      "experiment.repetitions", "experiment.burn_in_fraction", "experiment.match_evaluations",
      "experiment.seed", "experiment.start", "experiment.start_point", "experiment.start_box",
      "experiment.metrics", "experiment.coverage_level", "experiment.hitting_level",
      "experiment.analytic_variance",
      "sampler.trials", "sampler.weight_fn", "sampler.alpha", "sampler.beta",
      "sampler.upsilon_init", "sampler.sigma", "sampler.varsigma", "sampler.contiguous_centers",
      "sampler.gaussian_sds_init", "sampler.eta_over", "sampler.eta_under", "sampler.reference",
      "sampler.count_on_accept",
      "adaptation.L", "adaptation.eta1", "adaptation.eta2", "adaptation.schedule",
      "adaptation.epsilon", "adaptation.delta_max", "adaptation.containment_lo",
      "adaptation.containment_hi", "adaptation.per_component_gate",
      "output.dir", "output.write_chains", "output.workers",
  });

  ExperimentConfig c;
  if (auto v = doc.get_string("experiment.target")) c.target = *v;
  if (auto v = doc.get_string("experiment.sampler")) c.sampler = parse_sampler(*v);
  if (auto v = doc.get_integer("experiment.iterations")) c.iterations = *v;
  if (auto v = doc.get_integer("experiment.repetitions")) c.repetitions = static_cast<int>(*v);
  if (auto v = doc.get_double("experiment.burn_in_fraction")) c.burn_in_fraction = *v;
  if (auto v = doc.get_bool("experiment.match_evaluations")) c.match_evaluations = *v;
  if (auto v = doc.get_integer("experiment.seed")) {
    if (*v < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = doc.get_string("experiment.start")) c.start = parse_start(*v);
  if (auto v = doc.get_doubles("experiment.start_point")) c.start_point = *v;
  if (auto v = doc.get_double("experiment.start_box")) c.start_box = *v;
  if (auto v = doc.get_strings("experiment.metrics")) {
    c.metrics.clear();
    for (const auto& m : *v) c.metrics.push_back(parse_metric(m));
  }
  if (auto v = doc.get_double("experiment.coverage_level")) c.coverage_level = *v;
  if (auto v = doc.get_double("experiment.hitting_level")) c.hitting_level = *v;
  if (auto v = doc.get_bool("experiment.analytic_variance")) c.analytic_variance = *v;

  if (auto v = doc.get_integer("sampler.trials")) c.trials = static_cast<int>(*v);
  if (auto v = doc.get_string("sampler.weight_fn")) c.weight_fn = parse_weight_kind(*v);
  if (auto v = doc.get_double("sampler.alpha")) c.alpha = *v;
  if (auto v = doc.get_double("sampler.beta")) c.beta = *v;
  if (auto v = doc.get_double("sampler.upsilon_init")) c.upsilon_init = *v;
  if (auto v = doc.get_double("sampler.sigma")) c.sigma = *v;
  if (auto v = doc.get_double("sampler.varsigma")) c.varsigma = *v;
  if (auto v = doc.get_bool("sampler.contiguous_centers")) c.contiguous_centers = *v;
  if (auto v = doc.get_doubles("sampler.gaussian_sds_init")) c.gaussian_sds_init = *v;
  if (auto v = doc.get_double("sampler.eta_over")) c.eta_over = *v;
  if (auto v = doc.get_double("sampler.eta_under")) c.eta_under = *v;
  if (auto v = doc.get_string("sampler.reference")) c.reference = parse_reference(*v);
  if (auto v = doc.get_bool("sampler.count_on_accept")) c.count_on_accept = *v;

  if (auto v = doc.get_integer("adaptation.L")) c.interval = *v;
  if (auto v = doc.get_double("adaptation.eta1")) c.eta1 = *v;
  if (auto v = doc.get_double("adaptation.eta2")) c.eta2 = *v;
  if (auto v = doc.get_string("adaptation.schedule")) c.schedule = parse_schedule(*v);
  if (auto v = doc.get_double("adaptation.epsilon")) c.epsilon = *v;
  if (auto v = doc.get_double("adaptation.delta_max")) c.delta_max = *v;
  if (auto v = doc.get_double("adaptation.containment_lo")) c.containment_lo = *v;
  if (auto v = doc.get_double("adaptation.containment_hi")) c.containment_hi = *v;
  if (auto v = doc.get_bool("adaptation.per_component_gate")) c.per_component_gate = *v;

  if (auto v = doc.get_string("output.dir")) c.output_dir = *v;
  if (auto v = doc.get_bool("output.write_chains")) c.write_chains = *v;
  if (auto v = doc.get_integer("output.workers")) c.workers = static_cast<int>(*v);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ---------------------------------------------------------------------------
// Running and measuring

std::vector<long long> coverage_report_points(long long n_iterations) {
  std::vector<long long> points;
  for (long long decade = 1; decade <= n_iterations; decade *= 10) {
    for (long long mult : {1, 2, 5}) {
      if (decade * mult <= n_iterations) points.push_back(decade * mult);
    }
    if (decade > n_iterations / 10) break;
  }
  if (points.empty() || points.back() != n_iterations) points.push_back(n_iterations);
  return points;
}

ChainRecord run_repetition(const ExperimentConfig& cfg, const TargetDistribution& target,
                           int repetition) {
  const int d = target.dim();
  Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(repetition), StreamPurpose::chain);
  ChainRecord chain = run_chain(rng, cfg.sampler_config(target), target,
                                cfg.effective_iterations(d), cfg.start_for(repetition, d));
  chain.seed = cfg.seed;
  chain.config_hash = cfg.hash();
  return chain;
}

std::vector<MetricRecord> compute_metrics(const ExperimentConfig& cfg,
                                          const TargetDistribution& target,
                                          const ChainRecord& chain, int repetition) {
  const int d = target.dim();
  require(chain.dim == d, "chain does not match target dimension");
  const long long burn_in = cfg.burn_in_iterations(d);
  std::vector<MetricRecord> out;
  auto has = [&](MetricKind m) {
    return std::find(cfg.metrics.begin(), cfg.metrics.end(), m) != cfg.metrics.end();
  };

  if (has(MetricKind::act)) {
    for (int k = 0; k < d; ++k) {
      const std::vector<double> series = chain.component_series(k, burn_in);
      std::optional<double> variance;
      if (cfg.analytic_variance && target.component_variances()) {
        variance = (*target.component_variances())[k];
      }
      MetricRecord r{repetition, MetricKind::act, k + 1, std::nullopt, std::nullopt};
      try {
        r.value = act_initial_sequence(series, variance);
      } catch (const ContractViolation&) {
        // component never moved after burn-in; no finite estimate
      }
      out.push_back(r);
    }
  }
  if (has(MetricKind::asjd)) {
    for (int k = 0; k < d; ++k) {
      const std::vector<double> series = chain.component_series(k, burn_in);
      out.push_back({repetition, MetricKind::asjd, k + 1, std::nullopt, asjd(series)});
    }
  }
  const std::vector<long long> points = coverage_report_points(chain.iterations);
  if (has(MetricKind::coverage_component) && chain.iterations >= 1) {
    const double z1 = chisq_quantile(cfg.coverage_level, 1);
    for (int k = 0; k < d; ++k) {
      const std::vector<double> curve = running_coverage_component(
          chain.component_series(k), (*target.component_variances())[k], z1);
      for (long long n : points) {
        out.push_back({repetition, MetricKind::coverage_component, k + 1, n, curve[n - 1]});
      }
    }
  }
  if (has(MetricKind::coverage_joint) && chain.iterations >= 1) {
    const double z2 = chisq_quantile(cfg.coverage_level, d);
    const std::vector<double> curve = running_coverage_joint(chain, *target.covariance(), z2);
    for (long long n : points) {
      out.push_back({repetition, MetricKind::coverage_joint, 0, n, curve[n - 1]});
    }
  }
  if (has(MetricKind::hitting_time)) {
    const double z0 = chisq_quantile(cfg.hitting_level, d);
    const auto hit = first_hitting_time(chain, *target.covariance(), z0);
    MetricRecord r{repetition, MetricKind::hitting_time, 0, std::nullopt, std::nullopt};
    if (hit) r.value = static_cast<double>(*hit);
    out.push_back(r);
  }
  return out;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  require(!sorted.empty(), "quantile of empty data");
  require(p >= 0.0 && p <= 1.0, "quantile level must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<SummaryRow> summarize(std::span<const MetricRecord> metrics) {
  require(!metrics.empty(), "nothing to summarize");
  using Key = std::tuple<int, int, long long>;
  std::map<Key, std::pair<std::vector<double>, long long>> groups;
  for (const MetricRecord& m : metrics) {
    // hitting times are grouped regardless of when they happened
    const long long n =
        (m.metric == MetricKind::hitting_time || !m.n) ? -1 : *m.n;
    auto& g = groups[{static_cast<int>(m.metric), m.component, n}];
    if (m.value && std::isfinite(*m.value)) g.first.push_back(*m.value);
    else ++g.second;
  }
  std::vector<SummaryRow> rows;
  for (auto& [key, group] : groups) {
    auto& [values, missing] = group;
    SummaryRow row{static_cast<MetricKind>(std::get<0>(key)), std::get<1>(key),
                   std::get<2>(key) < 0 ? std::nullopt : std::optional<long long>(std::get<2>(key)),
                   static_cast<long long>(values.size()), missing, NAN, NAN, NAN, NAN};
    if (!values.empty()) {
      std::sort(values.begin(), values.end());
      double total = 0.0;
      for (double v : values) total += v;
      row.mean = total / static_cast<double>(values.size());
      row.median = empirical_quantile(values, 0.5);
      row.q025 = empirical_quantile(values, 0.025);
      row.q975 = empirical_quantile(values, 0.975);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_metric_row(const MetricRecord& m) {
  std::string row = std::to_string(m.repetition);
  row += ',';
  row += to_string(m.metric);
  row += ',';
  row += std::to_string(m.component);
  row += ',';
  if (m.n) row += std::to_string(*m.n);
  row += ',';
  if (m.value) row += format_double(*m.value);
  return row;
}

std::string metrics_csv(std::span<const MetricRecord> metrics) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const MetricRecord& m : metrics) {
    out += format_metric_row(m);
    out += '\n';
  }
  return out;
}

namespace {

using ChainSink = std::function<void(int, const ChainRecord&)>;

ExperimentResult execute(const ExperimentConfig& cfg, const ChainSink& sink) {
  cfg.validate();
  const TargetDistribution target = make_benchmark_target(cfg.target);
  const int reps = cfg.repetitions;

  struct Slot {
    std::vector<MetricRecord> metrics;
    long long trial_evaluations = 0;
    long long reference_evaluations = 0;
    double acceptance_rate = 0.0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int i = next++; i < reps; i = next++) {
      try {
        const int r = i + 1;
        const ChainRecord chain = run_repetition(cfg, target, r);
        Slot& slot = slots[static_cast<std::size_t>(i)];
        slot.metrics = compute_metrics(cfg, target, chain, r);
        slot.trial_evaluations = chain.trial_evaluations;
        slot.reference_evaluations = chain.reference_evaluations;
        slot.acceptance_rate = chain.acceptance_rate();
        if (sink) sink(r, chain);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };

  const int n_threads = std::min(cfg.workers, reps);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (const Slot& s : slots) {
    result.metrics.insert(result.metrics.end(), s.metrics.begin(), s.metrics.end());
    result.trial_evaluations += s.trial_evaluations;
    result.reference_evaluations += s.reference_evaluations;
    result.acceptance_rate += s.acceptance_rate;
  }
  result.acceptance_rate /= static_cast<double>(reps);
  if (!result.metrics.empty()) result.summary = summarize(result.metrics);
  return result;
}

nlohmann::json summary_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  const int d = make_benchmark_target(cfg.target).dim();
  nlohmann::json j;
  j["schema_version"] = kMetricsSchemaVersion;
  j["config_hash"] = hex64(cfg.hash());
  j["target"] = cfg.target;
  j["sampler"] = std::string(to_string(cfg.sampler));
  j["repetitions"] = cfg.repetitions;
  j["iterations"] = cfg.effective_iterations(d);
  j["burn_in"] = cfg.burn_in_iterations(d);
  j["trial_evaluations"] = result.trial_evaluations;
  j["reference_evaluations"] = result.reference_evaluations;
  j["acceptance_rate"] = result.acceptance_rate;
  j["quantile_method"] = "linear interpolation of order statistics at (count - 1) * p";
  nlohmann::json rows = nlohmann::json::array();
  for (const SummaryRow& s : result.summary) {
    nlohmann::json row;
    row["metric"] = std::string(to_string(s.metric));
    row["component"] = s.component;
    row["n"] = s.n ? nlohmann::json(*s.n) : nlohmann::json(nullptr);
    row["count"] = s.count;
    row["missing"] = s.missing;
    for (auto [name, v] : {std::pair{"mean", s.mean}, std::pair{"median", s.median},
                           std::pair{"q025", s.q025}, std::pair{"q975", s.q975}}) {
      row[name] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    }
    rows.push_back(std::move(row));
  }
  j["summary"] = std::move(rows);
  return j;
}

}  // namespace

ExperimentResult compute_experiment(const ExperimentConfig& cfg) { return execute(cfg, {}); }

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    throw std::runtime_error("cannot create output directory '" + cfg.output_dir.string() + "'");
  }
  const fs::path chain_dir = cfg.output_dir / "chains";
  if (cfg.write_chains) {
    fs::create_directories(chain_dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + chain_dir.string() + "'");
  }
  ChainSink sink;
  if (cfg.write_chains) {
    sink = [&](int r, const ChainRecord& chain) {
      write_chain_file(chain_dir / ("r" + std::to_string(r) + ".bin"), cfg, r, chain);
    };
  }
  ExperimentResult result = execute(cfg, sink);
  write_file_atomically(cfg.output_dir / "config.toml", cfg.to_text());
  write_file_atomically(cfg.output_dir / "metrics.csv", metrics_csv(result.metrics));
  write_file_atomically(cfg.output_dir / "summary.json", summary_json(cfg, result).dump(2) + "\n");
  return result;
}

void write_file_atomically(const std::filesystem::path& path, std::string_view text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move '" + tmp.string() + "' into place");
}

// ---------------------------------------------------------------------------
// Chain files

namespace {

constexpr char kChainMagic[8] = {'P', 'M', 'T', 'M', 'C', 'H', 'N', '1'};

template <class T>
void write_raw(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
void read_raw(std::istream& in, std::vector<T>& v, std::size_t count) {
  v.resize(count);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T)));
}

}  // namespace

void write_chain_file(const std::filesystem::path& path, const ExperimentConfig& cfg,
                      int repetition, const ChainRecord& chain) {
  nlohmann::json header;
  header["config"] = cfg.to_text(false);
  header["repetition"] = repetition;
  header["dim"] = chain.dim;
  header["iterations"] = chain.iterations;
  header["seed"] = chain.seed;
  header["config_hash"] = hex64(chain.config_hash);
  nlohmann::json events = nlohmann::json::array();
  for (const AdaptationEvent& e : chain.events) {
    events.push_back({e.iteration, e.component, e.old_value, e.new_value});
  }
  header["events"] = std::move(events);
  const std::string text = header.dump();

  std::ostringstream out(std::ios::binary);
  out.write(kChainMagic, sizeof kChainMagic);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_raw(out, chain.states);
  write_raw(out, chain.selected);
  write_raw(out, chain.accepted);
  write_file_atomically(path, out.str());
}

StoredChain read_chain_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open chain file '" + path.string() + "'");
  char magic[sizeof kChainMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kChainMagic, sizeof magic) != 0) {
    throw ConfigError("'" + path.string() + "' is not a chain file");
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1ULL << 30)) throw ConfigError("corrupt chain header in '" + path.string() + "'");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  const nlohmann::json header = nlohmann::json::parse(text);

  StoredChain stored;
  stored.config = parse_config(header.at("config").get<std::string>());
  stored.repetition = header.at("repetition").get<int>();
  ChainRecord& c = stored.chain;
  c.dim = header.at("dim").get<int>();
  c.iterations = header.at("iterations").get<long long>();
  c.seed = header.at("seed").get<std::uint64_t>();
  c.config_hash = std::stoull(header.at("config_hash").get<std::string>(), nullptr, 16);
  for (const auto& e : header.at("events")) {
    c.events.push_back({e[0].get<long long>(), e[1].get<int>(), e[2].get<double>(),
                        e[3].get<double>()});
  }
  const auto cells = static_cast<std::size_t>(c.iterations) * static_cast<std::size_t>(c.dim);
  read_raw(in, c.states, cells + static_cast<std::size_t>(c.dim));
  read_raw(in, c.selected, cells);
  read_raw(in, c.accepted, cells);
  if (!in) throw ConfigError("truncated chain file '" + path.string() + "'");
  return stored;
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::string> study_names() {
  return {"coverage-varpi1", "coverage-varpi2", "hitting-varpi2", "bench-pi1",
          "bench-pi2",       "bench-pi3",       "bench-pi4"};
}

std::vector<std::pair<std::string, ExperimentConfig>> study_presets(std::string_view study,
                                                                    double scale) {
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  auto scaled = [scale](long long n) {
    return std::max<long long>(1, std::llround(static_cast<double>(n) * scale));
  };

  // Initial-behaviour studies: no burn-in, adapt every L iterations.
  auto early = [&](const std::string& target, long long n, int reps, StartPolicy start,
                   std::vector<MetricKind> metrics) {
    for (SamplerKind s : {SamplerKind::ap, SamplerKind::ag2}) {
      ExperimentConfig c;
      c.target = target;
      c.sampler = s;
      c.iterations = scaled(n);
      c.repetitions = reps;
      c.burn_in_fraction = 0.0;
      c.start = start;
      c.schedule = Schedule::always;
      c.metrics = metrics;
      out.emplace_back(std::string(to_string(s)), c);
    }
  };
  // Long-run benchmarks: half burn-in, adapt only during burn-in, and a
  // random-walk baseline with the same number of target evaluations.
  auto bench = [&](const std::string& target, long long n) {
    for (SamplerKind s : {SamplerKind::ap, SamplerKind::ag1, SamplerKind::ag2, SamplerKind::mh}) {
      ExperimentConfig c;
      c.target = target;
      c.sampler = s;
      c.iterations = scaled(n);
      c.repetitions = 20;
      c.burn_in_fraction = 0.5;
      c.start = StartPolicy::uniform_box;
      c.schedule = Schedule::burn_in_only;
      c.match_evaluations = (s == SamplerKind::mh);
      c.metrics = {MetricKind::act, MetricKind::asjd};
      out.emplace_back(std::string(to_string(s)), c);
    }
  };

  if (study == "coverage-varpi1") {
    early("varpi1", 10000, 50, StartPolicy::fixed,
          {MetricKind::coverage_component, MetricKind::coverage_joint});
  } else if (study == "coverage-varpi2") {
    early("varpi2", 10000, 50, StartPolicy::fixed,
          {MetricKind::coverage_component, MetricKind::coverage_joint});
  } else if (study == "hitting-varpi2") {
    early("varpi2", 1000, 100, StartPolicy::far_start, {MetricKind::hitting_time});
  } else if (study == "bench-pi1") {
    bench("pi1", 4000);
  } else if (study == "bench-pi2") {
    bench("pi2", 10000);
  } else if (study == "bench-pi3") {
    bench("pi3", 3000);
  } else if (study == "bench-pi4") {
    bench("pi4", 3000);
  } else {
    throw ConfigError("unknown study '" + std::string(study) + "'");
  }
  return out;
}

}  // namespace pmtm
