#include "pmtm/mtm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "pmtm/errors.hpp"

namespace pmtm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double log_lambda(const WeightFunction& w, const ProposalFamily& family, int j, int k, double x,
                  double y) {
  switch (w.kind) {
    case WeightKind::unit:
      return 0.0;
    case WeightKind::norm_power: {
      const double dist = std::abs(y - x);
      if (dist == 0.0) return kNegInf;
      return family.log_density(j, k, x, y) + w.exponent * std::log(dist);
    }
    case WeightKind::mean_inverse: {
      const double fwd = family.log_density(j, k, x, y);
      const double bwd = family.log_density(j, k, y, x);
      const double m = std::max(fwd, bwd);
      if (m == kNegInf) return kNegInf;
      return -(m + std::log(0.5 * (std::exp(fwd - m) + std::exp(bwd - m))));
    }
    case WeightKind::product_power: {
      const double sum = family.log_density(j, k, x, y) + family.log_density(j, k, y, x);
      if (sum == kNegInf) return kNegInf;
      return -w.exponent * sum;
    }
  }
  return kNegInf;
}

double trial_log_weight(double z, const Vector& x, int k, int j, const ProposalFamily& family,
                        const TargetDistribution& target, const WeightFunction& w,
                        Vector& scratch) {
  require(k >= 0 && k < target.dim(), "component index out of range");
  require(j >= 1 && j <= family.trials(), "trial index out of range");
  scratch = x;
  scratch[k] = z;
  const double log_target = target.log_density_unchecked(scratch);
  const double log_lam = log_lambda(w, family, j, k, x[k], z);
  if (log_target == kNegInf || log_lam == kNegInf) return kNegInf;
  return log_target + family.log_density(j, k, x[k], z) + log_lam;
}

double trial_log_weight(double z, const Vector& x, int k, int j, const ProposalFamily& family,
                        const TargetDistribution& target, const WeightFunction& w) {
  Vector scratch(x.size());
  return trial_log_weight(z, x, k, j, family, target, w, scratch);
}

std::vector<double> relative_weights(std::span<const double> log_weights) {
  double m = kNegInf;
  for (double lw : log_weights) m = std::max(m, lw);
  std::vector<double> out(log_weights.size(), 0.0);
  if (m == kNegInf) return out;
  for (std::size_t i = 0; i < log_weights.size(); ++i) out[i] = std::exp(log_weights[i] - m);
  return out;
}

std::optional<int> select_trial(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, "weights must be finite and non-negative");
    total += w;
  }
  if (total == 0.0) return std::nullopt;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i) + 1;
    if (u < acc) return last_positive;
  }
  // u landed on the rounding slack at the top of the cumulative sum
  return last_positive;
}

double log_acceptance_ratio(std::span<const double> numerator_log_weights,
                            std::span<const double> denominator_log_weights) {
  const double num = log_sum_exp(numerator_log_weights);
  const double den = log_sum_exp(denominator_log_weights);
  if (num == kNegInf) return kNegInf;
  if (den == kNegInf) return std::numeric_limits<double>::infinity();
  return num - den;
}

int reference_slot(int selected, int trials, ReferenceConvention convention) {
  require(selected >= 1 && selected <= trials, "selected trial out of range");
  return convention == ReferenceConvention::selected_slot ? selected : trials;
}

MtmState::MtmState(const Vector& x0, const TargetDistribution& target, int trials)
    : x(x0),
      log_target(target.log_density(x0)),
      selected_counts(decltype(selected_counts)::Zero(trials, target.dim())),
      acceptance_counts(static_cast<std::size_t>(target.dim()), 0),
      scratch(x0.size()) {
  require(x0.allFinite(), "starting point must be finite");
}

ComponentUpdate mtm_component_update(Rng& rng, MtmState& state, int k,
                                     const ProposalFamily& family,
                                     const TargetDistribution& target,
                                     const KernelOptions& options) {
  require(k >= 0 && k < target.dim(), "component index out of range");
  const int m = family.trials();
  const double xk = state.x[k];

  std::vector<double> trials(static_cast<std::size_t>(m));
  std::vector<double> trial_log_target(static_cast<std::size_t>(m));
  std::vector<double> numerator(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) {
    const double z = family.sample(rng, j, k, xk);
    state.scratch = state.x;
    state.scratch[k] = z;
    const double lt = target.log_density_unchecked(state.scratch);
    const double lam = log_lambda(options.weight, family, j, k, xk, z);
    trials[j - 1] = z;
    trial_log_target[j - 1] = lt;
    numerator[j - 1] =
        (lt == kNegInf || lam == kNegInf) ? kNegInf : lt + family.log_density(j, k, xk, z) + lam;
  }
  state.trial_evaluations += m;

  ComponentUpdate result;
  const std::vector<double> weights = relative_weights(numerator);
  result.selected = select_trial(rng, weights);
  if (!result.selected) {
    result.log_ratio = kNegInf;
    return result;
  }
  const int chosen = *result.selected;
  const double y = trials[chosen - 1];
  result.proposal = y;
  if (!options.count_on_accept) ++state.selected_counts(chosen - 1, k);

  if (options.containment &&
      (y < options.containment->lower[k] || y > options.containment->upper[k])) {
    result.log_ratio = kNegInf;
    return result;
  }

  // Reference set around y; state.scratch holds (.; x_[-k]) throughout.
  const int pinned = reference_slot(chosen, m, options.reference);
  std::vector<double> denominator(static_cast<std::size_t>(m));
  state.scratch = state.x;
  for (int j = 1; j <= m; ++j) {
    double ref;
    double lt;
    if (j == pinned) {
      ref = xk;
      lt = state.log_target;
    } else {
      ref = family.sample(rng, j, k, y);
      state.scratch[k] = ref;
      lt = target.log_density_unchecked(state.scratch);
    }
    const double lam = log_lambda(options.weight, family, j, k, y, ref);
    denominator[j - 1] =
        (lt == kNegInf || lam == kNegInf) ? kNegInf : lt + family.log_density(j, k, y, ref) + lam;
  }
  state.reference_evaluations += m - 1;

  result.log_ratio = log_acceptance_ratio(numerator, denominator);
  const double u = uniform01(rng);
  if (result.log_ratio >= 0.0 || std::log(u) < result.log_ratio) {
    result.accepted = true;
    state.x[k] = y;
    state.log_target = trial_log_target[chosen - 1];
    ++state.acceptance_counts[k];
    if (options.count_on_accept) ++state.selected_counts(chosen - 1, k);
  }
  return result;
}

SamplerConfig SamplerConfig::defaults(SamplerKind kind, int trials) {
  SamplerConfig cfg;
  cfg.kind = kind;
  cfg.trials = trials;
  cfg.plateau.trials = trials;
  cfg.gaussian_init = default_gaussian_sds(trials);
  cfg.weight = {WeightKind::norm_power, kind == SamplerKind::ag2 ? 2.9 : 2.5};
  return cfg;
}

void SamplerConfig::validate(int dim) const {
  adaptation.validate();
  if (adaptation.containment) {
    require(adaptation.containment->lower.size() == dim, "containment box dimension mismatch");
  }
  switch (kind) {
    case SamplerKind::mh:
      require(mh_proposal.has_value(), "random-walk sampler needs a proposal");
      mh_proposal->validate();
      require(mh_proposal->dim() == dim, "random-walk proposal dimension mismatch");
      return;
    case SamplerKind::ap:
      require(plateau.trials == trials, "plateau trial count mismatch");
      plateau.validate();
      break;
    case SamplerKind::ag1:
    case SamplerKind::ag2:
      require(static_cast<int>(gaussian_init.sds.size()) == trials, "Gaussian trial count mismatch");
      gaussian_init.validate();
      require(0.0 < eta_under && eta_under < eta_over && eta_over < 1.0,
              "need 0 < eta_under < eta_over < 1");
      break;
  }
  require(trials >= 1 && trials <= 127, "trial count must lie in 1..127");
  if (weight.kind == WeightKind::product_power || weight.kind == WeightKind::norm_power) {
    require(std::isfinite(weight.exponent), "weight exponent must be finite");
  }
}

Vector ChainRecord::state_vector(long long n) const {
  return Eigen::Map<const Vector>(states.data() + n * dim, dim);
}

std::vector<double> ChainRecord::component_series(int k, long long from) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(iterations + 1 - from));
  for (long long n = from; n <= iterations; ++n) out.push_back(state(n, k));
  return out;
}

double ChainRecord::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  long long total = 0;
  for (auto a : accepted) total += a;
  return static_cast<double>(total) / static_cast<double>(accepted.size());
}

namespace {

void record_state(ChainRecord& rec, const Vector& x) {
  rec.states.insert(rec.states.end(), x.data(), x.data() + x.size());
}

ChainRecord run_random_walk(Rng& rng, const SamplerConfig& cfg, const TargetDistribution& target,
                            long long n_iterations, const Vector& x0, ChainRecord rec) {
  const MhProposal proposal(*cfg.mh_proposal);
  const ContainmentBox* box = cfg.adaptation.containment ? &*cfg.adaptation.containment : nullptr;
  Vector x = x0;
  double log_target = target.log_density(x0);
  for (long long n = 1; n <= n_iterations; ++n) {
    MhStepResult step = mh_step(rng, x, log_target, proposal, target);
    ++rec.trial_evaluations;
    if (step.accepted && box && !containment_filter(step.x, *box)) step = {x, log_target, false};
    x = std::move(step.x);
    log_target = step.log_target;
    record_state(rec, x);
    rec.selected.insert(rec.selected.end(), static_cast<std::size_t>(rec.dim), 0);
    rec.accepted.insert(rec.accepted.end(), static_cast<std::size_t>(rec.dim),
                        step.accepted ? 1 : 0);
  }
  return rec;
}

}  // namespace

ChainRecord run_chain(Rng& rng, const SamplerConfig& cfg, const TargetDistribution& target,
                      long long n_iterations, const Vector& x0) {
  const int d = target.dim();
  require(n_iterations >= 0, "iteration count must be non-negative");
  require(x0.size() == d && x0.allFinite(), "starting point must be finite and match the target");
  cfg.validate(d);
  const ContainmentBox* box = cfg.adaptation.containment ? &*cfg.adaptation.containment : nullptr;
  require(!box || containment_filter(x0, *box), "starting point lies outside the containment set");

  ChainRecord rec;
  rec.dim = d;
  rec.iterations = n_iterations;
  const auto cells = static_cast<std::size_t>(n_iterations) * static_cast<std::size_t>(d);
  rec.states.reserve(cells + static_cast<std::size_t>(d));
  rec.selected.reserve(cells);
  rec.accepted.reserve(cells);
  record_state(rec, x0);

  if (cfg.kind == SamplerKind::mh) {
    return run_random_walk(rng, cfg, target, n_iterations, x0, std::move(rec));
  }

  std::unique_ptr<ProposalFamily> family;
  PlateauFamily* plateau = nullptr;
  GaussianFamily* gaussian = nullptr;
  if (cfg.kind == SamplerKind::ap) {
    auto p = std::make_unique<PlateauFamily>(cfg.plateau, d);
    plateau = p.get();
    family = std::move(p);
  } else {
    auto g = std::make_unique<GaussianFamily>(cfg.gaussian_init, d);
    gaussian = g.get();
    family = std::move(g);
  }
  const int m = family->trials();

  KernelOptions options;
  options.weight = cfg.weight;
  options.reference = cfg.reference;
  options.count_on_accept = cfg.count_on_accept;
  options.containment = box;

  MtmState state(x0, target, m);
  AdaptationState widths = AdaptationState::initial(d, cfg.plateau.upsilon);

  for (long long n = 1; n <= n_iterations; ++n) {
    state.iteration = n;
    const std::vector<bool> gates = draw_adaptation_gates(rng, cfg.adaptation, n, d);
    if (!gates.empty()) {
      if (plateau) {
        for (int k = 0; k < d; ++k) {
          widths.inner_count[k] = state.selected_counts(0, k);
          widths.outer_count[k] = state.selected_counts(m - 1, k);
        }
        widths = apply_width_adaptation(std::move(widths), cfg.adaptation, gates, n, &rec.events);
        for (int k = 0; k < d; ++k) plateau->set_width(k, widths.upsilon[k]);
      } else {
        for (int k = 0; k < d; ++k) {
          if (!gates[k]) continue;
          std::vector<long long> counts(static_cast<std::size_t>(m));
          for (int j = 0; j < m; ++j) counts[j] = state.selected_counts(j, k);
          const GaussianTrialParams& before = gaussian->params(k);
          GaussianAdaptResult adapted = adapt_gaussian_sds(before, counts, cfg.adaptation.interval,
                                                           cfg.eta_over, cfg.eta_under);
          if (adapted.params.sds != before.sds) {
            rec.events.push_back({n, k, before.sds.back(), adapted.params.sds.back()});
            gaussian->set_params(k, std::move(adapted.params));
          }
        }
      }
      for (int k = 0; k < d; ++k) {
        if (gates[k]) state.selected_counts.col(k).setZero();
      }
      if (std::any_of(gates.begin(), gates.end(), [](bool g) { return g; })) {
        ++rec.adaptation_checks;
      }
    }

    for (int k = 0; k < d; ++k) {
      const ComponentUpdate u = mtm_component_update(rng, state, k, *family, target, options);
      rec.selected.push_back(static_cast<std::int8_t>(u.selected.value_or(0)));
      rec.accepted.push_back(u.accepted ? 1 : 0);
    }
    record_state(rec, state.x);
  }

  rec.trial_evaluations = state.trial_evaluations;
  rec.reference_evaluations = state.reference_evaluations;
  for (int k = 0; k < d; ++k) {
    rec.final_widths.push_back(plateau ? plateau->width(k) : gaussian->params(k).sds.back());
  }
  return rec;
}

}  // namespace pmtm
