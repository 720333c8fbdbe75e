#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pmtm/adaptation.hpp"
#include "pmtm/gaussian_baselines.hpp"
#include "pmtm/plateau.hpp"
#include "pmtm/proposal_family.hpp"
#include "pmtm/rng.hpp"
#include "pmtm/targets.hpp"

namespace pmtm {

enum class WeightKind {
  norm_power,     // T(x, y) |y - x|^alpha
  mean_inverse,   // ((T(x, y) + T(y, x)) / 2)^{-1}
  product_power,  // (T(x, y) T(y, x))^{-beta}
  unit,           // 1
};

struct WeightFunction {
  WeightKind kind = WeightKind::norm_power;
  double exponent = 2.5;  // alpha for norm_power, beta for product_power
};

// ln lambda_j(x, y) for component k. -inf where lambda vanishes.
double log_lambda(const WeightFunction& w, const ProposalFamily& family, int j, int k, double x,
                  double y);

// ln w_{j,k}(z, x) = ln pi((z; x_[-k])) + ln T_{j,k}(x_k, z) + ln lambda_{j,k}(x_k, z).
// `scratch` must have the target's dimension; its contents are overwritten.
double trial_log_weight(double z, const Vector& x, int k, int j, const ProposalFamily& family,
                        const TargetDistribution& target, const WeightFunction& w,
                        Vector& scratch);

// Convenience form of trial_log_weight that owns its scratch space.
double trial_log_weight(double z, const Vector& x, int k, int j, const ProposalFamily& family,
                        const TargetDistribution& target, const WeightFunction& w);

// exp(log_weights - max), so the largest entry is 1. All zeros when every
// entry is -inf.
std::vector<double> relative_weights(std::span<const double> log_weights);

// Categorical draw proportional to weights. Returns the 1-based index, or
// nullopt when every weight is zero.
std::optional<int> select_trial(Rng& rng, std::span<const double> weights);

// ln(sum exp(numerator) / sum exp(denominator)). +inf when only the
// denominator vanishes, -inf when the numerator vanishes.
double log_acceptance_ratio(std::span<const double> numerator_log_weights,
                            std::span<const double> denominator_log_weights);

// Which reference point is pinned to the current value x_k.
enum class ReferenceConvention {
  selected_slot,  // x*_J = x_k for the selected trial J
  last_slot,      // x*_M = x_k regardless of J
};

int reference_slot(int selected, int trials, ReferenceConvention convention);

struct KernelOptions {
  WeightFunction weight;
  ReferenceConvention reference = ReferenceConvention::selected_slot;
  bool count_on_accept = false;
  const ContainmentBox* containment = nullptr;
};

struct MtmState {
  Vector x;
  double log_target = 0.0;
  long long iteration = 0;
  // c_{j,k}: selections of trial j for component k since the last reset;
  // row j - 1, column k.
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> selected_counts;
  std::vector<long long> acceptance_counts;
  long long trial_evaluations = 0;
  long long reference_evaluations = 0;
  Vector scratch;

  MtmState(const Vector& x0, const TargetDistribution& target, int trials);
};

struct ComponentUpdate {
  std::optional<int> selected;  // 1-based trial index
  bool accepted = false;
  double proposal = 0.0;        // selected trial value (meaningful if selected)
  double log_ratio = 0.0;       // ln of the acceptance ratio before min{1, .}
};

// One multiple-try update of component k (0-based).
ComponentUpdate mtm_component_update(Rng& rng, MtmState& state, int k,
                                     const ProposalFamily& family,
                                     const TargetDistribution& target,
                                     const KernelOptions& options);

enum class SamplerKind { ap, ag1, ag2, mh };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::ap;
  int trials = 5;
  WeightFunction weight;
  PlateauParams plateau;
  GaussianTrialParams gaussian_init;
  AdaptationConfig adaptation;
  // Gaussian-trial selection thresholds (fractions of the interval length).
  double eta_over = 0.4;
  double eta_under = 0.1;
  ReferenceConvention reference = ReferenceConvention::selected_slot;
  bool count_on_accept = false;
  std::optional<MhProposalSpec> mh_proposal;

  // Defaults for each sampler: plateau (1, 0.05, 3) with alpha 2.5 for ap,
  // Gaussian sds 2^{j-2} with alpha 2.5 (ag1) or 2.9 (ag2).
  static SamplerConfig defaults(SamplerKind kind, int trials = 5);
  void validate(int dim) const;
};

struct ChainRecord {
  int dim = 0;
  long long iterations = 0;
  std::vector<double> states;           // (iterations + 1) x dim, row-major
  std::vector<std::int8_t> selected;    // iterations x dim, 0 = no selection
  std::vector<std::uint8_t> accepted;   // iterations x dim
  std::vector<AdaptationEvent> events;
  long long adaptation_checks = 0;      // gate passes
  long long trial_evaluations = 0;
  long long reference_evaluations = 0;
  std::vector<double> final_widths;     // plateau widths or largest trial sd
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  double state(long long n, int k) const { return states[static_cast<std::size_t>(n * dim + k)]; }
  Vector state_vector(long long n) const;
  std::vector<double> component_series(int k, long long from = 0) const;
  double acceptance_rate() const;
};

// N full sweeps (or N random-walk steps for mh) from x0.
ChainRecord run_chain(Rng& rng, const SamplerConfig& cfg, const TargetDistribution& target,
                      long long n_iterations, const Vector& x0);

}  // namespace pmtm
