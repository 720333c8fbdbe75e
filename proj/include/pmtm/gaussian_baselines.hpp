#pragma once

#include <vector>

#include "pmtm/rng.hpp"
#include "pmtm/targets.hpp"

namespace pmtm {

// Standard deviations of the M Gaussian trials, strictly increasing.
struct GaussianTrialParams {
  std::vector<double> sds;

  void validate() const;
};

// s_j = 2^{j-2}, j = 1..M
GaussianTrialParams default_gaussian_sds(int trials);

double gaussian_trial_log_density(int j, double x, double y, const GaussianTrialParams& p);
double gaussian_trial_density(int j, double x, double y, const GaussianTrialParams& p);

struct GaussianAdaptResult {
  GaussianTrialParams params;
  // The extreme-sd updates would have crossed (s_1 >= s_M); params unchanged.
  bool clamped = false;
};

// Rescales the extreme standard deviations from the selection counts of the
// last interval and re-spaces the interior ones evenly on a log2 scale.
// Largest sd: halved when under-selected (count < L eta_under), doubled when
// over-selected (count > L eta_over). Smallest sd: the reverse.
GaussianAdaptResult adapt_gaussian_sds(const GaussianTrialParams& p,
                                       const std::vector<long long>& counts, long long interval,
                                       double eta_over, double eta_under);

// Random-walk proposal y = x + scale * xi where xi is drawn from a zero-mean
// Gaussian mixture.
struct MhProposalSpec {
  double scale = 1.0;
  std::vector<double> weights;
  std::vector<Matrix> covariances;

  int dim() const;
  void validate() const;
};

// Per-target random-walk proposals of the benchmark study; the Gaussian
// coverage targets use 2.4/sqrt(d) N(0, Sigma).
MhProposalSpec mh_proposal_for(BenchmarkTarget target);

// Factorized form of an MhProposalSpec for repeated sampling.
class MhProposal {
 public:
  explicit MhProposal(const MhProposalSpec& spec);

  Vector draw_increment(Rng& rng) const;
  int dim() const { return dim_; }

 private:
  int dim_;
  double scale_;
  std::vector<double> cumulative_;
  std::vector<Matrix> factors_;
};

struct MhStepResult {
  Vector x;
  double log_target;
  bool accepted;
};

// One Metropolis step with a symmetric proposal. log_target_x is ln pi(x),
// passed in so a chain evaluates the target once per step.
MhStepResult mh_step(Rng& rng, const Vector& x, double log_target_x, const MhProposal& proposal,
                     const TargetDistribution& target);

// Single step straight from a spec; evaluates ln pi(x) itself.
MhStepResult mh_step(Rng& rng, const Vector& x, const MhProposalSpec& spec,
                     const TargetDistribution& target);

}  // namespace pmtm
