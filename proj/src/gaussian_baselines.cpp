#include "pmtm/gaussian_baselines.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "pmtm/errors.hpp"

namespace pmtm {

void GaussianTrialParams::validate() const {
  require(sds.size() >= 1, "need at least one Gaussian trial");
  for (std::size_t j = 0; j < sds.size(); ++j) {
    require(sds[j] > 0.0, "Gaussian trial sds must be positive");
    if (j > 0) require(sds[j] > sds[j - 1], "Gaussian trial sds must be strictly increasing");
  }
}

GaussianTrialParams default_gaussian_sds(int trials) {
  require(trials >= 1, "need at least one trial");
  GaussianTrialParams p;
  for (int j = 1; j <= trials; ++j) p.sds.push_back(std::exp2(j - 2));
  return p;
}

double gaussian_trial_log_density(int j, double x, double y, const GaussianTrialParams& p) {
  require(j >= 1 && j <= static_cast<int>(p.sds.size()), "trial index out of range");
  const double s = p.sds[j - 1];
  const double u = (y - x) / s;
  return -0.5 * u * u - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double gaussian_trial_density(int j, double x, double y, const GaussianTrialParams& p) {
  return std::exp(gaussian_trial_log_density(j, x, y, p));
}

GaussianAdaptResult adapt_gaussian_sds(const GaussianTrialParams& p,
                                       const std::vector<long long>& counts, long long interval,
                                       double eta_over, double eta_under) {
  const std::size_t m = p.sds.size();
  require(counts.size() == m, "one selection count per trial expected");
  require(interval >= 1, "interval length must be positive");
  require(0.0 < eta_under && eta_under < eta_over && eta_over < 1.0,
          "need 0 < eta_under < eta_over < 1");
  require(m >= 2, "adaptation needs at least two trials");

  const double over = static_cast<double>(interval) * eta_over;
  const double under = static_cast<double>(interval) * eta_under;

  double smallest = p.sds.front();
  double largest = p.sds.back();
  const double count_small = static_cast<double>(counts.front());
  const double count_large = static_cast<double>(counts.back());

  if (count_large < under) largest *= 0.5;
  else if (count_large > over) largest *= 2.0;
  if (count_small < under) smallest *= 2.0;
  else if (count_small > over) smallest *= 0.5;

  if (smallest == p.sds.front() && largest == p.sds.back()) return {p, false};
  if (smallest >= largest) return {p, true};

  GaussianTrialParams out;
  out.sds.resize(m);
  const double lo = std::log2(smallest);
  const double step = (std::log2(largest) - lo) / static_cast<double>(m - 1);
  out.sds.front() = smallest;
  out.sds.back() = largest;
  for (std::size_t j = 1; j + 1 < m; ++j) out.sds[j] = std::exp2(lo + step * static_cast<double>(j));
  return {out, false};
}

int MhProposalSpec::dim() const {
  return covariances.empty() ? 0 : static_cast<int>(covariances.front().rows());
}

void MhProposalSpec::validate() const {
  require(scale > 0.0, "proposal scale must be positive");
  require(!weights.empty() && weights.size() == covariances.size(),
          "one weight per mixture covariance expected");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(std::abs(total - 1.0) < 1e-12, "mixture weights must sum to one");
  for (const Matrix& c : covariances) {
    require(c.rows() == dim() && c.cols() == dim(), "mixture covariances must share a shape");
    require(c.llt().info() == Eigen::Success, "proposal covariance must be positive definite");
  }
}

MhProposalSpec mh_proposal_for(BenchmarkTarget target) {
  MhProposalSpec spec;
  switch (target) {
    case BenchmarkTarget::pi1: {
      Vector v1(4), v2(4);
      v1 << 6.25, 6.25, 6.25, 0.01;
      v2 << 6.25, 6.25, 0.25, 0.01;
      spec.scale = 2.4 / std::sqrt(4.0);
      spec.weights = {0.5, 0.5};
      spec.covariances = {Matrix(v1.asDiagonal()), Matrix(v2.asDiagonal())};
      return spec;
    }
    case BenchmarkTarget::pi2: {
      spec.scale = 2.4 / std::sqrt(8.0);
      spec.weights = {1.0};
      spec.covariances = {Matrix(pi2_banana_params().base_variances.asDiagonal())};
      return spec;
    }
    case BenchmarkTarget::pi3: {
      Matrix a(2, 2);
      a << 1.0, 1.0, 1.0, 1.5;
      spec.scale = 2.4 / std::sqrt(2.0);
      spec.weights = {1.0};
      spec.covariances = {a.inverse()};
      return spec;
    }
    case BenchmarkTarget::pi4: {
      spec.scale = 2.4;
      spec.weights = {1.0};
      spec.covariances = {Matrix::Identity(1, 1)};
      return spec;
    }
    case BenchmarkTarget::varpi1:
    case BenchmarkTarget::varpi2: {
      const TargetDistribution t = make_benchmark_target(target);
      spec.scale = 2.4 / std::sqrt(static_cast<double>(t.dim()));
      spec.weights = {1.0};
      spec.covariances = {*t.covariance()};
      return spec;
    }
  }
  throw ConfigError("no random-walk proposal for this target");
}

MhProposal::MhProposal(const MhProposalSpec& spec) : dim_(spec.dim()), scale_(spec.scale) {
  spec.validate();
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.weights.size(); ++i) {
    acc += spec.weights[i];
    cumulative_.push_back(acc);
    factors_.push_back(spec.covariances[i].llt().matrixL());
  }
  cumulative_.back() = 1.0;
}

Vector MhProposal::draw_increment(Rng& rng) const {
  std::size_t which = 0;
  if (factors_.size() > 1) {
    const double u = uniform01(rng);
    while (which + 1 < cumulative_.size() && u >= cumulative_[which]) ++which;
  }
  Vector z(dim_);
  for (int i = 0; i < dim_; ++i) z[i] = standard_normal(rng);
  Vector step = factors_[which].triangularView<Eigen::Lower>() * z;
  return scale_ * step;
}

MhStepResult mh_step(Rng& rng, const Vector& x, double log_target_x, const MhProposal& proposal,
                     const TargetDistribution& target) {
  require(proposal.dim() == target.dim() && x.size() == target.dim(),
          "proposal does not match target dimension");
  Vector y = x + proposal.draw_increment(rng);
  const double log_target_y = target.log_density_unchecked(y);
  const double log_ratio = log_target_y - log_target_x;
  if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
    return {std::move(y), log_target_y, true};
  }
  return {x, log_target_x, false};
}

MhStepResult mh_step(Rng& rng, const Vector& x, const MhProposalSpec& spec,
                     const TargetDistribution& target) {
  return mh_step(rng, x, target.log_density(x), MhProposal(spec), target);
}

}  // namespace pmtm
