#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pmtm/mtm.hpp"
#include "pmtm/targets.hpp"

namespace pmtm {

enum class MetricKind { act, asjd, coverage_component, coverage_joint, hitting_time };

std::string_view to_string(MetricKind m);
MetricKind parse_metric(std::string_view name);

// One output row. component is 1-based; 0 marks a joint (all-component)
// metric. n is the iteration the value refers to, when that is meaningful.
// A hitting time that never happened has no value.
struct MetricRecord {
  int repetition = 0;
  MetricKind metric = MetricKind::act;
  int component = 0;
  std::optional<long long> n;
  std::optional<double> value;

  bool operator==(const MetricRecord&) const = default;
};

// Quantile z of the chi-square distribution with df degrees of freedom such
// that P(Z <= z) = level, e.g. chisq_quantile(0.99, 1) = 6.6349.
double chisq_quantile(double level, int df);

// Integrated autocorrelation time by Geyer's initial monotone sequence
// estimator. Autocovariances use the 1/n convention. The sum of adjacent
// pairs gamma_{2m} + gamma_{2m+1} is truncated before the first
// non-positive pair and made non-increasing; the result is
// (-gamma_0 + 2 sum of pairs) / v with v = variance if given, else gamma_0.
double act_initial_sequence(std::span<const double> series,
                            std::optional<double> variance = std::nullopt);

// mean of (x_i - x_{i-1})^2 over the length - 1 jumps
double asjd(std::span<const double> series);

// C_n for n = 1..N from series x_0..x_N: (1/n) * #{j in 0..n : x_j^2/var > z}.
// The n + 1 indicators over n is deliberate.
std::vector<double> running_coverage_component(std::span<const double> series, double variance,
                                               double threshold);

// Cholesky factor of a covariance matrix, for repeated x^T Sigma^{-1} x.
class MahalanobisForm {
 public:
  explicit MahalanobisForm(const Matrix& covariance);
  double operator()(const Vector& x) const;
  int dim() const { return static_cast<int>(lower_.rows()); }

 private:
  Matrix lower_;
};

// D_n for n = 1..N: (1/n) * #{j in 0..n : X_j^T Sigma^{-1} X_j > z}.
std::vector<double> running_coverage_joint(const ChainRecord& chain, const Matrix& covariance,
                                           double threshold);

// Smallest j >= 0 with X_j^T Sigma^{-1} X_j < z, or nullopt.
std::optional<long long> first_hitting_time(const ChainRecord& chain, const Matrix& covariance,
                                            double threshold);

}  // namespace pmtm
