#include "pmtm/diagnostics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "pmtm/errors.hpp"

namespace pmtm {

std::string_view to_string(MetricKind m) {
  switch (m) {
    case MetricKind::act: return "act";
    case MetricKind::asjd: return "asjd";
    case MetricKind::coverage_component: return "coverage_component";
    case MetricKind::coverage_joint: return "coverage_joint";
    case MetricKind::hitting_time: return "hitting_time";
  }
  return "?";
}

MetricKind parse_metric(std::string_view name) {
  for (MetricKind m : {MetricKind::act, MetricKind::asjd, MetricKind::coverage_component,
                       MetricKind::coverage_joint, MetricKind::hitting_time}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

double chisq_quantile(double level, int df) {
  require(level > 0.0 && level < 1.0, "chi-square level must lie in (0, 1)");
  require(df >= 1, "degrees of freedom must be positive");
  return 2.0 * boost::math::gamma_p_inv(0.5 * df, level);
}

namespace {

// gamma_lag = (1/n) sum_{t} (x_t - mean)(x_{t+lag} - mean)
double autocovariance(std::span<const double> centred, std::size_t lag) {
  const std::size_t n = centred.size();
  if (lag >= n) return 0.0;
  double s = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) s += centred[t] * centred[t + lag];
  return s / static_cast<double>(n);
}

}  // namespace

double act_initial_sequence(std::span<const double> series, std::optional<double> variance) {
  require(series.size() >= 10, "autocorrelation time needs at least 10 samples");
  if (variance) require(*variance > 0.0, "supplied variance must be positive");
  const std::size_t n = series.size();
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = series[i] - mean;

  const double gamma0 = autocovariance(centred, 0);
  if (!(gamma0 > 0.0)) throw ContractViolation("degenerate series");

  double pair_sum = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m < n; ++m) {
    const double gamma_even = (m == 0) ? gamma0 : autocovariance(centred, 2 * m);
    double pair = gamma_even + autocovariance(centred, 2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, previous);
    pair_sum += pair;
    previous = pair;
  }
  const double long_run = -gamma0 + 2.0 * pair_sum;
  return long_run / variance.value_or(gamma0);
}

double asjd(std::span<const double> series) {
  require(series.size() >= 2, "jump distance needs at least two states");
  double s = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double d = series[i] - series[i - 1];
    s += d * d;
  }
  return s / static_cast<double>(series.size() - 1);
}

std::vector<double> running_coverage_component(std::span<const double> series, double variance,
                                               double threshold) {
  require(variance > 0.0, "component variance must be positive");
  require(!series.empty(), "coverage needs at least the starting state");
  std::vector<double> out;
  out.reserve(series.size() - 1);
  long long exceed = (series[0] * series[0] / variance > threshold) ? 1 : 0;
  for (std::size_t n = 1; n < series.size(); ++n) {
    if (series[n] * series[n] / variance > threshold) ++exceed;
    out.push_back(static_cast<double>(exceed) / static_cast<double>(n));
  }
  return out;
}

MahalanobisForm::MahalanobisForm(const Matrix& covariance) {
  require(covariance.rows() == covariance.cols(), "covariance must be square");
  const Eigen::LLT<Matrix> llt(covariance);
  require(llt.info() == Eigen::Success && covariance.isApprox(covariance.transpose()),
          "covariance must be symmetric positive definite");
  lower_ = llt.matrixL();
}

double MahalanobisForm::operator()(const Vector& x) const {
  return lower_.triangularView<Eigen::Lower>().solve(x).squaredNorm();
}

std::vector<double> running_coverage_joint(const ChainRecord& chain, const Matrix& covariance,
                                           double threshold) {
  const MahalanobisForm form(covariance);
  require(form.dim() == chain.dim, "covariance does not match chain dimension");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(chain.iterations));
  long long exceed = form(chain.state_vector(0)) > threshold ? 1 : 0;
  for (long long n = 1; n <= chain.iterations; ++n) {
    if (form(chain.state_vector(n)) > threshold) ++exceed;
    out.push_back(static_cast<double>(exceed) / static_cast<double>(n));
  }
  return out;
}

std::optional<long long> first_hitting_time(const ChainRecord& chain, const Matrix& covariance,
                                            double threshold) {
  const MahalanobisForm form(covariance);
  require(form.dim() == chain.dim, "covariance does not match chain dimension");
  for (long long n = 0; n <= chain.iterations; ++n) {
    if (form(chain.state_vector(n)) < threshold) return n;
  }
  return std::nullopt;
}

}  // namespace pmtm
