#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pmtm/diagnostics.hpp"
#include "pmtm/errors.hpp"

using namespace pmtm;

namespace {

ChainRecord chain_from(const std::vector<std::vector<double>>& states) {
  ChainRecord c;
  c.dim = static_cast<int>(states.front().size());
  c.iterations = static_cast<long long>(states.size()) - 1;
  for (const auto& s : states) c.states.insert(c.states.end(), s.begin(), s.end());
  return c;
}

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 1);
  std::vector<double> x(n);
  const double innovation_sd = std::sqrt(1 - phi * phi);
  x[0] = standard_normal(rng);
  for (std::size_t i = 1; i < n; ++i) x[i] = phi * x[i - 1] + innovation_sd * standard_normal(rng);
  return x;
}

}  // namespace

TEST(ChiSquare, TableValues) {
  EXPECT_NEAR(chisq_quantile(0.99, 1), 6.6349, 1e-3);
  EXPECT_NEAR(chisq_quantile(0.99, 5), 15.0863, 1e-3);
  EXPECT_NEAR(chisq_quantile(0.95, 2), 5.9915, 1e-3);
  EXPECT_NEAR(chisq_quantile(0.95, 2), -2 * std::log(0.05), 1e-10);
}

TEST(ChiSquare, AgreesWithIntegratedDensity) {
  for (int df : {1, 2, 5, 8}) {
    for (double level : {0.5, 0.95, 0.99}) {
      EXPECT_NEAR(chisq_quantile(level, df), oracle::chisq_quantile_by_integration(level, df), 1e-6)
          << level << " " << df;
    }
  }
}

TEST(ChiSquare, RejectsBadArguments) {
  EXPECT_THROW(chisq_quantile(1.0, 2), ContractViolation);
  EXPECT_THROW(chisq_quantile(0.5, 0), ContractViolation);
}

TEST(Act, IidSeriesIsAboutOne) {
  Rng rng = make_stream(8, 1);
  std::vector<double> x(1000000);
  for (double& v : x) v = standard_normal(rng);
  EXPECT_NEAR(act_initial_sequence(x), 1.0, 0.05);
}

TEST(Act, Ar1MatchesTheAnalyticValue) {
  const std::vector<double> x = ar1(0.5, 1000000, 2);
  EXPECT_NEAR(act_initial_sequence(x, 1.0), 3.0, 0.1);
  EXPECT_NEAR(act_initial_sequence(x), 3.0, 0.1);
}

TEST(Act, StrongCorrelation) {
  const std::vector<double> x = ar1(0.9, 1000000, 3);
  EXPECT_NEAR(act_initial_sequence(x, 1.0), 19.0, 1.0);
}

TEST(Act, AlternatingSeriesIsBelowOne) {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 ? -1.0 : 1.0) + 1e-9 * double(i % 7);
  const double act = act_initial_sequence(x);
  EXPECT_LT(act, 1.0);
  EXPECT_GE(act, -1.0 - 1e-9);
}

TEST(Act, HandComputedShortSeries) {
  // x = (1, 2, 3, 4, 5, 5, 4, 3, 2, 1): mean 3, gamma_k = (1/10) sum c_t c_{t+k}
  const std::vector<double> x = {1, 2, 3, 4, 5, 5, 4, 3, 2, 1};
  const std::vector<double> c = {-2, -1, 0, 1, 2, 2, 1, 0, -1, -2};
  auto gamma = [&](std::size_t k) {
    double s = 0;
    for (std::size_t t = 0; t + k < c.size(); ++t) s += c[t] * c[t + k];
    return s / 10.0;
  };
  double sum = 0, prev = 1e300;
  for (std::size_t m = 0; 2 * m < c.size(); ++m) {
    double pair = gamma(2 * m) + gamma(2 * m + 1);
    if (pair <= 0) break;
    pair = std::min(pair, prev);
    sum += pair;
    prev = pair;
  }
  EXPECT_NEAR(act_initial_sequence(x), (-gamma(0) + 2 * sum) / gamma(0), 1e-12);
}

TEST(Act, DegenerateSeriesThrows) {
  const std::vector<double> flat(100, 2.5);
  EXPECT_THROW(act_initial_sequence(flat), ContractViolation);
  const std::vector<double> short_series(5, 1.0);
  EXPECT_THROW(act_initial_sequence(short_series), ContractViolation);
}

TEST(Asjd, Examples) {
  EXPECT_DOUBLE_EQ(asjd(std::vector<double>(10, 3.0)), 0.0);
  EXPECT_DOUBLE_EQ(asjd(std::vector<double>{0, 1, 0, 1}), 1.0);
  Rng rng = make_stream(8, 4);
  std::vector<double> x(1000000);
  for (double& v : x) v = standard_normal(rng);
  EXPECT_NEAR(asjd(x), 2.0, 0.02);
}

TEST(Coverage, AllAtOriginNeverExceeds) {
  const std::vector<double> zeros(101, 0.0);
  for (double c : running_coverage_component(zeros, 2.0, chisq_quantile(0.99, 1))) {
    EXPECT_EQ(c, 0.0);
  }
}

TEST(Coverage, CountsTheStartingState) {
  std::vector<double> x(101, 0.0);
  x[37] = 100.0;
  const auto c = running_coverage_component(x, 1.0, chisq_quantile(0.99, 1));
  ASSERT_EQ(c.size(), 100u);
  EXPECT_DOUBLE_EQ(c[99], 1.0 / 100);
  EXPECT_DOUBLE_EQ(c[35], 0.0);
  EXPECT_DOUBLE_EQ(c[36], 1.0 / 37);

  std::vector<double> start_out(3, 0.0);
  start_out[0] = 100.0;
  const auto d = running_coverage_component(start_out, 1.0, chisq_quantile(0.99, 1));
  EXPECT_DOUBLE_EQ(d[0], 1.0);
  EXPECT_DOUBLE_EQ(d[1], 0.5);
}

TEST(Coverage, IidExceedanceRate) {
  Rng rng = make_stream(8, 5);
  const double var = 10.0;
  const int n = 100000;
  std::vector<double> x(n + 1);
  for (double& v : x) v = std::sqrt(var) * standard_normal(rng);
  const auto c = running_coverage_component(x, var, chisq_quantile(0.99, 1));
  EXPECT_NEAR(c.back(), 0.01, 3 * std::sqrt(0.01 * 0.99 / n) + 1.0 / n);
}

TEST(JointCoverage, IidExceedanceOnVarpi2) {
  const Matrix cov = *make_benchmark_target("varpi2").covariance();
  const Eigen::LLT<Matrix> llt(cov);
  const Matrix l = llt.matrixL();
  Rng rng = make_stream(8, 6);
  const int n = 100000;
  std::vector<std::vector<double>> states;
  for (int i = 0; i <= n; ++i) {
    Vector z(2);
    z << standard_normal(rng), standard_normal(rng);
    const Vector x = l * z;
    states.push_back({x[0], x[1]});
  }
  const auto d = running_coverage_joint(chain_from(states), cov, chisq_quantile(0.99, 2));
  EXPECT_NEAR(d.back(), 0.01, 3 * std::sqrt(0.01 * 0.99 / n) + 1.0 / n);
}

TEST(JointCoverage, ReducesToComponentCoverageInOneDimension) {
  Rng rng = make_stream(8, 7);
  std::vector<std::vector<double>> states;
  std::vector<double> series;
  for (int i = 0; i <= 500; ++i) {
    const double v = 3 * standard_normal(rng);
    states.push_back({v});
    series.push_back(v);
  }
  const double z = chisq_quantile(0.9, 1);
  EXPECT_EQ(running_coverage_joint(chain_from(states), Matrix::Constant(1, 1, 4.0), z),
            running_coverage_component(series, 4.0, z));
}

TEST(JointCoverage, AllAtOrigin) {
  const std::vector<std::vector<double>> states(20, std::vector<double>{0.0, 0.0});
  for (double v : running_coverage_joint(chain_from(states), Matrix::Identity(2, 2), 1.0)) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Mahalanobis, MatchesTheExplicitInverse) {
  Matrix cov(2, 2);
  cov << 0.25, 1.875, 1.875, 25;
  const MahalanobisForm form(cov);
  Vector x(2);
  x << 1.0, -2.0;
  EXPECT_NEAR(form(x), x.dot(cov.inverse() * x), 1e-10);
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(MahalanobisForm{bad}, ContractViolation);
}

TEST(HittingTime, Cases) {
  const Matrix id = Matrix::Identity(2, 2);
  const double z = chisq_quantile(0.95, 2);
  EXPECT_EQ(first_hitting_time(chain_from({{0, 0}, {9, 9}}), id, z), 0);
  EXPECT_FALSE(first_hitting_time(chain_from({{50, 50}, {40, 40}, {30, 30}}), id, z).has_value());
  EXPECT_EQ(first_hitting_time(chain_from({{50, 50}, {40, 40}, {1, 1}, {50, 50}}), id, z), 2);
}

TEST(Metrics, NamesRoundTrip) {
  for (MetricKind m : {MetricKind::act, MetricKind::asjd, MetricKind::coverage_component,
                       MetricKind::coverage_joint, MetricKind::hitting_time}) {
    EXPECT_EQ(parse_metric(to_string(m)), m);
  }
}
