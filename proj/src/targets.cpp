#include "pmtm/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pmtm/errors.hpp"

namespace pmtm {

namespace {

// -0.5 (x - mu)^T diag(var)^{-1} (x - mu) - 0.5 log det diag(var)
double diag_gaussian_log_density(const Vector& x, const Vector& mean, const Vector& var) {
  double q = 0.0;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = x[i] - mean[i];
    q += r * r / var[i];
    log_det += std::log(var[i]);
  }
  return -0.5 * (q + log_det);
}

double log_sum_exp2(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

TargetDistribution::TargetDistribution(std::string name, int dim, LogDensityFn log_density,
                                       std::optional<Vector> component_variances,
                                       std::optional<Matrix> covariance)
    : name_(std::move(name)),
      dim_(dim),
      log_density_(std::move(log_density)),
      component_variances_(std::move(component_variances)),
      covariance_(std::move(covariance)) {
  require(dim_ >= 1, "target dimension must be positive");
  require(static_cast<bool>(log_density_), "target needs a log density");
  if (component_variances_) {
    require(component_variances_->size() == dim_, "component variances have wrong length");
    require((component_variances_->array() > 0.0).all(), "component variances must be positive");
  }
  if (covariance_) {
    require(covariance_->rows() == dim_ && covariance_->cols() == dim_,
            "covariance has wrong shape");
    require(covariance_->isApprox(covariance_->transpose()), "covariance must be symmetric");
    require(covariance_->llt().info() == Eigen::Success, "covariance must be positive definite");
    if (!component_variances_) component_variances_ = covariance_->diagonal();
  }
}

double TargetDistribution::log_density(const Vector& x) const {
  require(x.size() == dim_, "state dimension does not match target");
  return log_density_(x);
}

Vector banana_transform(const Vector& x, double b) {
  require(x.size() == 8, "banana transform is defined on R^8");
  Vector y = x;
  y[1] = x[1] + b * x[0] * x[0] - 100.0 * b;
  return y;
}

Vector banana_inverse(const Vector& y, double b) {
  require(y.size() == 8, "banana transform is defined on R^8");
  Vector x = y;
  x[1] = y[1] - b * y[0] * y[0] + 100.0 * b;
  return x;
}

BananaParams pi2_banana_params() {
  BananaParams p;
  p.b = 0.03;
  p.base_variances = Vector::Ones(8);
  p.base_variances[0] = 100.0;
  return p;
}

BenchmarkTarget parse_benchmark_target(std::string_view name) {
  if (name == "varpi1") return BenchmarkTarget::varpi1;
  if (name == "varpi2") return BenchmarkTarget::varpi2;
  if (name == "pi1") return BenchmarkTarget::pi1;
  if (name == "pi2") return BenchmarkTarget::pi2;
  if (name == "pi3") return BenchmarkTarget::pi3;
  if (name == "pi4") return BenchmarkTarget::pi4;
  throw ConfigError("unknown target '" + std::string(name) + "'");
}

std::string_view to_string(BenchmarkTarget t) {
  switch (t) {
    case BenchmarkTarget::varpi1: return "varpi1";
    case BenchmarkTarget::varpi2: return "varpi2";
    case BenchmarkTarget::pi1: return "pi1";
    case BenchmarkTarget::pi2: return "pi2";
    case BenchmarkTarget::pi3: return "pi3";
    case BenchmarkTarget::pi4: return "pi4";
  }
  return "?";
}

TargetDistribution make_gaussian_target(std::string name, const Matrix& covariance) {
  const Eigen::LLT<Matrix> llt(covariance);
  require(llt.info() == Eigen::Success, "covariance must be positive definite");
  const Matrix lower = llt.matrixL();
  auto log_density = [lower](const Vector& x) {
    const Vector w = lower.triangularView<Eigen::Lower>().solve(x);
    return -0.5 * w.squaredNorm();
  };
  return TargetDistribution(std::move(name), static_cast<int>(covariance.rows()),
                            std::move(log_density), std::nullopt, covariance);
}

TargetDistribution make_benchmark_target(BenchmarkTarget which) {
  switch (which) {
    case BenchmarkTarget::varpi1: {
      Vector var(5);
      var << 0.001, 0.1, 1.0, 10.0, 100.0;
      auto log_density = [var](const Vector& x) {
        return -0.5 * (x.array().square() / var.array()).sum();
      };
      Matrix cov = var.asDiagonal();
      return TargetDistribution("varpi1", 5, log_density, var, cov);
    }
    case BenchmarkTarget::varpi2: {
      Matrix cov(2, 2);
      cov << 0.25, 1.875, 1.875, 25.0;
      return make_gaussian_target("varpi2", cov);
    }
    case BenchmarkTarget::pi1: {
      Vector mu1(4), mu2(4), var1(4), var2(4);
      mu1 << 5, 5, 0, 0;
      mu2 << 15, 15, 0, 0;
      var1 << 6.25, 6.25, 6.25, 0.01;
      var2 << 6.25, 6.25, 0.25, 0.01;
      auto log_density = [=](const Vector& x) {
        return log_sum_exp2(diag_gaussian_log_density(x, mu1, var1),
                            diag_gaussian_log_density(x, mu2, var2));
      };
      // Equal-weight mixture moments.
      const Vector mean = 0.5 * (mu1 + mu2);
      const Vector d1 = mu1 - mean;
      const Vector d2 = mu2 - mean;
      Matrix cov = 0.5 * Matrix(var1.asDiagonal()) + 0.5 * Matrix(var2.asDiagonal()) +
                   0.5 * d1 * d1.transpose() + 0.5 * d2 * d2.transpose();
      return TargetDistribution("pi1", 4, log_density, Vector(cov.diagonal()), cov);
    }
    case BenchmarkTarget::pi2: {
      const BananaParams p = pi2_banana_params();
      auto log_density = [p](const Vector& x) {
        const double y1 = x[1] + p.b * x[0] * x[0] - 100.0 * p.b;
        double q = x[0] * x[0] / p.base_variances[0] + y1 * y1 / p.base_variances[1];
        for (int i = 2; i < 8; ++i) q += x[i] * x[i] / p.base_variances[i];
        return -0.5 * q;
      };
      // Marginal moments of the banana: x1 ~ N(0, s1^2) and
      // x2 = u - b (x1^2 - s1^2) with u ~ N(0, s2^2), hence
      // Var(x2) = s2^2 + 2 b^2 s1^4 and Cov(x1, x2) = 0.
      Vector var = p.base_variances;
      var[1] = p.base_variances[1] + 2.0 * p.b * p.b * p.base_variances[0] * p.base_variances[0];
      Matrix cov = var.asDiagonal();
      return TargetDistribution("pi2", 8, log_density, var, cov);
    }
    case BenchmarkTarget::pi3: {
      auto log_density = [](const Vector& x) {
        const double quad = x[0] * x[0] + 2.0 * x[0] * x[1] + 1.5 * x[1] * x[1];
        return -quad - std::cos(x[0] / 0.1) - 0.5 * std::cos(x[1] / 0.1);
      };
      return TargetDistribution("pi3", 2, log_density);
    }
    case BenchmarkTarget::pi4: {
      auto log_density = [](const Vector& x) {
        const double v = x[0];
        const double v2 = v * v;
        return -v2 * v2 + 5.0 * v2 - std::cos(v / 0.02);
      };
      return TargetDistribution("pi4", 1, log_density);
    }
  }
  throw ConfigError("unknown target");
}

TargetDistribution make_benchmark_target(std::string_view name) {
  return make_benchmark_target(parse_benchmark_target(name));
}

}  // namespace pmtm
