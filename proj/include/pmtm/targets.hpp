#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace pmtm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Un-normalized log density on R^d, plus whatever moments are known in closed
// form. Immutable after construction, so one instance may be evaluated from
// many threads at once.
class TargetDistribution {
 public:
  using LogDensityFn = std::function<double(const Vector&)>;

  TargetDistribution(std::string name, int dim, LogDensityFn log_density,
                     std::optional<Vector> component_variances = std::nullopt,
                     std::optional<Matrix> covariance = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  // ln of the target up to an additive constant. Throws ContractViolation on a
  // dimension mismatch.
  double log_density(const Vector& x) const;

  // Same as log_density without the dimension check; for the sampler's inner
  // loop where the state size is fixed by construction.
  double log_density_unchecked(const Vector& x) const { return log_density_(x); }

  const std::optional<Vector>& component_variances() const { return component_variances_; }
  const std::optional<Matrix>& covariance() const { return covariance_; }

 private:
  std::string name_;
  int dim_;
  LogDensityFn log_density_;
  std::optional<Vector> component_variances_;
  std::optional<Matrix> covariance_;
};

struct BananaParams {
  double b = 0.03;
  Vector base_variances;  // diagonal of the base covariance
};

// (x1, x2 + b x1^2 - 100 b, x3, ..., x8)
Vector banana_transform(const Vector& x, double b);
Vector banana_inverse(const Vector& y, double b);

enum class BenchmarkTarget { varpi1, varpi2, pi1, pi2, pi3, pi4 };

BenchmarkTarget parse_benchmark_target(std::string_view name);
std::string_view to_string(BenchmarkTarget t);

TargetDistribution make_benchmark_target(BenchmarkTarget which);
TargetDistribution make_benchmark_target(std::string_view name);

// Zero-mean Gaussian with the given covariance (log density up to a constant).
TargetDistribution make_gaussian_target(std::string name, const Matrix& covariance);

BananaParams pi2_banana_params();

}  // namespace pmtm
