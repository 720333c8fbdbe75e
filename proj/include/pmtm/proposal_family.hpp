#pragma once

#include <vector>

#include "pmtm/gaussian_baselines.hpp"
#include "pmtm/plateau.hpp"
#include "pmtm/rng.hpp"

namespace pmtm {

// The M one-dimensional trial proposals T_{j,k} for every component k.
// Trial indices are 1-based (1 = innermost, M = outermost); components are
// 0-based like the state vector.
class ProposalFamily {
 public:
  virtual ~ProposalFamily() = default;

  virtual int trials() const = 0;
  virtual double log_density(int j, int k, double x, double y) const = 0;
  virtual double sample(Rng& rng, int j, int k, double x) const = 0;
};

// Plateau trials with a per-component half-width; the remaining shape
// parameters are shared by all components.
class PlateauFamily final : public ProposalFamily {
 public:
  PlateauFamily(const PlateauParams& shape, int dim);

  int trials() const override { return shape_.trials; }
  double log_density(int j, int k, double x, double y) const override;
  double sample(Rng& rng, int j, int k, double x) const override;

  double width(int k) const { return params_[k].upsilon; }
  void set_width(int k, double upsilon);
  const PlateauParams& params(int k) const { return params_[k]; }

 private:
  PlateauParams shape_;
  std::vector<PlateauParams> params_;
};

// Gaussian trials N(x, s_{j,k}^2) with per-component standard deviations.
class GaussianFamily final : public ProposalFamily {
 public:
  GaussianFamily(const GaussianTrialParams& init, int dim);

  int trials() const override { return static_cast<int>(sds_.front().sds.size()); }
  double log_density(int j, int k, double x, double y) const override;
  double sample(Rng& rng, int j, int k, double x) const override;

  const GaussianTrialParams& params(int k) const { return sds_[k]; }
  void set_params(int k, GaussianTrialParams p);

 private:
  std::vector<GaussianTrialParams> sds_;
};

}  // namespace pmtm
