#include "pmtm/proposal_family.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "pmtm/errors.hpp"

namespace pmtm {

PlateauFamily::PlateauFamily(const PlateauParams& shape, int dim)
    : shape_(shape), params_(static_cast<std::size_t>(dim), shape) {
  shape_.validate();
  require(dim >= 1, "family dimension must be positive");
}

double PlateauFamily::log_density(int j, int k, double x, double y) const {
  return trial_log_density(j, x, y, params_[k]);
}

double PlateauFamily::sample(Rng& rng, int j, int k, double x) const {
  return trial_sample(rng, j, x, params_[k]);
}

void PlateauFamily::set_width(int k, double upsilon) {
  require(upsilon > 0.0, "upsilon must be positive");
  params_[k].upsilon = upsilon;
}

GaussianFamily::GaussianFamily(const GaussianTrialParams& init, int dim)
    : sds_(static_cast<std::size_t>(dim), init) {
  init.validate();
  require(dim >= 1, "family dimension must be positive");
}

double GaussianFamily::log_density(int j, int k, double x, double y) const {
  return gaussian_trial_log_density(j, x, y, sds_[k]);
}

double GaussianFamily::sample(Rng& rng, int j, int k, double x) const {
  return x + sds_[k].sds[j - 1] * standard_normal(rng);
}

void GaussianFamily::set_params(int k, GaussianTrialParams p) {
  p.validate();
  require(p.sds.size() == sds_[k].sds.size(), "trial count cannot change");
  sds_[k] = std::move(p);
}

}  // namespace pmtm
