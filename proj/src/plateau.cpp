#include "pmtm/plateau.hpp"

#include <cmath>
#include <numbers>

#include "pmtm/errors.hpp"

namespace pmtm {

namespace {

constexpr double kLogHalf = -std::numbers::ln2;

double half_tail_mass(double sigma) {
  return std::sqrt(2.0 * std::numbers::pi * sigma * sigma) / 2.0;
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -HUGE_VAL) return a;
  return a + std::log1p(std::exp(b - a));
}

void check_trial_index(int j, const PlateauParams& p) {
  require(j >= 1 && j <= p.trials, "trial index out of range");
}

}  // namespace

double plateau_normalizer(double delta, double sigma_left, double sigma_right) {
  require(delta > 0.0 && sigma_left > 0.0 && sigma_right > 0.0,
          "plateau parameters must be positive");
  return half_tail_mass(sigma_left) + half_tail_mass(sigma_right) + 2.0 * delta;
}

double plateau_log_pdf(double y, const PlateauComponent& c) {
  const double log_c = std::log(plateau_normalizer(c.delta, c.sigma_left, c.sigma_right));
  const double left_knee = c.mu - c.delta;
  const double right_knee = c.mu + c.delta;
  if (y < left_knee) {
    const double u = (y - left_knee) / c.sigma_left;
    return -0.5 * u * u - log_c;
  }
  if (y > right_knee) {
    const double u = (y - right_knee) / c.sigma_right;
    return -0.5 * u * u - log_c;
  }
  return -log_c;
}

double plateau_pdf(double y, const PlateauComponent& c) {
  return std::exp(plateau_log_pdf(y, c));
}

double plateau_sample(Rng& rng, const PlateauComponent& c) {
  const double left = half_tail_mass(c.sigma_left);
  const double right = half_tail_mass(c.sigma_right);
  const double total = left + right + 2.0 * c.delta;
  const double u = uniform01(rng) * total;
  if (u < 2.0 * c.delta) {
    // reuse u: it is uniform on [0, 2 delta) given this branch
    return c.mu - c.delta + u;
  }
  const double tail = std::abs(standard_normal(rng));
  if (u < 2.0 * c.delta + left) return c.mu - c.delta - tail * c.sigma_left;
  return c.mu + c.delta + tail * c.sigma_right;
}

void PlateauParams::validate() const {
  require(upsilon > 0.0, "upsilon must be positive");
  require(sigma > 0.0, "sigma must be positive");
  require(varsigma > 0.0, "varsigma must be positive");
  require(trials >= 2, "plateau family needs at least two trials");
}

double trial_offset(int j, const PlateauParams& p) {
  const double base = 2.0 * (j - 1) * p.upsilon;
  return p.layout == PlateauLayout::gapped ? base + p.upsilon : base;
}

PlateauComponent trial_left_component(int j, double x, const PlateauParams& p) {
  const double outer = (j == p.trials) ? p.varsigma : p.sigma;
  return {x - trial_offset(j, p), p.upsilon, outer, p.sigma};
}

PlateauComponent trial_right_component(int j, double x, const PlateauParams& p) {
  const double outer = (j == p.trials) ? p.varsigma : p.sigma;
  return {x + trial_offset(j, p), p.upsilon, p.sigma, outer};
}

double trial_log_density(int j, double x, double y, const PlateauParams& p) {
  check_trial_index(j, p);
  if (j == 1) return plateau_log_pdf(y, {x, p.upsilon, p.sigma, p.sigma});
  return log_add(kLogHalf + plateau_log_pdf(y, trial_left_component(j, x, p)),
                 kLogHalf + plateau_log_pdf(y, trial_right_component(j, x, p)));
}

double trial_density(int j, double x, double y, const PlateauParams& p) {
  return std::exp(trial_log_density(j, x, y, p));
}

double trial_sample(Rng& rng, int j, double x, const PlateauParams& p) {
  check_trial_index(j, p);
  if (j == 1) return plateau_sample(rng, {x, p.upsilon, p.sigma, p.sigma});
  const bool right = uniform01(rng) < 0.5;
  return plateau_sample(rng, right ? trial_right_component(j, x, p)
                                   : trial_left_component(j, x, p));
}

}  // namespace pmtm
