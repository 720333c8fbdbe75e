#pragma once

#include "pmtm/rng.hpp"

namespace pmtm {

// One plateau density: flat on [mu - delta, mu + delta] with Gaussian-shaped
// tails of scale sigma_left / sigma_right outside the knees.
struct PlateauComponent {
  double mu = 0.0;
  double delta = 1.0;
  double sigma_left = 0.05;
  double sigma_right = 0.05;
};

// sqrt(2 pi sl^2)/2 + sqrt(2 pi sr^2)/2 + 2 delta
double plateau_normalizer(double delta, double sigma_left, double sigma_right);

double plateau_log_pdf(double y, const PlateauComponent& c);
double plateau_pdf(double y, const PlateauComponent& c);

// Exact draw by mixture decomposition: uniform plateau with probability
// 2 delta / C, otherwise a half-normal tail hanging off the matching knee.
double plateau_sample(Rng& rng, const PlateauComponent& c);

// Where the side plateaus of trial j sit relative to the current point.
enum class PlateauLayout {
  // offset 2 (j - 1) upsilon + upsilon: leaves an upsilon-wide gap around the
  // central plateau
  gapped,
  // offset 2 (j - 1) upsilon: plateaus tile the line edge to edge
  contiguous,
};

// Shape of the M-member trial family for one component. upsilon is the common
// plateau half-width, sigma the inner tail scale, varsigma the outer tail
// scale of the outermost trial.
struct PlateauParams {
  double upsilon = 1.0;
  double sigma = 0.05;
  double varsigma = 3.0;
  int trials = 5;
  PlateauLayout layout = PlateauLayout::gapped;

  void validate() const;
};

// Distance from x to the centre of each side plateau of trial j (j >= 2).
double trial_offset(int j, const PlateauParams& p);

// The two mixture halves of trial j >= 2 centred at x.
PlateauComponent trial_left_component(int j, double x, const PlateauParams& p);
PlateauComponent trial_right_component(int j, double x, const PlateauParams& p);

// T_j(x, y) for j in 1..M. Not symmetric in (x, y) in general.
double trial_log_density(int j, double x, double y, const PlateauParams& p);
double trial_density(int j, double x, double y, const PlateauParams& p);

double trial_sample(Rng& rng, int j, double x, const PlateauParams& p);

}  // namespace pmtm
