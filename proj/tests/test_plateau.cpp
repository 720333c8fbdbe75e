#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "pmtm/errors.hpp"
#include "pmtm/plateau.hpp"

using namespace pmtm;

namespace {

std::vector<double> knees(const PlateauComponent& c) { return {c.mu - c.delta, c.mu + c.delta}; }

std::vector<double> trial_knees(int j, double x, const PlateauParams& p) {
  if (j == 1) return {x - p.upsilon, x + p.upsilon};
  std::vector<double> out = knees(trial_left_component(j, x, p));
  for (double k : knees(trial_right_component(j, x, p))) out.push_back(k);
  return out;
}

double trial_mass(int j, double x, const PlateauParams& p) {
  const double span = trial_offset(std::max(j, 2), p) + p.upsilon + 40.0 * p.varsigma;
  return oracle::integrate_line([&](double y) { return trial_density(j, x, y, p); }, x, span,
                                trial_knees(j, x, p));
}

}  // namespace

TEST(PlateauNormalizer, ClosedFormValues) {
  EXPECT_NEAR(plateau_normalizer(1, 0.05, 0.05), 2.125331, 5e-7);
  EXPECT_NEAR(plateau_normalizer(1, 0.5, 0.5), 3.253314, 5e-7);
  EXPECT_NEAR(plateau_normalizer(1, 0.05, 0.05), 2 + std::sqrt(2 * std::numbers::pi) * 0.05, 1e-14);
}

TEST(PlateauNormalizer, MatchesQuadratureOfTheUnnormalizedShape) {
  for (double delta : {0.1, 1.0, 7.0}) {
    for (double s1 : {0.01, 0.05, 0.5, 3.0}) {
      for (double s2 : {0.05, 2.0}) {
        auto shape = [&](double y) {
          if (y < -delta) return std::exp(-0.5 * std::pow((y + delta) / s1, 2));
          if (y > delta) return std::exp(-0.5 * std::pow((y - delta) / s2, 2));
          return 1.0;
        };
        const double quad = oracle::integrate(shape, -delta - 40 * s1, delta + 40 * s2,
                                              {-delta, delta});
        EXPECT_NEAR(plateau_normalizer(delta, s1, s2), quad, 1e-8)
            << delta << " " << s1 << " " << s2;
      }
    }
  }
}

TEST(PlateauNormalizer, PurePlateauLimit) {
  EXPECT_NEAR(plateau_normalizer(0.5, 1e-12, 1e-12), 1.0, 1e-11);
}

TEST(PlateauNormalizer, RejectsNonPositiveParameters) {
  EXPECT_THROW(plateau_normalizer(0, 1, 1), ContractViolation);
  EXPECT_THROW(plateau_normalizer(1, 0, 1), ContractViolation);
  EXPECT_THROW(plateau_normalizer(1, 1, -1), ContractViolation);
}

TEST(PlateauPdf, PlateauAndKneeValues) {
  const PlateauComponent c{0.7, 1.0, 0.3, 0.8};
  const double cn = plateau_normalizer(1.0, 0.3, 0.8);
  EXPECT_NEAR(plateau_pdf(0.7, c), 1 / cn, 1e-15);
  EXPECT_NEAR(plateau_pdf(0.7 - 1.0 - 0.3, c), std::exp(-0.5) / cn, 1e-15);
  EXPECT_NEAR(plateau_pdf(0.7 + 1.0 + 0.8, c), std::exp(-0.5) / cn, 1e-15);
}

TEST(PlateauPdf, AgreesWithTheDefinition) {
  const PlateauComponent c{-2.0, 0.4, 0.05, 1.5};
  for (double y = -5; y <= 5; y += 0.0137) {
    EXPECT_NEAR(plateau_pdf(y, c), oracle::plateau_pdf(y, -2.0, 0.4, 0.05, 1.5), 1e-14) << y;
  }
}

TEST(PlateauPdf, IntegratesToOne) {
  for (double delta : {0.01, 1.0, 50.0}) {
    for (double s1 : {0.05, 0.5, 3.0}) {
      for (double s2 : {0.05, 3.0}) {
        const PlateauComponent c{1.5, delta, s1, s2};
        const double mass = oracle::integrate([&](double y) { return plateau_pdf(y, c); },
                                              1.5 - delta - 40 * s1, 1.5 + delta + 40 * s2,
                                              knees(c));
        EXPECT_NEAR(mass, 1.0, 1e-8);
      }
    }
  }
}

TEST(PlateauPdf, LogPdfStaysFiniteFarOut) {
  const PlateauComponent c{0, 1, 0.05, 0.05};
  const double lp = plateau_log_pdf(100.0, c);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_NEAR(lp, -0.5 * std::pow(99.0 / 0.05, 2) - std::log(plateau_normalizer(1, 0.05, 0.05)),
              1e-6);
}

TEST(PlateauSample, SymmetricMeanIsTheCentre) {
  Rng rng = make_stream(5, 1);
  const PlateauComponent c{3.0, 1.0, 0.5, 0.5};
  std::vector<double> draws(1000000);
  for (double& d : draws) d = plateau_sample(rng, c);
  const double sd = std::sqrt(oracle::variance(draws));
  EXPECT_NEAR(oracle::mean(draws), 3.0, 4 * sd / 1000);
}

TEST(PlateauSample, PlateauFractionIsTwoDeltaOverC) {
  Rng rng = make_stream(5, 2);
  const PlateauComponent c{0.0, 1.0, 0.5, 2.0};
  const int n = 1000000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    const double y = plateau_sample(rng, c);
    inside += (y >= -1.0 && y <= 1.0);
  }
  const double p = 2.0 / (std::sqrt(2 * std::numbers::pi) * (0.5 + 2.0) / 2.0 + 2.0);
  EXPECT_NEAR(static_cast<double>(inside) / n, p, 3 * std::sqrt(p * (1 - p) / n));
}

TEST(PlateauSample, KolmogorovDistanceToQuadratureCdf) {
  Rng rng = make_stream(5, 3);
  const double mu = -1.0, delta = 0.7, s1 = 0.3, s2 = 1.2;
  const PlateauComponent c{mu, delta, s1, s2};
  std::vector<double> draws(100000);
  for (double& d : draws) d = plateau_sample(rng, c);
  auto cdf = [&](double y) {
    const double lo = mu - delta - 40 * s1;
    if (y <= lo) return 0.0;
    return oracle::integrate([&](double t) { return oracle::plateau_pdf(t, mu, delta, s1, s2); },
                             lo, y, {mu - delta, mu + delta});
  };
  EXPECT_LT(oracle::ks_distance(draws, cdf), 0.01);
}

TEST(TrialFamily, OffsetsPerLayout) {
  PlateauParams p;
  p.upsilon = 1.5;
  EXPECT_DOUBLE_EQ(trial_offset(2, p), 4.5);
  EXPECT_DOUBLE_EQ(trial_offset(3, p), 7.5);
  p.layout = PlateauLayout::contiguous;
  EXPECT_DOUBLE_EQ(trial_offset(2, p), 3.0);
  EXPECT_DOUBLE_EQ(trial_offset(5, p), 12.0);
}

TEST(TrialFamily, PlateausDoNotOverlap) {
  for (PlateauLayout layout : {PlateauLayout::gapped, PlateauLayout::contiguous}) {
    PlateauParams p;
    p.layout = layout;
    p.upsilon = 0.8;
    std::vector<std::pair<double, double>> intervals = {{-0.8, 0.8}};
    for (int j = 2; j <= p.trials; ++j) {
      for (const PlateauComponent& c :
           {trial_left_component(j, 0.0, p), trial_right_component(j, 0.0, p)}) {
        intervals.emplace_back(c.mu - c.delta, c.mu + c.delta);
      }
    }
    for (std::size_t a = 0; a < intervals.size(); ++a) {
      for (std::size_t b = a + 1; b < intervals.size(); ++b) {
        const double overlap = std::min(intervals[a].second, intervals[b].second) -
                               std::max(intervals[a].first, intervals[b].first);
        EXPECT_LE(overlap, 1e-12);
      }
    }
  }
}

TEST(TrialFamily, OuterTailsOnlyOnTheLastTrial) {
  PlateauParams p;
  EXPECT_DOUBLE_EQ(trial_left_component(5, 0, p).sigma_left, 3.0);
  EXPECT_DOUBLE_EQ(trial_left_component(5, 0, p).sigma_right, 0.05);
  EXPECT_DOUBLE_EQ(trial_right_component(5, 0, p).sigma_right, 3.0);
  EXPECT_DOUBLE_EQ(trial_right_component(4, 0, p).sigma_right, 0.05);
}

TEST(TrialFamily, DensityExamples) {
  PlateauParams p;
  EXPECT_NEAR(trial_density(1, 0.3, 0.3, p), 1 / 2.125331, 1e-6);
  EXPECT_NEAR(trial_density(1, 0.3, 0.3, p), 0.470515, 1e-6);
  // y at the centre of the right plateau of trial 2; the left half sits 6
  // units (120 tail sds) away and contributes nothing representable
  EXPECT_NEAR(trial_density(2, 0.0, 3.0, p), 0.5 / 2.125331, 1e-6);
  EXPECT_NEAR(trial_density(2, 0.0, 3.0, p), 0.235258, 1e-6);
}

TEST(TrialFamily, EveryTrialIntegratesToOne) {
  for (PlateauLayout layout : {PlateauLayout::gapped, PlateauLayout::contiguous}) {
    for (double upsilon : {0.01, 1.0, 20.0}) {
      PlateauParams p;
      p.layout = layout;
      p.upsilon = upsilon;
      for (int j = 1; j <= p.trials; ++j) {
        EXPECT_NEAR(trial_mass(j, 2.0, p), 1.0, 1e-8) << "j=" << j << " upsilon=" << upsilon;
      }
    }
  }
}

TEST(TrialFamily, SymmetricInCurrentAndProposed) {
  Rng rng = make_stream(9, 1);
  PlateauParams p;
  p.upsilon = 0.7;
  for (int t = 0; t < 200; ++t) {
    const double x = 5 * standard_normal(rng);
    const double y = 5 * standard_normal(rng);
    for (int j = 1; j <= p.trials; ++j) {
      EXPECT_NEAR(trial_log_density(j, x, y, p), trial_log_density(j, y, x, p), 1e-9);
    }
  }
}

TEST(TrialFamily, SecondTrialIsEquallyLikelyLeftOrRight) {
  Rng rng = make_stream(9, 2);
  PlateauParams p;
  const int n = 1000000;
  int right = 0;
  for (int i = 0; i < n; ++i) right += trial_sample(rng, 2, 1.0, p) > 1.0;
  EXPECT_NEAR(static_cast<double>(right) / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(TrialFamily, FirstTrialSplitsBetweenPlateauAndTails) {
  Rng rng = make_stream(9, 3);
  PlateauParams p;
  p.sigma = 0.4;
  const int n = 1000000;
  int plateau = 0, left = 0;
  for (int i = 0; i < n; ++i) {
    const double y = trial_sample(rng, 1, 0.0, p);
    if (std::abs(y) <= 1.0) ++plateau;
    else if (y < -1.0) ++left;
  }
  const double cn = 2.0 + std::sqrt(2 * std::numbers::pi) * 0.4;
  const double p_plateau = 2.0 / cn;
  const double p_left = (1 - p_plateau) / 2;
  EXPECT_NEAR(static_cast<double>(plateau) / n, p_plateau,
              3 * std::sqrt(p_plateau * (1 - p_plateau) / n));
  EXPECT_NEAR(static_cast<double>(left) / n, p_left, 3 * std::sqrt(p_left * (1 - p_left) / n));
}

TEST(TrialFamily, SamplesFollowTheTrialDensity) {
  Rng rng = make_stream(9, 4);
  PlateauParams p;
  p.sigma = 0.3;
  for (int j : {2, 5}) {
    std::vector<double> draws(50000);
    for (double& d : draws) d = trial_sample(rng, j, 0.5, p);
    const std::vector<double> breaks = trial_knees(j, 0.5, p);
    const double lo = 0.5 - trial_offset(j, p) - p.upsilon - 40 * p.varsigma;
    auto cdf = [&](double y) {
      return oracle::integrate([&](double t) { return trial_density(j, 0.5, t, p); }, lo, y,
                               breaks);
    };
    EXPECT_LT(oracle::ks_distance(draws, cdf), 0.012) << "j=" << j;
  }
}

TEST(TrialFamily, MassOfTheSecondTrialNearTheCurrentPoint) {
  // Mass of T_2(0, .) on (-2.11, 2.11) with unit widths, by independent
  // adaptive quadrature of the mixture definition (gapped layout).
  const double expected[3][2] = {{0.5, 0.2264328120694821},
                                 {0.25, 0.16116627457013277},
                                 {0.05, 0.0812417798702825}};
  for (const auto& [sigma, mass] : expected) {
    PlateauParams p;
    p.sigma = sigma;
    const double got = oracle::integrate([&](double y) { return trial_density(2, 0, y, p); },
                                         -2.11, 2.11, {-2.0, 2.0});
    EXPECT_NEAR(got, mass, 1e-9) << "sigma=" << sigma;
  }
}

TEST(TrialFamily, ValidateRejectsBadShapes) {
  PlateauParams p;
  p.upsilon = 0;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = {};
  p.trials = 1;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = {};
  EXPECT_THROW(trial_density(6, 0, 0, p), ContractViolation);
}
