#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pmtm/adaptation.hpp"
#include "pmtm/errors.hpp"
#include "pmtm/mtm.hpp"

using namespace pmtm;

namespace {

AdaptationState one_component(double upsilon, long long inner, long long outer) {
  AdaptationState st = AdaptationState::initial(1, upsilon);
  st.inner_count[0] = inner;
  st.outer_count[0] = outer;
  return st;
}

AdaptationConfig always() {
  AdaptationConfig cfg;
  cfg.schedule = Schedule::always;
  return cfg;
}

// Smallest and largest width a 1D AP chain reaches on N(0, sd^2) within
// `iterations` sweeps, starting from width 1.
std::pair<double, double> width_range(double sd, std::uint64_t seed, long long iterations) {
  const TargetDistribution t = make_gaussian_target("n", Matrix::Constant(1, 1, sd * sd));
  SamplerConfig cfg = SamplerConfig::defaults(SamplerKind::ap);
  cfg.adaptation.schedule = Schedule::always;
  Rng rng = make_stream(seed, 1);
  const ChainRecord c = run_chain(rng, cfg, t, iterations, Vector::Zero(1));
  double lo = 1.0, hi = 1.0;
  for (const AdaptationEvent& e : c.events) {
    lo = std::min(lo, e.new_value);
    hi = std::max(hi, e.new_value);
  }
  return {lo, hi};
}

}  // namespace

TEST(AdaptationProbability, Examples) {
  EXPECT_DOUBLE_EQ(adaptation_probability(1), 1.0);
  EXPECT_NEAR(adaptation_probability(10000), 0.01, 1e-15);
  EXPECT_NEAR(adaptation_probability(100), std::max(std::pow(0.99, 99), 0.1), 1e-15);
  EXPECT_THROW(adaptation_probability(0), ContractViolation);
}

TEST(AdaptationProbability, NonIncreasingUpToAMillion) {
  double previous = adaptation_probability(1);
  for (long long n = 2; n <= 1000000; ++n) {
    const double p = adaptation_probability(n);
    ASSERT_LE(p, previous) << n;
    previous = p;
  }
}

TEST(AdaptationSchedule, DueEveryIntervalUnderTheSchedule) {
  AdaptationConfig cfg = always();
  EXPECT_FALSE(adaptation_due(cfg, 49));
  EXPECT_TRUE(adaptation_due(cfg, 50));
  cfg.schedule = Schedule::off;
  EXPECT_FALSE(adaptation_due(cfg, 50));
  cfg.schedule = Schedule::burn_in_only;
  cfg.burn_in = 100;
  EXPECT_TRUE(adaptation_due(cfg, 100));
  EXPECT_FALSE(adaptation_due(cfg, 150));
}

TEST(AdaptationSchedule, GateFrequencyFollowsTheProbability) {
  AdaptationConfig cfg;
  cfg.schedule = Schedule::diminishing;
  Rng rng = make_stream(6, 1);
  const long long n = 2500;
  const int draws = 100000;
  int open = 0;
  for (int i = 0; i < draws; ++i) open += draw_adaptation_gates(rng, cfg, n, 1)[0];
  const double p = adaptation_probability(n);
  EXPECT_NEAR(static_cast<double>(open) / draws, p, 4 * std::sqrt(p * (1 - p) / draws));
  EXPECT_TRUE(draw_adaptation_gates(rng, cfg, n + 1, 3).empty());
}

TEST(AdaptationSchedule, SharedGateOpensAllComponentsTogether) {
  AdaptationConfig cfg;
  cfg.schedule = Schedule::diminishing;
  Rng rng = make_stream(6, 2);
  for (int i = 0; i < 200; ++i) {
    const auto gates = draw_adaptation_gates(rng, cfg, 5000, 4);
    ASSERT_EQ(gates.size(), 4u);
    EXPECT_TRUE(std::all_of(gates.begin(), gates.end(), [&](bool g) { return g == gates[0]; }));
  }
}

TEST(WidthUpdate, InnerOverSelectionHalves) {
  const auto st = apply_width_adaptation(one_component(1.0, 21, 0), always(), {true}, 50);
  EXPECT_DOUBLE_EQ(st.upsilon[0], 0.5);
  EXPECT_EQ(st.inner_count[0], 0);
  EXPECT_EQ(st.outer_count[0], 0);
}

TEST(WidthUpdate, ThresholdIsStrict) {
  const auto st = apply_width_adaptation(one_component(1.0, 20, 20), always(), {true}, 50);
  EXPECT_DOUBLE_EQ(st.upsilon[0], 1.0);
}

TEST(WidthUpdate, OuterOverSelectionDoubles) {
  const auto st = apply_width_adaptation(one_component(1.0, 3, 21), always(), {true}, 50);
  EXPECT_DOUBLE_EQ(st.upsilon[0], 2.0);
}

TEST(WidthUpdate, BothTriggersCancel) {
  std::vector<AdaptationEvent> events;
  const auto st =
      apply_width_adaptation(one_component(1.7, 21, 21), always(), {true}, 50, &events);
  EXPECT_DOUBLE_EQ(st.upsilon[0], 1.7);
  EXPECT_TRUE(events.empty());
}

TEST(WidthUpdate, ClampedToBounds) {
  AdaptationConfig cfg = always();
  auto st = apply_width_adaptation(one_component(1e-6, 30, 0), cfg, {true}, 50);
  EXPECT_DOUBLE_EQ(st.upsilon[0], 1e-6);
  st = apply_width_adaptation(one_component(1e6, 0, 30), cfg, {true}, 50);
  EXPECT_DOUBLE_EQ(st.upsilon[0], 1e6);
}

TEST(WidthUpdate, ClosedGateChangesNothing) {
  const auto st = apply_width_adaptation(one_component(1.0, 40, 0), always(), {false}, 50);
  EXPECT_DOUBLE_EQ(st.upsilon[0], 1.0);
  EXPECT_EQ(st.inner_count[0], 40);
}

TEST(WidthUpdate, EventLogRecordsChanges) {
  std::vector<AdaptationEvent> events;
  apply_width_adaptation(one_component(1.0, 30, 0), always(), {true}, 150, &events);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0], (AdaptationEvent{150, 0, 1.0, 0.5}));
}

TEST(Containment, BoxMembership) {
  const ContainmentBox box = ContainmentBox::cube(3, -1e6, 1e6);
  EXPECT_TRUE(containment_filter(Vector::Zero(3), box));
  Vector y = Vector::Zero(3);
  y[1] = 1e6 + 1;
  EXPECT_FALSE(containment_filter(y, box));
  EXPECT_THROW(ContainmentBox::cube(2, 1, -1), ContractViolation);
}

TEST(Containment, ChainNeverLeavesTheBox) {
  const TargetDistribution t = make_benchmark_target("varpi1");
  SamplerConfig cfg = SamplerConfig::defaults(SamplerKind::ap);
  cfg.adaptation.schedule = Schedule::always;
  cfg.adaptation.containment = ContainmentBox::cube(5, -3.0, 3.0);
  Rng rng = make_stream(6, 3);
  const ChainRecord c = run_chain(rng, cfg, t, 3000, Vector::Zero(5));
  for (long long n = 0; n <= c.iterations; ++n) {
    ASSERT_TRUE(containment_filter(c.state_vector(n), *cfg.adaptation.containment)) << n;
  }
}

TEST(Directional, WideTargetGrowsTheWidth) {
  int reached = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) reached += width_range(100.0, seed, 2000).second >= 8.0;
  EXPECT_GE(reached, 95);
}

TEST(Directional, NarrowTargetShrinksTheWidth) {
  int reached = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) reached += width_range(0.01, seed, 2000).first <= 0.125;
  EXPECT_GE(reached, 95);
}

TEST(Directional, WidthsStayWithinBounds) {
  const auto [lo, hi] = width_range(1e9, 1, 3000);
  EXPECT_LE(hi, 1e6);
  EXPECT_GE(lo, 1e-6);
}
