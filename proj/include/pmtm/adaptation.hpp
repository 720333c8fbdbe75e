#pragma once

#include <optional>
#include <vector>

#include "pmtm/rng.hpp"
#include "pmtm/targets.hpp"

namespace pmtm {

enum class Schedule {
  diminishing,   // every L iterations with probability P_n
  always,        // every L iterations
  burn_in_only,  // diminishing, and only while n <= burn-in
  off,
};

// Axis-aligned compact set K the chain is confined to.
struct ContainmentBox {
  Vector lower;
  Vector upper;

  static ContainmentBox cube(int dim, double lo, double hi);
  void validate() const;
};

// True iff every component of y lies in K.
bool containment_filter(const Vector& y, const ContainmentBox& box);

struct AdaptationConfig {
  long long interval = 50;  // L
  double eta1 = 0.4;        // innermost over-selection threshold
  double eta2 = 0.4;        // outermost over-selection threshold
  Schedule schedule = Schedule::diminishing;
  long long burn_in = 0;    // used by Schedule::burn_in_only
  double epsilon = 1e-6;    // lower bound on the plateau width
  double delta_max = 1e6;   // upper bound on the plateau width
  std::optional<ContainmentBox> containment;
  // Draw one gate uniform per component instead of one shared draw.
  bool per_component_gate = false;

  void validate() const;
};

// Per-component plateau widths and the selection counters of the innermost
// and outermost trials since the last adaptation check.
struct AdaptationState {
  std::vector<double> upsilon;
  std::vector<long long> inner_count;
  std::vector<long long> outer_count;

  static AdaptationState initial(int dim, double upsilon_init);
};

struct AdaptationEvent {
  long long iteration;
  int component;
  double old_value;
  double new_value;

  bool operator==(const AdaptationEvent&) const = default;
};

// P_n = max(0.99^{n-1}, 1/sqrt(n))
double adaptation_probability(long long n);

// Whether iteration n is an adaptation check under the schedule, ignoring
// the probability gate.
bool adaptation_due(const AdaptationConfig& cfg, long long n);

// Which components adapt at iteration n. Empty when no check is due;
// otherwise one flag per component. Consumes one uniform per check (or one
// per component with per_component_gate) unless the schedule is `always`.
std::vector<bool> draw_adaptation_gates(Rng& rng, const AdaptationConfig& cfg, long long n,
                                        int dim);

// Width update for the components whose gate fired: halve on innermost
// over-selection, then double on outermost over-selection, clamp to
// [epsilon, delta_max], and reset both counters.
AdaptationState apply_width_adaptation(AdaptationState st, const AdaptationConfig& cfg,
                                       const std::vector<bool>& gates, long long n,
                                       std::vector<AdaptationEvent>* events = nullptr);

// draw_adaptation_gates followed by apply_width_adaptation.
AdaptationState maybe_adapt(Rng& rng, AdaptationState st, const AdaptationConfig& cfg,
                            long long n, std::vector<AdaptationEvent>* events = nullptr);

}  // namespace pmtm
