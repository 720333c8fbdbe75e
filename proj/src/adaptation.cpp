#include "pmtm/adaptation.hpp"

#include <algorithm>
#include <cmath>

#include "pmtm/errors.hpp"

namespace pmtm {

ContainmentBox ContainmentBox::cube(int dim, double lo, double hi) {
  ContainmentBox box{Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  box.validate();
  return box;
}

void ContainmentBox::validate() const {
  require(lower.size() == upper.size() && lower.size() >= 1, "containment box shape mismatch");
  require((lower.array() <= upper.array()).all(), "containment box must be non-empty");
}

bool containment_filter(const Vector& y, const ContainmentBox& box) {
  require(y.size() == box.lower.size(), "containment box dimension mismatch");
  return (y.array() >= box.lower.array()).all() && (y.array() <= box.upper.array()).all();
}

void AdaptationConfig::validate() const {
  require(interval >= 1, "adaptation interval must be at least 1");
  require(eta1 > 0.0 && eta1 < 1.0, "eta1 must lie in (0, 1)");
  require(eta2 > 0.0 && eta2 < 1.0, "eta2 must lie in (0, 1)");
  require(epsilon > 0.0 && epsilon < delta_max, "need 0 < epsilon < delta_max");
  require(burn_in >= 0, "burn-in must be non-negative");
  if (containment) containment->validate();
}

AdaptationState AdaptationState::initial(int dim, double upsilon_init) {
  require(dim >= 1, "dimension must be positive");
  const auto n = static_cast<std::size_t>(dim);
  return {std::vector<double>(n, upsilon_init), std::vector<long long>(n, 0),
          std::vector<long long>(n, 0)};
}

double adaptation_probability(long long n) {
  require(n >= 1, "iteration index starts at 1");
  const double geometric = std::pow(0.99, static_cast<double>(n - 1));
  return std::max(geometric, 1.0 / std::sqrt(static_cast<double>(n)));
}

bool adaptation_due(const AdaptationConfig& cfg, long long n) {
  if (n % cfg.interval != 0) return false;
  switch (cfg.schedule) {
    case Schedule::off: return false;
    case Schedule::burn_in_only: return n <= cfg.burn_in;
    case Schedule::diminishing:
    case Schedule::always: return true;
  }
  return false;
}

std::vector<bool> draw_adaptation_gates(Rng& rng, const AdaptationConfig& cfg, long long n,
                                        int dim) {
  if (!adaptation_due(cfg, n)) return {};
  const auto d = static_cast<std::size_t>(dim);
  if (cfg.schedule == Schedule::always) return std::vector<bool>(d, true);
  const double p = adaptation_probability(n);
  if (!cfg.per_component_gate) return std::vector<bool>(d, uniform01(rng) < p);
  std::vector<bool> gates(d);
  for (std::size_t k = 0; k < d; ++k) gates[k] = uniform01(rng) < p;
  return gates;
}

AdaptationState apply_width_adaptation(AdaptationState st, const AdaptationConfig& cfg,
                                       const std::vector<bool>& gates, long long n,
                                       std::vector<AdaptationEvent>* events) {
  const double inner_limit = static_cast<double>(cfg.interval) * cfg.eta1;
  const double outer_limit = static_cast<double>(cfg.interval) * cfg.eta2;
  for (std::size_t k = 0; k < gates.size(); ++k) {
    if (!gates[k]) continue;
    const double before = st.upsilon[k];
    double width = before;
    if (static_cast<double>(st.inner_count[k]) > inner_limit) width *= 0.5;
    if (static_cast<double>(st.outer_count[k]) > outer_limit) width *= 2.0;
    width = std::clamp(width, cfg.epsilon, cfg.delta_max);
    st.upsilon[k] = width;
    st.inner_count[k] = 0;
    st.outer_count[k] = 0;
    if (events && width != before) {
      events->push_back({n, static_cast<int>(k), before, width});
    }
  }
  return st;
}

AdaptationState maybe_adapt(Rng& rng, AdaptationState st, const AdaptationConfig& cfg,
                            long long n, std::vector<AdaptationEvent>* events) {
  require(n >= 1, "iteration index starts at 1");
  const auto gates = draw_adaptation_gates(rng, cfg, n, static_cast<int>(st.upsilon.size()));
  return apply_width_adaptation(std::move(st), cfg, gates, n, events);
}

}  // namespace pmtm
