#include "bess/plant.hpp"

#include <cmath>
#include <string>

#include "bess/errors.hpp"

namespace bess {

PlantStep apply_power(const PlantState& state, double b_kw, double dt_h) {
  if (!(dt_h > 0.0) || !std::isfinite(dt_h)) {
    throw ValidationError("apply_power: dt must be positive");
  }
  if (!std::isfinite(b_kw) || std::abs(b_kw) > state.bess.p_max) {
    throw ValidationError("apply_power: |" + std::to_string(b_kw) + "| kW exceeds p_max " +
                          std::to_string(state.bess.p_max) + " kW");
  }

  PlantStep step;
  step.next = state;
  const double eta = efficiency_factor(b_kw, state.bess.beta);
  double delta = dt_h * eta * b_kw;
  double applied = b_kw;
  if (state.soe + delta > state.bess.e_nom) {
    delta = state.bess.e_nom - state.soe;
    applied = delta / (dt_h * eta);
    step.clamped = true;
  } else if (state.soe + delta < 0.0) {
    delta = -state.soe;
    applied = delta / (dt_h * eta);
    step.clamped = true;
  }
  step.next.soe = state.soe + delta;
  if (step.clamped) ++step.next.clamp_events;
  step.applied_kw = applied;
  step.delta_kwh = delta;
  return step;
}

}  // namespace bess
