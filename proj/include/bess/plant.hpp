#pragma once

// Battery plant: stored energy under the FIR efficiency model
//
//   E_k = E_0 + dt * sum_{i<=k} eta_i * B_i,  eta_i = beta if B_i >= 0 else 1/beta
//
// with B positive when charging. Stored energy is physically clamped to
// [0, e_nom]; the scheduling band [e_min, e_max] is not enforced here.

#include <cstddef>

#include "bess/scheduler.hpp"

namespace bess {

struct PlantState {
  double soe = 0.0;  // kWh
  BessParams bess;
  std::size_t clamp_events = 0;
};

struct PlantStep {
  PlantState next;
  double applied_kw = 0.0;
  double delta_kwh = 0.0;
  bool clamped = false;
};

inline double efficiency_factor(double b_kw, double beta) {
  return b_kw >= 0.0 ? beta : 1.0 / beta;
}

/// Integrates `b_kw` over `dt_h`. Throws ValidationError when |b_kw| exceeds
/// p_max or dt_h is not positive.
PlantStep apply_power(const PlantState& state, double b_kw, double dt_h);

}  // namespace bess
