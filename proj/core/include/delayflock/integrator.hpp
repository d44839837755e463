#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "delayflock/delay.hpp"
#include "delayflock/history.hpp"
#include "delayflock/model.hpp"

namespace delayflock {

// Each agent translates at its initial velocity on [-tau(0), 0]:
//   x_i(t) = x0_i + (t + tau(0)) v0_i,  v_i(t) = v0_i.
struct BallisticHistory {
  Matrix x0;
  Matrix v0;

  friend bool operator==(const BallisticHistory&, const BallisticHistory&) = default;
};

struct ExplicitSample {
  double t = 0.0;
  Matrix x;
  Matrix v;

  friend bool operator==(const ExplicitSample&, const ExplicitSample&) = default;
};

// Tabulated seed history; strictly increasing times covering the lookback
// window and ending at t = 0.
struct ExplicitHistory {
  std::vector<ExplicitSample> samples;

  friend bool operator==(const ExplicitHistory&, const ExplicitHistory&) = default;
};

using InitialHistory = std::variant<BallisticHistory, ExplicitHistory>;

struct Scenario {
  ModelParams params;
  DelaySpec delay = DelaySpec::constant(0.0);
  InitialHistory initial;
  double h = 0.01;
  double t_end = 10.0;
  std::size_t sample_stride = 10;

  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Any |component| above this, or a non-finite value, stops a run.
inline constexpr double kDivergenceLimit = 1e12;

// Step actually used: for a constant delay h shrinks so tau / h is an integer.
double effective_step(const Scenario& scenario);

// Number of steps to cover [0, t_end] with the effective step.
std::size_t step_count(const Scenario& scenario);

// Seed history on [-tau(0), 0] at the effective step. dv/dt on the seed is the
// derivative of the seed functions (zero for ballistic seeds).
HistoryBuffer init_history(const Scenario& scenario);

enum class StepStatus { ok, diverged };

// Advances the buffer by one classical RK4 step. Delayed arguments at the stage
// times are read from the dense history. The first call at t = 0 replaces the
// seed derivative at the junction with the model right-hand side, keeping the
// seed value as the left limit.
StepStatus step(HistoryBuffer& buffer, const Scenario& scenario);

// Makes the back knot carry the model right-hand side (idempotent).
void activate(HistoryBuffer& buffer, const Scenario& scenario);

// State at the delayed time s = t - tau(t) for a stage state (x, v) at time t.
StateSample delayed_state(const HistoryBuffer& buffer, const Scenario& scenario, double t,
                          const Matrix& x, const Matrix& v);

}  // namespace delayflock
