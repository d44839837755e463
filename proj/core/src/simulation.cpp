#include "delayflock/simulation.hpp"

#include <cmath>

#include "delayflock/errors.hpp"

namespace delayflock {

namespace {

double fiedler_at(const ModelParams& params, const Matrix& x) {
  if (is_symmetric(params.variant)) return fiedler(laplacian(params, x)).mu;
  // Nonsymmetric weights: the quadratic form only sees the symmetric part.
  const Matrix a = weight_matrix(params, x);
  Matrix sym = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));
  return fiedler(laplacian_from_weights(sym, params.lambda)).mu;
}

double psi_star_at(const ModelParams& params, const Matrix& x) {
  return psi_star_empirical(augment_diagonal(weight_matrix(params, x)));
}

}  // namespace

DiagnosticsRow diagnose(const HistoryBuffer& buffer, const Scenario& scenario, double t,
                        bool structural) {
  const ModelParams& params = scenario.params;
  const StateSample state = buffer.interpolate(t);
  const Matrix vdot = buffer.interpolate_vdot(t, Side::right);

  DiagnosticsRow row;
  row.t = t;
  row.X = variance_X(state.x);
  row.V = variance_V(state.v);
  const Diameters diam = diameters(state.x, state.v);
  row.d_X = diam.d_x;
  row.d_V = diam.d_v;
  row.w_norm_sq = squared_norm(fluctuation(state.v).w);
  row.accel_sq_mean = accel_measure(vdot, AccelMeasure::sum_squares) / static_cast<double>(params.n);
  row.accel_max = accel_measure(vdot, AccelMeasure::max_norm);
  row.normalization_margin = validate_normalization(params, state.x).margin;
  if (structural) {
    row.mu = fiedler_at(params, state.x);
    row.psi_star = psi_star_at(params, state.x);
  } else {
    row.mu = kNaN;
    row.psi_star = kNaN;
  }

  const double tau = scenario.delay(t);
  const WindowIntegrals sq = window_integrals(buffer, t, tau, AccelMeasure::sum_squares);
  const WindowIntegrals mx = window_integrals(buffer, t, tau, AccelMeasure::max_norm);
  const double n = static_cast<double>(params.n);
  row.R_tau = sq.single / n;
  row.sigma_tau = mx.single;
  row.delay_energy_l2 = sq.nested / n;
  row.delay_energy_linf = mx.nested;
  return row;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  HistoryBuffer buffer = init_history(scenario);
  RunResult result;
  result.h = buffer.h();
  const std::size_t stride = scenario.sample_stride;

  if (options.structural) {
    for (std::size_t k = 0; k < buffer.size(); ++k) {
      const bool last = k + 1 == buffer.size();
      if (k % stride != 0 && !last) continue;
      const Matrix& x = buffer[k].x;
      result.seed.mu_min = std::fmin(result.seed.mu_min, fiedler_at(scenario.params, x));
      result.seed.psi_star_min =
          std::fmin(result.seed.psi_star_min, psi_star_at(scenario.params, x));
    }
  }
  activate(buffer, scenario);
  const double tau0 = scenario.delay(0.0);
  result.seed.integral_l2 = window_integrals(buffer, 0.0, tau0, AccelMeasure::sum_squares).nested;
  result.seed.integral_max = window_integrals(buffer, 0.0, tau0, AccelMeasure::max_norm).nested;

  const auto sample = [&]() {
    const Knot& knot = buffer.back();
    const double t = buffer.time_of(knot);
    result.trajectory.push_back({t, knot.x, knot.v});
    result.diagnostics.push_back(diagnose(buffer, scenario, t, options.structural));
  };

  sample();
  const std::size_t steps = step_count(scenario);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (step(buffer, scenario) == StepStatus::diverged) {
      result.status = RunStatus::diverged;
      result.diverged_at = buffer.end_time() + buffer.h();
      return result;
    }
    if (k % stride == 0 || k == steps) sample();
  }
  return result;
}

StructuralCertificate structural_certificate(const RunResult& result) {
  return structural_certificate(result.diagnostics, result.seed.mu_min, result.seed.psi_star_min);
}

}  // namespace delayflock
