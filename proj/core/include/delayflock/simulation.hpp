#pragma once

#include <limits>
#include <vector>

#include "delayflock/integrator.hpp"
#include "delayflock/metrics.hpp"
#include "delayflock/spectral.hpp"

namespace delayflock {

struct TrajectoryRow {
  double t = 0.0;
  Matrix x;
  Matrix v;
};

enum class RunStatus { completed, diverged };

// Quantities of the seed segment [-tau(0), 0] needed by the certificates.
struct SeedSummary {
  double mu_min = std::numeric_limits<double>::infinity();
  double psi_star_min = std::numeric_limits<double>::infinity();
  // int_{-tau(0)}^0 e^s int_s^0 sum_i |dv_i/dt|^2
  double integral_l2 = 0.0;
  // int_{-tau(0)}^0 e^s int_s^0 max_j |dv_j/dt|
  double integral_max = 0.0;
};

struct RunResult {
  std::vector<TrajectoryRow> trajectory;
  std::vector<DiagnosticsRow> diagnostics;
  RunStatus status = RunStatus::completed;
  double diverged_at = kNaN;
  double h = 0.0;  // effective step
  SeedSummary seed;
};

struct RunOptions {
  // Fiedler number and pairwise min-sum per sample. Costs O(N^3) + O(N^4).
  bool structural = true;
};

// Diagnostics at time t (a stored knot at or before the buffer end).
DiagnosticsRow diagnose(const HistoryBuffer& buffer, const Scenario& scenario, double t,
                        bool structural = true);

// Integrates [0, t_end], sampling every sample_stride steps plus the final
// step. A divergent state ends the run with status diverged; rows up to that
// point are kept.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

StructuralCertificate structural_certificate(const RunResult& result);

}  // namespace delayflock
