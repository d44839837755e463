#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delayflock/simulation.hpp"

namespace delayflock {

// Finite-horizon stand-ins for "sup X < inf and V -> 0".
struct ConsensusCriteria {
  double eps_v = 1e-3;
  double x_growth_factor = 5.0;
  double t_end = 200.0;  // horizon for threshold probes
  double h = 0.01;

  void validate() const;

  friend bool operator==(const ConsensusCriteria&, const ConsensusCriteria&) = default;
};

enum class Classification { consensus, divergent, undecided };

std::string_view to_string(Classification c) noexcept;

// consensus:  V(T) < eps_v and X(T) < factor max(X(0), 1)
// divergent:  the run diverged, or X strictly increases over the final
//             quarter of the samples' time span and X(T) > factor max(X(0), 1)
// undecided:  anything else (including runs with fewer than two samples)
Classification classify_consensus(const RunResult& result, const ConsensusCriteria& criteria);

struct ThresholdProbe {
  double tau = 0.0;
  double t_end = 0.0;  // horizon of the deciding run
  Classification raw = Classification::undecided;
  Classification verdict = Classification::undecided;  // undecided folded into divergent
  bool extended = false;
};

struct ThresholdReport {
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  double tol = 0.0;
  ConsensusCriteria criteria;
  std::vector<ThresholdProbe> probes;
};

// Runs the template with a constant delay tau, horizon criteria.t_end and
// step criteria.h. Undecided runs are repeated once on twice the horizon and
// then counted as divergent.
ThresholdProbe probe_delay(const Scenario& tmpl, double tau, const ConsensusCriteria& criteria);

// Bisection on a constant delay. Throws BracketError when tau_min >= tau_max
// or when the endpoints are not (consensus, divergent).
ThresholdReport threshold_bisect(const Scenario& tmpl, double tau_min, double tau_max, double tol,
                                 const ConsensusCriteria& criteria);

std::string format_report(const ThresholdReport& report);

// The three-agent planar scenario with beta = 2, lambda = 1 and ballistic seed.
Scenario section4_scenario(double tau, double t_end);

struct NamedRun {
  std::string name;
  double tau = 0.0;
  Scenario scenario;
  RunResult result;
  Classification classification = Classification::undecided;
};

struct Section4Report {
  ConsensusCriteria criteria;
  std::vector<NamedRun> runs;  // tau0_T10, tau0_T50, tau5_T20
};

Section4Report run_section4(const ConsensusCriteria& criteria = {});

std::string format_summary(const Section4Report& report);

// run_section4 plus its files under out_dir: <name>.csv (trajectory),
// <name>/trajectory.csv, <name>/diagnostics.csv and summary.txt.
Section4Report reproduce_section4(const std::filesystem::path& out_dir,
                                  const ConsensusCriteria& criteria = {});

enum class CertificateSelection { l2, linf, both };

struct CertificateEntry {
  CertificateKind kind = CertificateKind::l2;
  // "pass", "fail", "delay above threshold", "not applicable"
  std::string status;
  std::string note;
  std::optional<TheoremBounds> bounds;
  std::optional<BoundCheck> check;
  std::optional<double> monotonicity;  // max relative increase of e^{rt} functional
  bool pass = false;
};

struct CertificateReport {
  RunResult run;
  Classification classification = Classification::undecided;
  StructuralCertificate structural;
  double normalization_margin = 0.0;  // min over samples
  std::vector<CertificateEntry> entries;
};

// Simulates the scenario, measures gamma and psi* along the trajectory and
// its seed, evaluates the L2 and/or Linf certificates and checks them against
// the sampled V and d_V. The run's diagnostics carry the functional and bound
// columns afterwards.
CertificateReport certificate_report(const Scenario& scenario, CertificateSelection which,
                                     const ConsensusCriteria& criteria = {});

std::string format_report(const CertificateReport& report);

}  // namespace delayflock
