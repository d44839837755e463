#include "delayflock/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "delayflock/csv.hpp"
#include "delayflock/errors.hpp"

namespace delayflock {

void ConsensusCriteria::validate() const {
  if (!(eps_v > 0.0) || !std::isfinite(eps_v))
    throw ConfigError("criteria.eps_v: must be > 0, got " + format_number(eps_v));
  if (!(x_growth_factor > 1.0) || !std::isfinite(x_growth_factor))
    throw ConfigError("criteria.x_growth_factor: must be > 1, got " +
                      format_number(x_growth_factor));
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw ConfigError("criteria.t_end: must be > 0, got " + format_number(t_end));
  if (!(h > 0.0) || !std::isfinite(h))
    throw ConfigError("criteria.h: must be > 0, got " + format_number(h));
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::consensus:
      return "consensus";
    case Classification::divergent:
      return "divergent";
    case Classification::undecided:
      return "undecided";
  }
  return "undecided";
}

Classification classify_consensus(const RunResult& result, const ConsensusCriteria& criteria) {
  if (result.status == RunStatus::diverged) return Classification::divergent;
  const auto& rows = result.diagnostics;
  if (rows.size() < 2) return Classification::undecided;

  const DiagnosticsRow& first = rows.front();
  const DiagnosticsRow& last = rows.back();
  const double x_cap = criteria.x_growth_factor * std::max(first.X, 1.0);

  if (last.V < criteria.eps_v && last.X < x_cap) return Classification::consensus;

  const double quarter_start = last.t - 0.25 * (last.t - first.t);
  bool increasing = true;
  std::size_t compared = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k - 1].t < quarter_start) continue;
    ++compared;
    if (!(rows[k].X > rows[k - 1].X)) {
      increasing = false;
      break;
    }
  }
  if (increasing && compared > 0 && last.X > x_cap) return Classification::divergent;
  return Classification::undecided;
}

namespace {

Classification probe_once(const Scenario& tmpl, double tau, double t_end,
                          const ConsensusCriteria& criteria) {
  Scenario s = tmpl;
  s.delay = DelaySpec::constant(tau);
  s.t_end = t_end;
  s.h = criteria.h;
  return classify_consensus(run(s, {.structural = false}), criteria);
}

}  // namespace

ThresholdProbe probe_delay(const Scenario& tmpl, double tau, const ConsensusCriteria& criteria) {
  ThresholdProbe probe;
  probe.tau = tau;
  probe.t_end = criteria.t_end;
  probe.raw = probe_once(tmpl, tau, criteria.t_end, criteria);
  probe.verdict = probe.raw;
  if (probe.raw == Classification::undecided) {
    probe.extended = true;
    probe.t_end = 2.0 * criteria.t_end;
    probe.raw = probe_once(tmpl, tau, probe.t_end, criteria);
    probe.verdict =
        probe.raw == Classification::consensus ? Classification::consensus : Classification::divergent;
  }
  return probe;
}

ThresholdReport threshold_bisect(const Scenario& tmpl, double tau_min, double tau_max, double tol,
                                 const ConsensusCriteria& criteria) {
  criteria.validate();
  if (!std::isfinite(tau_min) || !std::isfinite(tau_max) || tau_min < 0.0)
    throw BracketError("threshold: delays must be finite and >= 0");
  if (!(tau_min < tau_max))
    throw BracketError("threshold: empty bracket [" + format_number(tau_min) + ", " +
                       format_number(tau_max) + "]");
  if (!(tol > 0.0)) throw BracketError("threshold: tolerance must be > 0");

  ThresholdReport report;
  report.tol = tol;
  report.criteria = criteria;

  const ThresholdProbe lo = probe_delay(tmpl, tau_min, criteria);
  report.probes.push_back(lo);
  const ThresholdProbe hi = probe_delay(tmpl, tau_max, criteria);
  report.probes.push_back(hi);
  if (lo.verdict != Classification::consensus || hi.verdict != Classification::divergent) {
    std::ostringstream msg;
    msg << "threshold: endpoints do not bracket a transition (tau=" << format_number(tau_min)
        << " -> " << to_string(lo.verdict) << ", tau=" << format_number(tau_max) << " -> "
        << to_string(hi.verdict) << ")";
    throw BracketError(msg.str());
  }

  double a = tau_min;
  double b = tau_max;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    const ThresholdProbe p = probe_delay(tmpl, mid, criteria);
    report.probes.push_back(p);
    if (p.verdict == Classification::consensus)
      a = mid;
    else
      b = mid;
  }
  report.tau_lo = a;
  report.tau_hi = b;
  return report;
}

std::string format_report(const ThresholdReport& report) {
  std::ostringstream out;
  out << "threshold bracket: [" << format_number(report.tau_lo) << ", "
      << format_number(report.tau_hi) << "]\n";
  out << "tolerance: " << format_number(report.tol) << "\n";
  out << "criteria: eps_v=" << format_number(report.criteria.eps_v)
      << " x_growth_factor=" << format_number(report.criteria.x_growth_factor)
      << " T=" << format_number(report.criteria.t_end) << " h=" << format_number(report.criteria.h)
      << "\n";
  out << "probes:\n";
  for (const ThresholdProbe& p : report.probes) {
    out << "  tau=" << format_number(p.tau) << " T=" << format_number(p.t_end) << " "
        << to_string(p.verdict);
    if (p.extended) out << " (extended, raw " << to_string(p.raw) << ")";
    out << "\n";
  }
  return out.str();
}

Scenario section4_scenario(double tau, double t_end) {
  Scenario s;
  s.params.n = 3;
  s.params.d = 2;
  s.params.lambda = 1.0;
  s.params.variant = ModelVariant::main_delay;
  s.params.potential = Potential::cucker_smale(2.0);
  s.delay = DelaySpec::constant(tau);
  s.initial = BallisticHistory{Matrix::from_rows({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}),
                               Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.5, 0.5}})};
  s.h = 0.01;
  s.t_end = t_end;
  s.sample_stride = 10;
  return s;
}

Section4Report run_section4(const ConsensusCriteria& criteria) {
  Section4Report report;
  report.criteria = criteria;
  const struct {
    const char* name;
    double tau;
    double t_end;
  } plan[] = {{"tau0_T10", 0.0, 10.0}, {"tau0_T50", 0.0, 50.0}, {"tau5_T20", 5.0, 20.0}};
  for (const auto& item : plan) {
    NamedRun r;
    r.name = item.name;
    r.tau = item.tau;
    r.scenario = section4_scenario(item.tau, item.t_end);
    r.result = run(r.scenario);
    r.classification = classify_consensus(r.result, criteria);
    report.runs.push_back(std::move(r));
  }
  return report;
}

std::string format_summary(const Section4Report& report) {
  std::ostringstream out;
  out << "three agents, d=2, beta=2, lambda=1, h=0.01, ballistic seed\n";
  out << "criteria: eps_v=" << format_number(report.criteria.eps_v)
      << " x_growth_factor=" << format_number(report.criteria.x_growth_factor) << "\n";
  out << "run,tau,T,classification,X0,XT,VT,dV0,dVT\n";
  for (const NamedRun& r : report.runs) {
    const auto& rows = r.result.diagnostics;
    out << r.name << "," << format_number(r.tau) << "," << format_number(rows.back().t) << ","
        << to_string(r.classification) << "," << format_number(rows.front().X) << ","
        << format_number(rows.back().X) << "," << format_number(rows.back().V) << ","
        << format_number(rows.front().d_V) << "," << format_number(rows.back().d_V) << "\n";
  }
  return out.str();
}

Section4Report reproduce_section4(const std::filesystem::path& out_dir,
                                  const ConsensusCriteria& criteria) {
  Section4Report report = run_section4(criteria);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  for (const NamedRun& r : report.runs) {
    const std::string traj =
        trajectory_csv(r.result.trajectory, r.scenario.params.n, r.scenario.params.d);
    write_file(out_dir / (r.name + ".csv"), traj);
    const auto run_dir = out_dir / r.name;
    std::filesystem::create_directories(run_dir, ec);
    if (ec) throw IoError("cannot create '" + run_dir.string() + "': " + ec.message());
    write_file(run_dir / "trajectory.csv", traj);
    write_file(run_dir / "diagnostics.csv", diagnostics_csv(r.result.diagnostics));
  }
  write_file(out_dir / "summary.txt", format_summary(report));
  return report;
}

namespace {

CertificateEntry evaluate(CertificateKind kind, CertificateReport& report,
                          const Scenario& scenario) {
  CertificateEntry entry;
  entry.kind = kind;
  const auto& rows = report.run.diagnostics;
  if (report.run.status == RunStatus::diverged) {
    entry.status = "fail";
    entry.note = "run diverged";
    return entry;
  }
  if (kind == CertificateKind::l2 && !is_symmetric(scenario.params.variant)) {
    entry.status = "not applicable";
    entry.note = "L2 certificate needs symmetric weights";
    return entry;
  }
  if (kind == CertificateKind::linf && !(report.normalization_margin > 0.0)) {
    entry.status = "not applicable";
    entry.note = "normalization (1/N) sum_{j!=i} a_ij < 1 violated";
    return entry;
  }
  const double structural =
      kind == CertificateKind::l2 ? report.structural.gamma_emp : report.structural.psi_star_emp;
  if (!(structural > 0.0)) {
    entry.status = "not applicable";
    entry.note = kind == CertificateKind::l2 ? "empirical gamma is not positive"
                                             : "empirical psi* is not positive";
    return entry;
  }

  const DelayBounds db = delay_bounds(scenario.delay);
  const TheoremBounds bounds =
      kind == CertificateKind::l2
          ? bounds_L2(scenario.params.lambda, structural, db.tau_bar, db.c,
                      report.run.seed.integral_l2, rows.front().V, scenario.params.n)
          : bounds_Linf(scenario.params.lambda, structural, db.tau_bar, db.c,
                        report.run.seed.integral_max, rows.front().d_V);
  entry.bounds = bounds;
  if (!bounds.valid) {
    entry.status = "delay above threshold";
    return entry;
  }
  entry.check = verify_bound(rows, bounds);
  apply_bounds(report.run.diagnostics, bounds);
  entry.monotonicity = max_relative_increase(report.run.diagnostics, bounds);
  entry.pass = entry.check->pass;
  entry.status = entry.pass ? "pass" : "fail";
  return entry;
}

}  // namespace

CertificateReport certificate_report(const Scenario& scenario, CertificateSelection which,
                                     const ConsensusCriteria& criteria) {
  CertificateReport report;
  report.run = run(scenario);
  report.classification = classify_consensus(report.run, criteria);
  report.structural = structural_certificate(report.run);
  report.normalization_margin = std::numeric_limits<double>::infinity();
  for (const DiagnosticsRow& row : report.run.diagnostics)
    report.normalization_margin = std::fmin(report.normalization_margin, row.normalization_margin);

  if (which != CertificateSelection::linf)
    report.entries.push_back(evaluate(CertificateKind::l2, report, scenario));
  if (which != CertificateSelection::l2)
    report.entries.push_back(evaluate(CertificateKind::linf, report, scenario));
  return report;
}

std::string format_report(const CertificateReport& report) {
  std::ostringstream out;
  const auto& rows = report.run.diagnostics;
  out << "classification: " << to_string(report.classification) << "\n";
  out << "samples: " << rows.size() << "\n";
  out << "gamma_emp: " << format_number(report.structural.gamma_emp) << "\n";
  out << "psi_star_emp: " << format_number(report.structural.psi_star_emp) << "\n";
  out << "normalization_margin: " << format_number(report.normalization_margin) << "\n";
  for (const CertificateEntry& e : report.entries) {
    out << "[" << to_string(e.kind) << "] " << e.status;
    if (!e.note.empty()) out << " (" << e.note << ")";
    out << "\n";
    if (e.bounds) {
      const TheoremBounds& b = *e.bounds;
      out << "  tau_bar=" << format_number(b.tau_bar) << " c=" << format_number(b.c)
          << " tau0=" << format_number(b.tau0) << " delay_measure=" << format_number(b.delay_measure)
          << "\n";
      if (b.valid)
        out << "  beta=" << format_number(*b.beta) << " r=" << format_number(*b.r)
            << " C=" << format_number(*b.C) << "\n";
    }
    if (e.check)
      out << "  max_violation=" << format_number(e.check->max_violation)
          << " at t=" << format_number(e.check->worst_time) << "\n";
    if (e.monotonicity)
      out << "  functional max relative increase=" << format_number(*e.monotonicity) << "\n";
  }
  return out.str();
}

}  // namespace delayflock
