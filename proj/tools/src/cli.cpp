#include "delayflock_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "delayflock/config.hpp"
#include "delayflock/csv.hpp"
#include "delayflock/errors.hpp"
#include "delayflock/experiments.hpp"
#include "delayflock/selftest.hpp"

namespace delayflock::cli {

namespace fs = std::filesystem;

namespace {

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

std::string run_name(const fs::path& config) {
  const std::string stem = config.stem().string();
  return stem.empty() ? "run" : stem;
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir, std::ostream& out) {
  const ScenarioConfig config = parse_config(config_path);
  const CertificateReport report =
      certificate_report(config.scenario, CertificateSelection::both, config.criteria);
  const RunResult& result = report.run;

  const fs::path run_dir = out_dir / run_name(config_path);
  make_dir(run_dir);
  const ModelParams& p = config.scenario.params;
  write_file(run_dir / "trajectory.csv", trajectory_csv(result.trajectory, p.n, p.d));
  write_file(run_dir / "diagnostics.csv", diagnostics_csv(result.diagnostics));

  std::ostringstream summary;
  summary << "run: " << run_name(config_path) << "\n";
  summary << "status: " << (result.status == RunStatus::completed ? "completed" : "diverged");
  if (result.status == RunStatus::diverged)
    summary << " at t=" << format_number(result.diverged_at);
  summary << "\nh_effective: " << format_number(result.h) << "\n";
  if (!result.diagnostics.empty()) {
    const DiagnosticsRow& last = result.diagnostics.back();
    summary << "T: " << format_number(last.t) << "\nX(T): " << format_number(last.X)
            << "\nV(T): " << format_number(last.V) << "\n";
  }
  summary << format_report(report);
  write_file(out_dir / "summary.txt", summary.str());
  out << summary.str();
  return kExitOk;
}

int cmd_threshold(const fs::path& config_path, double tau_min, double tau_max, double tol,
                  std::optional<double> t_end, const std::optional<fs::path>& out_dir,
                  std::ostream& out) {
  ScenarioConfig config = parse_config(config_path);
  if (t_end) config.criteria.t_end = *t_end;
  config.criteria.validate();
  const ThresholdReport report =
      threshold_bisect(config.scenario, tau_min, tau_max, tol, config.criteria);
  const std::string text = format_report(report);
  out << text;

  std::string csv = "tau,T,verdict,raw,extended\n";
  for (const ThresholdProbe& p : report.probes)
    csv += format_number(p.tau) + "," + format_number(p.t_end) + "," +
           std::string(to_string(p.verdict)) + "," + std::string(to_string(p.raw)) + "," +
           (p.extended ? "1" : "0") + "\n";
  if (out_dir) {
    make_dir(*out_dir);
    write_file(*out_dir / "threshold.txt", text);
    write_file(*out_dir / "probes.csv", csv);
  } else {
    out << "\n" << csv;
  }
  return kExitOk;
}

int cmd_certify(const fs::path& config_path, CertificateSelection which, std::ostream& out) {
  const ScenarioConfig config = parse_config(config_path);
  out << format_report(certificate_report(config.scenario, which, config.criteria));
  return kExitOk;
}

int cmd_repro(const fs::path& out_dir, std::ostream& out) {
  const Section4Report report = reproduce_section4(out_dir);
  out << format_summary(report);
  return kExitOk;
}

int cmd_selftest(std::ostream& out) {
  bool ok = true;
  for (const SelftestResult& r : run_selftest()) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << ": " << r.detail;
    out << "\n";
    ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitDomain;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and certificate checker for delayed Cucker-Smale flocking",
               "delayflock"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;

  auto* simulate = app.add_subcommand("simulate", "Integrate a scenario and write CSVs");
  simulate->add_option("--config", config, "Scenario JSON")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();

  double tau_min = 0.0;
  double tau_max = 0.0;
  double tol = 0.0;
  std::optional<double> t_end;
  auto* threshold = app.add_subcommand("threshold", "Bisect the consensus-loss delay");
  threshold->add_option("--config", config, "Scenario JSON (template)")->required();
  threshold->add_option("--tau-min", tau_min, "Lower delay (must give consensus)")->required();
  threshold->add_option("--tau-max", tau_max, "Upper delay (must lose consensus)")->required();
  threshold->add_option("--tol", tol, "Bracket width")->required();
  threshold->add_option("--t-end", t_end, "Probe horizon (default criteria.t_end)");
  threshold->add_option("--out", out_dir, "Write threshold.txt and probes.csv here");

  bool l2 = false;
  bool linf = false;
  bool both = false;
  auto* certify = app.add_subcommand("certify", "Evaluate the exponential decay certificates");
  certify->add_option("--config", config, "Scenario JSON")->required();
  auto* l2_flag = certify->add_flag("--l2", l2, "Variance certificate only");
  auto* linf_flag = certify->add_flag("--linf", linf, "Diameter certificate only");
  auto* both_flag = certify->add_flag("--both", both, "Both certificates (default)");
  l2_flag->excludes(linf_flag)->excludes(both_flag);
  linf_flag->excludes(both_flag);

  auto* repro = app.add_subcommand("repro-section4", "Reproduce the three-agent experiment");
  repro->add_option("--out", out_dir, "Output directory")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the invariant checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(config, out_dir, out);
    if (*threshold) {
      std::optional<fs::path> dir;
      if (!out_dir.empty()) dir = out_dir;
      return cmd_threshold(config, tau_min, tau_max, tol, t_end, dir, out);
    }
    if (*certify) {
      const CertificateSelection which = l2     ? CertificateSelection::l2
                                         : linf ? CertificateSelection::linf
                                                : CertificateSelection::both;
      return cmd_certify(config, which, out);
    }
    if (*repro) return cmd_repro(out_dir, out);
    if (*selftest) return cmd_selftest(out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace delayflock::cli
