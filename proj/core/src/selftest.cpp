#include "delayflock/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "delayflock/csv.hpp"
#include "delayflock/errors.hpp"
#include "delayflock/experiments.hpp"

namespace delayflock {

namespace {

using Rng = std::mt19937_64;

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(rows, cols);
  for (double& value : m.values()) value = u(rng);
  return m;
}

ModelParams random_params(Rng& rng) {
  ModelParams p;
  p.n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
  p.d = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  p.lambda = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
  p.potential = Potential::cucker_smale(std::uniform_real_distribution<double>(0.0, 3.0)(rng));
  return p;
}

double rel_err(double a, double b) { return std::fabs(a - b) / std::fmax(1e-300, std::fabs(b)); }

struct Check {
  const char* name;
  std::function<std::string(Rng&)> body;  // empty string on success
};

std::string variance_identity(Rng& rng) {
  for (int k = 0; k < 200; ++k) {
    const ModelParams p = random_params(rng);
    const Matrix v = random_matrix(rng, p.n, p.d, 2.0);
    const double lhs = variance_V(v);
    const double rhs = squared_norm(fluctuation(v).w) / static_cast<double>(p.n);
    if (rel_err(lhs, rhs) > 1e-12) return "V = ||w||^2 / N violated: " + format_number(lhs);
  }
  return {};
}

std::string quadratic_form(Rng& rng) {
  for (int k = 0; k < 200; ++k) {
    const ModelParams p = random_params(rng);
    const Matrix x = random_matrix(rng, p.n, p.d, 3.0);
    const Matrix v = random_matrix(rng, p.n, p.d, 2.0);
    const Matrix l = laplacian(p, x);
    const Matrix w = weight_matrix(p, x);
    const Matrix lv = l * v;
    double lhs = 0.0;
    for (std::size_t i = 0; i < lv.values().size(); ++i) lhs += lv.values()[i] * v.values()[i];
    double rhs = 0.0;
    for (std::size_t i = 0; i < p.n; ++i)
      for (std::size_t j = 0; j < p.n; ++j) {
        const double dist = row_distance(v, i, v, j);
        rhs += w(i, j) * dist * dist;
      }
    rhs *= p.lambda / (2.0 * static_cast<double>(p.n));
    if (rel_err(lhs, rhs) > 1e-12 && std::fabs(lhs - rhs) > 1e-14)
      return "<Lv, v> mismatch: " + format_number(lhs) + " vs " + format_number(rhs);
  }
  return {};
}

std::string consensus_fixed_point(Rng& rng) {
  for (int k = 0; k < 50; ++k) {
    ModelParams p = random_params(rng);
    for (const ModelVariant variant : {ModelVariant::main_delay, ModelVariant::full_sum_baseline}) {
      p.variant = variant;
      const Matrix xd = random_matrix(rng, p.n, p.d, 3.0);
      Matrix v(p.n, p.d);
      const Matrix common = random_matrix(rng, 1, p.d, 1.0);
      for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t c = 0; c < p.d; ++c) v(i, c) = common(0, c);
      const Matrix dv = velocity_field(p, v, xd, v);
      if (dv.max_abs() > 1e-14) return std::string(to_string(variant)) + ": aligned flock accelerates";
    }
  }
  return {};
}

std::string symmetric_weights(Rng& rng) {
  for (int k = 0; k < 100; ++k) {
    const ModelParams p = random_params(rng);
    const Matrix w = weight_matrix(p, random_matrix(rng, p.n, p.d, 3.0));
    if (!(w == w.transposed())) return "main_delay weights not symmetric";
    for (const double value : w.values())
      if (value < 0.0 || value > 1.0) return "weight outside [0, 1]";
  }
  return {};
}

std::string jacobi_reconstruction(Rng& rng) {
  for (int k = 0; k < 50; ++k) {
    const ModelParams p = random_params(rng);
    const Matrix l = laplacian(p, random_matrix(rng, p.n, p.d, 2.0));
    const SymmetricEigen eig = jacobi_eigen(l);
    Matrix back(p.n, p.n);
    for (std::size_t i = 0; i < p.n; ++i)
      for (std::size_t j = 0; j < p.n; ++j)
        for (std::size_t m = 0; m < p.n; ++m)
          back(i, j) += eig.vectors(i, m) * eig.values[m] * eig.vectors(j, m);
    back.add_scaled(l, -1.0);
    if (back.frobenius_norm() > 1e-9 * std::fmax(1.0, l.frobenius_norm()))
      return "Q diag(mu) Q^T does not reproduce L";
    if (eig.values.front() < -1e-12 * l.frobenius_norm()) return "negative Laplacian eigenvalue";
  }
  return {};
}

std::string uniform_fiedler(Rng& rng) {
  for (std::size_t n = 2; n <= 8; ++n) {
    ModelParams p;
    p.n = n;
    p.d = 2;
    p.lambda = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const double psi0 = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    p.potential = Potential::constant(psi0);
    const double mu = fiedler(laplacian(p, random_matrix(rng, n, 2, 1.0))).mu;
    if (rel_err(mu, p.lambda * psi0) > 1e-10) return "complete graph Fiedler number != lambda psi0";
  }
  return {};
}

std::string delay_derivative(Rng& rng) {
  for (int k = 0; k < 50; ++k) {
    const double b = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double omega = std::uniform_real_distribution<double>(0.0, 0.99)(rng) / std::fmax(b, 1e-3);
    const DelaySpec d = DelaySpec::sinusoidal(b + 0.1, b, omega);
    const double dt = 1e-6;
    for (double t = 0.0; t < 20.0; t += 0.37) {
      const double slope = (d(t + dt) - d(t - dt)) / (2.0 * dt);
      if (std::fabs(slope) > d.c() + 1e-6) return "|tau'| exceeds c";
      if (d(t) < 0.0 || d(t) > d.tau_bar() + 1e-15) return "tau outside [0, tau_bar]";
    }
  }
  return {};
}

std::string determinism(Rng&) {
  const Scenario s = section4_scenario(0.5, 2.0);
  const RunResult a = run(s);
  const RunResult b = run(s);
  if (diagnostics_csv(a.diagnostics) != diagnostics_csv(b.diagnostics)) return "diagnostics differ";
  if (trajectory_csv(a.trajectory, 3, 2) != trajectory_csv(b.trajectory, 3, 2))
    return "trajectories differ";
  return {};
}

std::string mean_velocity(Rng&) {
  const Scenario s = section4_scenario(0.0, 10.0);
  const RunResult r = run(s, {.structural = false});
  const std::vector<double> m0 = fluctuation(r.trajectory.front().v).mean;
  const std::vector<double> m1 = fluctuation(r.trajectory.back().v).mean;
  double drift = 0.0;
  for (std::size_t k = 0; k < m0.size(); ++k) drift = std::fmax(drift, std::fabs(m1[k] - m0[k]));
  if (drift > 1e-10) return "mean velocity drifted by " + format_number(drift);
  return {};
}

}  // namespace

std::vector<SelftestResult> run_selftest(std::uint64_t seed) {
  const Check checks[] = {
      {"variance identity", variance_identity},
      {"laplacian quadratic form", quadratic_form},
      {"consensus fixed point", consensus_fixed_point},
      {"symmetric bounded weights", symmetric_weights},
      {"jacobi reconstruction", jacobi_reconstruction},
      {"complete graph fiedler", uniform_fiedler},
      {"delay derivative bound", delay_derivative},
      {"run determinism", determinism},
      {"undelayed mean velocity", mean_velocity},
  };
  Rng rng(seed);
  std::vector<SelftestResult> out;
  for (const Check& check : checks) {
    SelftestResult result;
    result.name = check.name;
    try {
      result.detail = check.body(rng);
      result.pass = result.detail.empty();
    } catch (const Error& e) {
      result.detail = e.what();
    }
    out.push_back(std::move(result));
  }
  return out;
}

}  // namespace delayflock
