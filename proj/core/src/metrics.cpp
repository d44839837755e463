#include "delayflock/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delayflock/errors.hpp"

namespace delayflock {

double variance(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = row_distance(a, i, a, j);
      s += dist * dist;
    }
  // Ordered pairs count each unordered pair twice.
  return 2.0 * s / (2.0 * static_cast<double>(n * n));
}

Fluctuation fluctuation(const Matrix& v) {
  const std::size_t n = v.rows();
  const std::size_t d = v.cols();
  Fluctuation out{std::vector<double>(d, 0.0), v};
  for (std::size_t k = 0; k < d; ++k) {
    // Neumaier summation
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double value = v(i, k);
      const double next = sum + value;
      comp += std::fabs(sum) >= std::fabs(value) ? (sum - next) + value : (value - next) + sum;
      sum = next;
    }
    out.mean[k] = (sum + comp) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.w(i, k) = v(i, k) - out.mean[k];
  }
  return out;
}

double squared_norm(const Matrix& a) {
  double s = 0.0;
  for (double value : a.values()) s += value * value;
  return s;
}

double diameter(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.rows(); ++j) best = std::fmax(best, row_distance(a, i, a, j));
  return best;
}

Diameters diameters(const Matrix& x, const Matrix& v) { return {diameter(x), diameter(v)}; }

double accel_measure(const Matrix& vdot, AccelMeasure measure) {
  if (measure == AccelMeasure::sum_squares) return squared_norm(vdot);
  double best = 0.0;
  for (std::size_t i = 0; i < vdot.rows(); ++i) best = std::fmax(best, row_norm(vdot, i));
  return best;
}

WindowIntegrals window_integrals(const HistoryBuffer& buffer, double t, double tau,
                                 AccelMeasure measure) {
  if (tau < 0.0) throw DomainError("window_integrals: negative delay");
  if (tau == 0.0) return {};
  const double start = t - tau;
  if (!buffer.covers(start, t)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "history lookback: window [" << start << ", " << t << "] not covered by ["
        << buffer.start_time() << ", " << buffer.end_time() << "]";
    throw LookbackError(msg.str());
  }

  // Nodes s_0 = start < knots < s_M = t with one-sided integrand values.
  std::vector<double> s;
  std::vector<double> g_right;
  std::vector<double> g_left;
  s.push_back(start);
  g_right.push_back(accel_measure(buffer.interpolate_vdot(start, Side::right), measure));
  g_left.push_back(kNaN);

  const double h = buffer.h();
  const double t0 = buffer.start_time();
  const double snap = 1e-9 * h;
  const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((start - t0) / h)));
  for (std::size_t k = first; k < buffer.size(); ++k) {
    const Knot& knot = buffer[k];
    const double tk = buffer.time_of(knot);
    if (tk <= start + snap) continue;
    if (tk >= t - snap) break;
    s.push_back(tk);
    g_right.push_back(accel_measure(knot.vdot, measure));
    g_left.push_back(accel_measure(knot.left_vdot(), measure));
  }
  s.push_back(t);
  g_right.push_back(kNaN);
  g_left.push_back(accel_measure(buffer.interpolate_vdot(t, Side::left), measure));

  const std::size_t m = s.size() - 1;
  std::vector<double> tail(m + 1, 0.0);  // int_{s_k}^t g
  for (std::size_t k = m; k-- > 0;)
    tail[k] = tail[k + 1] + 0.5 * (s[k + 1] - s[k]) * (g_right[k] + g_left[k + 1]);

  WindowIntegrals out;
  out.single = tail[0];
  for (std::size_t k = 0; k < m; ++k)
    out.nested += 0.5 * (s[k + 1] - s[k]) *
                  (std::exp(-(t - s[k])) * tail[k] + std::exp(-(t - s[k + 1])) * tail[k + 1]);
  return out;
}

double r_tau(const HistoryBuffer& buffer, double t, const DelaySpec& delay) {
  return window_integrals(buffer, t, delay(t), AccelMeasure::sum_squares).single /
         static_cast<double>(buffer.n());
}

double sigma_tau(const HistoryBuffer& buffer, double t, const DelaySpec& delay) {
  return window_integrals(buffer, t, delay(t), AccelMeasure::max_norm).single;
}

double lyapunov_L2(const HistoryBuffer& buffer, double t, double beta, const DelaySpec& delay) {
  const double n = static_cast<double>(buffer.n());
  const Matrix v = buffer.interpolate(t).v;
  const double w2 = squared_norm(fluctuation(v).w);
  const double nested = window_integrals(buffer, t, delay(t), AccelMeasure::sum_squares).nested;
  return w2 / (2.0 * n) + beta / n * nested;
}

double lyapunov_Linf(const HistoryBuffer& buffer, double t, double beta, const DelaySpec& delay) {
  const Matrix v = buffer.interpolate(t).v;
  const double nested = window_integrals(buffer, t, delay(t), AccelMeasure::max_norm).nested;
  return diameter(v) + beta * nested;
}

std::string to_string(CertificateKind kind) { return kind == CertificateKind::l2 ? "L2" : "Linf"; }

namespace {

void check_common(double lambda, double structural, double tau_bar, double c, const char* name) {
  if (!(lambda > 0.0)) throw DomainError("bounds: lambda must be > 0");
  if (!(structural > 0.0)) throw DomainError(std::string("bounds: ") + name + " must be > 0");
  if (!(tau_bar >= 0.0)) throw DomainError("bounds: tau_bar must be >= 0");
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("bounds: c must lie in [0, 1)");
}

}  // namespace

TheoremBounds bounds_L2(double lambda, double gamma, double tau_bar, double c,
                        double seed_integral, double v0, std::size_t n) {
  check_common(lambda, gamma, tau_bar, c, "gamma");
  TheoremBounds b;
  b.which = CertificateKind::l2;
  b.lambda = lambda;
  b.structural = gamma;
  b.tau_bar = tau_bar;
  b.c = c;
  b.seed_integral = seed_integral;
  b.initial_value = v0;

  const double l2 = lambda * lambda;
  const double g2 = gamma * gamma;
  b.tau0 = g2 / (2.0 * l2) * (1.0 - c) / (2.0 * l2 + g2);
  b.delay_measure = tau_bar * tau_bar * std::exp(tau_bar);
  b.valid = b.delay_measure < b.tau0;
  if (!b.valid) return b;

  const double denom = (1.0 - c) * std::exp(-tau_bar) - 2.0 * l2 * tau_bar * tau_bar;
  b.beta = l2 * tau_bar / (2.0 * gamma) / denom;
  b.r = std::fmin(gamma - 4.0 * l2 / gamma * l2 * tau_bar * tau_bar / denom, 1.0);
  b.C = v0 + l2 * tau_bar / (gamma * static_cast<double>(n)) / denom * seed_integral;
  return b;
}

TheoremBounds bounds_Linf(double lambda, double psi_star, double tau_bar, double c,
                          double seed_integral_max, double dv0) {
  check_common(lambda, psi_star, tau_bar, c, "psi*");
  TheoremBounds b;
  b.which = CertificateKind::linf;
  b.lambda = lambda;
  b.structural = psi_star;
  b.tau_bar = tau_bar;
  b.c = c;
  b.seed_integral = seed_integral_max;
  b.initial_value = dv0;

  b.tau0 = (1.0 - c) / lambda * psi_star / (psi_star + 2.0);
  b.delay_measure = tau_bar * std::exp(tau_bar);
  b.valid = b.delay_measure < b.tau0;
  if (!b.valid) return b;

  const double denom = (1.0 - c) * std::exp(-tau_bar) - lambda * tau_bar;
  b.beta = 2.0 * lambda / denom;
  b.r = std::fmin(lambda * (psi_star - 2.0 * lambda * tau_bar / denom), 1.0);
  b.C = dv0 + *b.beta * seed_integral_max;
  return b;
}

BoundCheck verify_bound(std::span<const DiagnosticsRow> rows, const TheoremBounds& bounds) {
  BoundCheck out;
  if (!bounds.valid) {
    out.refused = true;
    out.reason = "delay condition violated";
    return out;
  }
  const double r = *bounds.r;
  const double c = *bounds.C;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (const DiagnosticsRow& row : rows) {
    if (row.t < 0.0) continue;
    const double value = bounds.which == CertificateKind::l2 ? row.V : row.d_V;
    const double bound = c * std::exp(-r * row.t);
    double violation;
    if (bound > 0.0)
      violation = value / bound - 1.0;
    else
      violation = value > 0.0 ? std::numeric_limits<double>::infinity() : -1.0;
    if (violation > out.max_violation) {
      out.max_violation = violation;
      out.worst_time = row.t;
    }
  }
  if (rows.empty()) out.max_violation = -1.0;
  out.pass = out.max_violation <= kBoundSlack;
  return out;
}

void apply_bounds(std::span<DiagnosticsRow> rows, const TheoremBounds& bounds) {
  if (!bounds.valid) return;
  const double beta = *bounds.beta;
  for (DiagnosticsRow& row : rows) {
    const double bound = *bounds.C * std::exp(-*bounds.r * row.t);
    if (bounds.which == CertificateKind::l2) {
      row.lyap_L2 = 0.5 * row.V + beta * row.delay_energy_l2;
      row.bound_V = bound;
    } else {
      row.lyap_Linf = row.d_V + beta * row.delay_energy_linf;
      row.bound_dV = bound;
    }
  }
}

double max_relative_increase(std::span<const DiagnosticsRow> rows, const TheoremBounds& bounds) {
  if (!bounds.valid) throw DomainError("max_relative_increase: certificate not valid");
  const double beta = *bounds.beta;
  const double r = *bounds.r;
  const auto weighted = [&](const DiagnosticsRow& row) {
    const double f = bounds.which == CertificateKind::l2
                         ? 0.5 * row.V + beta * row.delay_energy_l2
                         : row.d_V + beta * row.delay_energy_linf;
    return std::exp(r * row.t) * f;
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double prev = weighted(rows[k - 1]);
    const double next = weighted(rows[k]);
    double rel;
    if (prev > 0.0)
      rel = (next - prev) / prev;
    else
      rel = next > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    worst = std::fmax(worst, rel);
  }
  return rows.size() < 2 ? 0.0 : worst;
}

double accel_l2_margin(const DiagnosticsRow& row, double lambda, double tau_bar, std::size_t n) {
  const double l2 = lambda * lambda;
  return 4.0 * l2 / static_cast<double>(n) * row.w_norm_sq + 2.0 * l2 * tau_bar * row.R_tau -
         row.accel_sq_mean;
}

double accel_max_margin(const DiagnosticsRow& row, double lambda) {
  return lambda * row.d_V + lambda * row.sigma_tau - row.accel_max;
}

}  // namespace delayflock
