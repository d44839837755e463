#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delayflock/delay.hpp"
#include "delayflock/history.hpp"
#include "delayflock/matrix.hpp"

namespace delayflock {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// (1/2N^2) sum over ordered pairs of squared row distances.
double variance(const Matrix& a);
inline double variance_X(const Matrix& x) { return variance(x); }
inline double variance_V(const Matrix& v) { return variance(v); }

struct Fluctuation {
  std::vector<double> mean;  // length d
  Matrix w;                  // w_i = v_i - mean
};

// Mean by compensated summation, so sum_i w_i vanishes to rounding.
Fluctuation fluctuation(const Matrix& v);

double squared_norm(const Matrix& a);

// max_{i,j} |a_i - a_j|
double diameter(const Matrix& a);

struct Diameters {
  double d_x = 0.0;
  double d_v = 0.0;
};

Diameters diameters(const Matrix& x, const Matrix& v);

enum class AccelMeasure {
  sum_squares,  // sum_i |dv_i/dt|^2
  max_norm,     // max_j |dv_j/dt|
};

double accel_measure(const Matrix& vdot, AccelMeasure measure);

// Integrals of an acceleration measure g over the delay window [t - tau, t]:
//   single = int g(s) ds
//   nested = int e^{-(t-s)} int_s^t g(sigma) dsigma ds
// Composite trapezoid on the history grid; a window edge falling inside a cell
// reads dv/dt from the Hermite interpolant. One-sided derivatives are used at
// each cell end, so the jump at the seed junction is integrated correctly.
struct WindowIntegrals {
  double single = 0.0;
  double nested = 0.0;
};

WindowIntegrals window_integrals(const HistoryBuffer& buffer, double t, double tau,
                                 AccelMeasure measure);

// (1/N) int_{t-tau(t)}^t sum_i |dv_i/dt|^2
double r_tau(const HistoryBuffer& buffer, double t, const DelaySpec& delay);
// int_{t-tau(t)}^t max_j |dv_j/dt|
double sigma_tau(const HistoryBuffer& buffer, double t, const DelaySpec& delay);

// (1/2N) ||w(t)||^2 + (beta/N) nested(sum_squares)
double lyapunov_L2(const HistoryBuffer& buffer, double t, double beta, const DelaySpec& delay);
// d_V(t) + beta nested(max_norm)
double lyapunov_Linf(const HistoryBuffer& buffer, double t, double beta, const DelaySpec& delay);

struct DiagnosticsRow {
  double t = 0.0;
  double X = 0.0;
  double V = 0.0;
  double d_X = 0.0;
  double d_V = 0.0;
  double mu = 0.0;
  double psi_star = 0.0;
  double R_tau = 0.0;
  double sigma_tau = 0.0;
  double lyap_L2 = kNaN;
  double lyap_Linf = kNaN;
  double bound_V = kNaN;
  double bound_dV = kNaN;

  // Beta-free pieces of the functionals: lyap_L2 = V/2 + beta * delay_energy_l2
  // and lyap_Linf = d_V + beta * delay_energy_linf.
  double delay_energy_l2 = 0.0;
  double delay_energy_linf = 0.0;
  double accel_sq_mean = 0.0;  // (1/N) sum_i |dv_i/dt|^2
  double accel_max = 0.0;      // max_j |dv_j/dt|
  double w_norm_sq = 0.0;      // ||v - mean||^2
  double normalization_margin = 0.0;
};

enum class CertificateKind { l2, linf };

std::string to_string(CertificateKind kind);

// Delay threshold, decay rate and constant of the exponential consensus
// estimates. r, C and beta are present only when the delay condition holds.
struct TheoremBounds {
  CertificateKind which = CertificateKind::l2;
  double tau0 = 0.0;
  double delay_measure = 0.0;  // tau_bar^2 e^tau_bar (L2) or tau_bar e^tau_bar (Linf)
  bool valid = false;
  std::optional<double> beta;
  std::optional<double> r;
  std::optional<double> C;

  double lambda = 0.0;
  double structural = 0.0;  // gamma (L2) or psi* (Linf)
  double tau_bar = 0.0;
  double c = 0.0;
  double seed_integral = 0.0;
  double initial_value = 0.0;  // V(0) or d_V(0)
};

// seed_integral = int_{-tau(0)}^0 e^s int_s^0 sum_i |dv_i/dt|^2 over the seed.
// Throws DomainError unless gamma > 0, lambda > 0, 0 <= c < 1, tau_bar >= 0.
TheoremBounds bounds_L2(double lambda, double gamma, double tau_bar, double c,
                        double seed_integral, double v0, std::size_t n);

// seed_integral_max = int_{-tau(0)}^0 e^s int_s^0 max_j |dv_j/dt| over the seed.
TheoremBounds bounds_Linf(double lambda, double psi_star, double tau_bar, double c,
                          double seed_integral_max, double dv0);

// Slack applied by verify_bound: pass iff every ratio - 1 <= this.
inline constexpr double kBoundSlack = 1e-6;

struct BoundCheck {
  bool refused = false;
  std::string reason;
  double max_violation = -1.0;  // max over samples of value / (C e^{-rt}) - 1
  double worst_time = 0.0;
  bool pass = false;
};

BoundCheck verify_bound(std::span<const DiagnosticsRow> rows, const TheoremBounds& bounds);

// Fills lyap_* and bound_* columns from a valid certificate (no-op otherwise).
void apply_bounds(std::span<DiagnosticsRow> rows, const TheoremBounds& bounds);

// Largest relative increase of e^{rt} times the functional between
// consecutive samples. Nonpositive means monotone.
double max_relative_increase(std::span<const DiagnosticsRow> rows, const TheoremBounds& bounds);

// Margins of the pointwise acceleration estimates (>= 0 when they hold):
//   (1/N) sum |dv_i|^2 <= 4 (lambda^2/N) ||w||^2 + 2 lambda^2 tau_bar R_tau
double accel_l2_margin(const DiagnosticsRow& row, double lambda, double tau_bar, std::size_t n);
//   max_j |dv_j| <= lambda d_V + lambda sigma_tau
double accel_max_margin(const DiagnosticsRow& row, double lambda);

}  // namespace delayflock
