#pragma once

namespace delayflock {

enum class DelayKind { constant, sinusoidal };

// Time-varying delay tau(t). Only closed-form families are offered so that the
// bounds tau_bar = sup tau and c = sup |tau'| are exact.
//
//   constant:   tau(t) = tau
//   sinusoidal: tau(t) = a + b sin(omega t)
//
// Construction enforces tau >= 0 everywhere and c < 1.
class DelaySpec {
 public:
  static DelaySpec constant(double tau);
  static DelaySpec sinusoidal(double a, double b, double omega);

  DelayKind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double omega() const noexcept { return omega_; }

  double operator()(double t) const noexcept;

  double tau_bar() const noexcept;
  double c() const noexcept;
  bool is_zero() const noexcept { return tau_bar() == 0.0; }

  friend bool operator==(const DelaySpec&, const DelaySpec&) = default;

 private:
  DelaySpec() = default;

  DelayKind kind_ = DelayKind::constant;
  double a_ = 0.0;  // constant value, or sinusoid offset
  double b_ = 0.0;
  double omega_ = 0.0;
};

struct DelayBounds {
  double tau_bar = 0.0;
  double c = 0.0;
};

double tau_eval(const DelaySpec& spec, double t) noexcept;
DelayBounds delay_bounds(const DelaySpec& spec) noexcept;

}  // namespace delayflock
