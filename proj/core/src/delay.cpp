#include "delayflock/delay.hpp"

#include <cmath>
#include <sstream>

#include "delayflock/errors.hpp"

namespace delayflock {

DelaySpec DelaySpec::constant(double tau) {
  if (!std::isfinite(tau) || tau < 0.0) throw ConfigError("delay: tau must be finite and >= 0");
  DelaySpec spec;
  spec.kind_ = DelayKind::constant;
  spec.a_ = tau;
  return spec;
}

DelaySpec DelaySpec::sinusoidal(double a, double b, double omega) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(omega))
    throw ConfigError("delay: sinusoid parameters must be finite");
  if (b < 0.0 || omega < 0.0) throw ConfigError("delay: sinusoid needs b >= 0 and omega >= 0");
  if (a - b < 0.0) {
    std::ostringstream msg;
    msg << "delay: tau(t) = a + b sin(omega t) must stay >= 0, but a - b = " << a - b;
    throw ConfigError(msg.str());
  }
  if (!(b * omega < 1.0)) {
    std::ostringstream msg;
    msg << "delay: derivative bound c = b*omega = " << b * omega << " must be < 1";
    throw ConfigError(msg.str());
  }
  DelaySpec spec;
  spec.kind_ = DelayKind::sinusoidal;
  spec.a_ = a;
  spec.b_ = b;
  spec.omega_ = omega;
  return spec;
}

double DelaySpec::operator()(double t) const noexcept {
  if (kind_ == DelayKind::constant) return a_;
  // a >= b keeps the sum nonnegative; fmax guards the a == b rounding edge.
  return std::fmax(0.0, a_ + b_ * std::sin(omega_ * t));
}

double DelaySpec::tau_bar() const noexcept { return kind_ == DelayKind::constant ? a_ : a_ + b_; }

double DelaySpec::c() const noexcept { return kind_ == DelayKind::constant ? 0.0 : b_ * omega_; }

double tau_eval(const DelaySpec& spec, double t) noexcept { return spec(t); }

DelayBounds delay_bounds(const DelaySpec& spec) noexcept { return {spec.tau_bar(), spec.c()}; }

}  // namespace delayflock
