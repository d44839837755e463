#include "delayflock/integrator.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "delayflock/errors.hpp"

namespace delayflock {

namespace {

constexpr double kGridTol = 1e-9;

void check_shape(const Matrix& m, const ModelParams& params, const char* what) {
  if (m.rows() != params.n || m.cols() != params.d) {
    std::ostringstream msg;
    msg << what << ": expected " << params.n << "x" << params.d << ", got " << m.rows() << "x"
        << m.cols();
    throw ConfigError(msg.str());
  }
  if (!m.all_finite()) throw ConfigError(std::string(what) + ": non-finite entries");
}

// Number of grid cells in the seed segment [-m h, 0] covering [-tau(0), 0].
long long seed_cells(double tau0, double h) {
  if (tau0 <= 0.0) return 0;
  return static_cast<long long>(std::ceil(tau0 / h - kGridTol));
}

// Three-point finite-difference derivative on a nonuniform grid.
Matrix fd_derivative(const std::vector<ExplicitSample>& s, std::size_t m) {
  const std::size_t count = s.size();
  Matrix out(s[m].v.rows(), s[m].v.cols());
  auto o = out.values();
  if (count == 1) return out;
  if (count == 2) {
    const double dt = s[1].t - s[0].t;
    for (std::size_t k = 0; k < o.size(); ++k)
      o[k] = (s[1].v.values()[k] - s[0].v.values()[k]) / dt;
    return out;
  }
  // Lagrange derivative through three consecutive samples around m.
  const std::size_t c = m == 0 ? 1 : (m == count - 1 ? count - 2 : m);
  const double t0 = s[c - 1].t, t1 = s[c].t, t2 = s[c + 1].t, t = s[m].t;
  const double w0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2));
  const double w1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2));
  const double w2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
  const auto v0 = s[c - 1].v.values(), v1 = s[c].v.values(), v2 = s[c + 1].v.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = w0 * v0[k] + w1 * v1[k] + w2 * v2[k];
  return out;
}

// Cubic Hermite evaluation of the explicit seed at an arbitrary time.
Knot explicit_knot(const std::vector<ExplicitSample>& s, const std::vector<Matrix>& vdot,
                   long long index, double t) {
  std::size_t m = 0;
  while (m + 1 < s.size() && s[m + 1].t < t) ++m;
  const double tol = kGridTol * std::fmax(1.0, std::fabs(t));
  Knot knot;
  knot.index = index;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (std::fabs(s[j].t - t) <= tol) {
      knot.x = s[j].x;
      knot.v = s[j].v;
      knot.vdot = vdot[j];
      return knot;
    }
  const ExplicitSample& a = s[m];
  const ExplicitSample& b = s[m + 1];
  const double h = b.t - a.t;
  const double u = (t - a.t) / h;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = (u3 - 2 * u2 + u) * h, h01 = -2 * u3 + 3 * u2,
               h11 = (u3 - u2) * h;
  const double g00 = (6 * u2 - 6 * u) / h, g10 = 3 * u2 - 4 * u + 1, g01 = (-6 * u2 + 6 * u) / h,
               g11 = 3 * u2 - 2 * u;
  knot.x = Matrix(a.x.rows(), a.x.cols());
  knot.v = knot.x;
  knot.vdot = knot.x;
  const auto xa = a.x.values(), xb = b.x.values(), va = a.v.values(), vb = b.v.values();
  const auto da = vdot[m].values(), db = vdot[m + 1].values();
  auto xo = knot.x.values(), vo = knot.v.values(), dout = knot.vdot.values();
  for (std::size_t k = 0; k < xo.size(); ++k) {
    xo[k] = h00 * xa[k] + h10 * va[k] + h01 * xb[k] + h11 * vb[k];
    vo[k] = h00 * va[k] + h10 * da[k] + h01 * vb[k] + h11 * db[k];
    dout[k] = g00 * va[k] + g10 * da[k] + g01 * vb[k] + g11 * db[k];
  }
  return knot;
}

bool within_limits(const Matrix& m) {
  for (double value : m.values())
    if (!std::isfinite(value) || std::fabs(value) > kDivergenceLimit) return false;
  return true;
}

}  // namespace

void Scenario::validate() const {
  params.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("integration: h must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw ConfigError("integration: t_end must be > 0");
  if (sample_stride < 1) throw ConfigError("integration: sample_stride must be >= 1");
  if (const auto* ballistic = std::get_if<BallisticHistory>(&initial)) {
    check_shape(ballistic->x0, params, "initial.x0");
    check_shape(ballistic->v0, params, "initial.v0");
    return;
  }
  const auto& samples = std::get<ExplicitHistory>(initial).samples;
  if (samples.empty()) throw ConfigError("initial.samples: at least one sample is required");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    check_shape(samples[k].x, params, "initial.samples.x");
    check_shape(samples[k].v, params, "initial.samples.v");
    if (k > 0 && !(samples[k].t > samples[k - 1].t))
      throw ConfigError("initial.samples: times must be strictly increasing");
  }
  const double h_eff = effective_step(*this);
  const double t_first = -static_cast<double>(seed_cells(delay(0.0), h_eff)) * h_eff;
  const double tol = kGridTol * std::fmax(1.0, h_eff);
  if (std::fabs(samples.back().t) > tol || samples.front().t > t_first + tol) {
    std::ostringstream msg;
    msg << "initial.samples: history must cover [" << t_first << ", 0] (tau(0) = " << delay(0.0)
        << "), got [" << samples.front().t << ", " << samples.back().t << "]";
    throw ConfigError(msg.str());
  }
}

double effective_step(const Scenario& scenario) {
  const double h = scenario.h;
  if (scenario.delay.kind() != DelayKind::constant) return h;
  const double tau = scenario.delay.a();
  if (tau <= 0.0) return h;
  const double cells = std::ceil(tau / h - kGridTol);
  return tau / cells;
}

std::size_t step_count(const Scenario& scenario) {
  const double h = effective_step(scenario);
  return static_cast<std::size_t>(std::ceil(scenario.t_end / h - kGridTol));
}

HistoryBuffer init_history(const Scenario& scenario) {
  scenario.validate();
  const ModelParams& p = scenario.params;
  const double h = effective_step(scenario);
  const double tau0 = scenario.delay(0.0);
  const long long cells = seed_cells(tau0, h);
  HistoryBuffer buffer(h, p.n, p.d);

  if (const auto* ballistic = std::get_if<BallisticHistory>(&scenario.initial)) {
    for (long long index = -cells; index <= 0; ++index) {
      const double t = static_cast<double>(index) * h;
      Knot knot;
      knot.index = index;
      knot.x = ballistic->x0;
      knot.x.add_scaled(ballistic->v0, t + tau0);
      knot.v = ballistic->v0;
      knot.vdot = Matrix(p.n, p.d);
      buffer.push_back(std::move(knot));
    }
    return buffer;
  }

  const auto& samples = std::get<ExplicitHistory>(scenario.initial).samples;
  std::vector<Matrix> vdot;
  vdot.reserve(samples.size());
  for (std::size_t m = 0; m < samples.size(); ++m) vdot.push_back(fd_derivative(samples, m));
  for (long long index = -cells; index <= 0; ++index) {
    const double t = static_cast<double>(index) * h;
    buffer.push_back(explicit_knot(samples, vdot, index, t));
  }
  return buffer;
}

StateSample delayed_state(const HistoryBuffer& buffer, const Scenario& scenario, double t,
                          const Matrix& x, const Matrix& v) {
  const double tau = scenario.delay(t);
  if (tau == 0.0) return {x, v};
  const double s = t - tau;
  const double t_end = buffer.end_time();
  if (s <= t_end + kGridTol * buffer.h()) return buffer.interpolate(s);

  // Delayed point inside the step being taken: Taylor extension from the last
  // knot, with a difference estimate of d2v/dt2 when one is available.
  const Knot& last = buffer.back();
  const double delta = s - t_end;
  StateSample out{last.x, last.v};
  out.x.add_scaled(last.v, delta);
  out.x.add_scaled(last.vdot, 0.5 * delta * delta);
  out.v.add_scaled(last.vdot, delta);
  if (buffer.size() >= 2 && !last.vdot_left) {
    Matrix jerk = last.vdot;
    jerk.add_scaled(buffer[buffer.size() - 2].vdot, -1.0);
    const double scale = 1.0 / buffer.h();
    out.x.add_scaled(jerk, scale * delta * delta * delta / 6.0);
    out.v.add_scaled(jerk, scale * 0.5 * delta * delta);
  }
  return out;
}

void activate(HistoryBuffer& buffer, const Scenario& scenario) {
  Knot& last = buffer.back();
  if (last.vdot_left || last.index != 0) return;
  const double t = buffer.time_of(last);
  const StateSample lag = delayed_state(buffer, scenario, t, last.x, last.v);
  Matrix model = velocity_field(scenario.params, last.v, lag.x, lag.v);
  last.vdot_left = std::move(last.vdot);
  last.vdot = std::move(model);
}

StepStatus step(HistoryBuffer& buffer, const Scenario& scenario) {
  activate(buffer, scenario);
  const ModelParams& p = scenario.params;
  const double h = buffer.h();
  const Knot& last = buffer.back();
  const double t = buffer.time_of(last);

  const auto accel = [&](double ts, const Matrix& xs, const Matrix& vs) {
    const StateSample lag = delayed_state(buffer, scenario, ts, xs, vs);
    return velocity_field(p, vs, lag.x, lag.v);
  };

  const Matrix& x = last.x;
  const Matrix& v = last.v;
  const Matrix& k1v = last.vdot;  // model rhs at (t, x, v)

  Matrix x2 = x;
  x2.add_scaled(v, 0.5 * h);
  Matrix v2 = v;
  v2.add_scaled(k1v, 0.5 * h);
  const Matrix k2v = accel(t + 0.5 * h, x2, v2);

  Matrix x3 = x;
  x3.add_scaled(v2, 0.5 * h);
  Matrix v3 = v;
  v3.add_scaled(k2v, 0.5 * h);
  const Matrix k3v = accel(t + 0.5 * h, x3, v3);

  Matrix x4 = x;
  x4.add_scaled(v3, h);
  Matrix v4 = v;
  v4.add_scaled(k3v, h);
  const Matrix k4v = accel(t + h, x4, v4);

  Knot next;
  next.index = last.index + 1;
  next.x = x;
  next.v = v;
  {
    auto xo = next.x.values();
    auto vo = next.v.values();
    const std::span<const double> a1 = v.values(), a2 = std::as_const(v2).values(),
                                  a3 = std::as_const(v3).values(), a4 = std::as_const(v4).values();
    const std::span<const double> b1 = k1v.values(), b2 = k2v.values(), b3 = k3v.values(),
                                  b4 = k4v.values();
    for (std::size_t k = 0; k < xo.size(); ++k) {
      xo[k] += h / 6.0 * (a1[k] + 2.0 * a2[k] + 2.0 * a3[k] + a4[k]);
      vo[k] += h / 6.0 * (b1[k] + 2.0 * b2[k] + 2.0 * b3[k] + b4[k]);
    }
  }
  if (!within_limits(next.x) || !within_limits(next.v)) return StepStatus::diverged;

  const double t_next = static_cast<double>(next.index) * h;
  next.vdot = accel(t_next, next.x, next.v);
  if (!within_limits(next.vdot)) return StepStatus::diverged;
  buffer.push_back(std::move(next));
  buffer.trim_before(t_next - scenario.delay.tau_bar() - 2.0 * h);
  return StepStatus::ok;
}

}  // namespace delayflock
