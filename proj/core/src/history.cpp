#include "delayflock/history.hpp"

#include <cmath>
#include <sstream>

#include "delayflock/errors.hpp"

namespace delayflock {

namespace {

// Knot snapping tolerance, relative to h.
constexpr double kSnap = 1e-9;

}  // namespace

HistoryBuffer::HistoryBuffer(double h, std::size_t n, std::size_t d) : h_(h), n_(n), d_(d) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ContractError("HistoryBuffer: h must be > 0");
}

double HistoryBuffer::start_time() const {
  if (knots_.empty()) throw LookbackError("HistoryBuffer: empty");
  return time_of(knots_.front());
}

double HistoryBuffer::end_time() const {
  if (knots_.empty()) throw LookbackError("HistoryBuffer: empty");
  return time_of(knots_.back());
}

void HistoryBuffer::push_back(Knot knot) {
  if (!knots_.empty() && knot.index != knots_.back().index + 1)
    throw ContractError("HistoryBuffer::push_back: knots must be consecutive");
  const auto check = [&](const Matrix& m) {
    if (m.rows() != n_ || m.cols() != d_)
      throw ContractError("HistoryBuffer::push_back: knot shape mismatch");
  };
  check(knot.x);
  check(knot.v);
  check(knot.vdot);
  if (knot.vdot_left) check(*knot.vdot_left);
  knots_.push_back(std::move(knot));
}

HistoryBuffer::Location HistoryBuffer::locate(double t) const {
  if (knots_.empty()) throw LookbackError("HistoryBuffer: query on empty buffer");
  const double t0 = start_time();
  const double u = (t - t0) / h_;
  const double last = static_cast<double>(knots_.size() - 1);
  if (!(u >= -kSnap) || !(u <= last + kSnap)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "history lookback: t = " << t << " outside stored window [" << t0 << ", "
        << end_time() << "]";
    throw LookbackError(msg.str());
  }
  Location loc;
  const double nearest = std::round(u);
  if (std::fabs(u - nearest) <= kSnap) {
    loc.knot = static_cast<std::size_t>(std::fmax(0.0, std::fmin(nearest, last)));
    loc.cell = *loc.knot == knots_.size() - 1 && *loc.knot > 0 ? *loc.knot - 1 : *loc.knot;
    loc.theta = static_cast<double>(*loc.knot) - static_cast<double>(loc.cell);
    return loc;
  }
  const double cell = std::floor(u);
  loc.cell = static_cast<std::size_t>(cell);
  loc.theta = u - cell;
  return loc;
}

StateSample HistoryBuffer::interpolate(double t) const {
  const Location loc = locate(t);
  if (loc.knot) {
    const Knot& k = knots_[*loc.knot];
    return {k.x, k.v};
  }
  const Knot& a = knots_[loc.cell];
  const Knot& b = knots_[loc.cell + 1];
  const double s = loc.theta;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = (s3 - 2.0 * s2 + s) * h_;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = (s3 - s2) * h_;

  const Matrix& ma = a.vdot;
  const Matrix& mb = b.left_vdot();
  StateSample out{Matrix(n_, d_), Matrix(n_, d_)};
  const auto xa = a.x.values(), xb = b.x.values(), va = a.v.values(), vb = b.v.values();
  const auto da = ma.values(), db = mb.values();
  auto xo = out.x.values();
  auto vo = out.v.values();
  for (std::size_t k = 0; k < xo.size(); ++k) {
    xo[k] = h00 * xa[k] + h10 * va[k] + h01 * xb[k] + h11 * vb[k];
    vo[k] = h00 * va[k] + h10 * da[k] + h01 * vb[k] + h11 * db[k];
  }
  return out;
}

Matrix HistoryBuffer::interpolate_vdot(double t, Side side) const {
  const Location loc = locate(t);
  if (loc.knot) {
    const Knot& k = knots_[*loc.knot];
    return side == Side::right ? k.vdot : k.left_vdot();
  }
  const Knot& a = knots_[loc.cell];
  const Knot& b = knots_[loc.cell + 1];
  const double s = loc.theta;
  const double s2 = s * s;
  const double g00 = (6.0 * s2 - 6.0 * s) / h_;
  const double g10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double g01 = (-6.0 * s2 + 6.0 * s) / h_;
  const double g11 = 3.0 * s2 - 2.0 * s;
  Matrix out(n_, d_);
  const auto va = a.v.values(), vb = b.v.values();
  const auto da = a.vdot.values(), db = b.left_vdot().values();
  auto o = out.values();
  for (std::size_t k = 0; k < o.size(); ++k)
    o[k] = g00 * va[k] + g10 * da[k] + g01 * vb[k] + g11 * db[k];
  return out;
}

void HistoryBuffer::trim_before(double t) {
  while (knots_.size() >= 2 && time_of(knots_[1]) <= t) knots_.pop_front();
}

bool HistoryBuffer::covers(double lo, double hi) const {
  if (knots_.empty()) return false;
  const double tol = kSnap * h_;
  return start_time() <= lo + tol && end_time() >= hi - tol;
}

}  // namespace delayflock
