#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "delayflock/matrix.hpp"

namespace delayflock {

// One grid point of the stored trajectory. Times live on the uniform grid
// t = index * h, so spacing never drifts.
struct Knot {
  long long index = 0;
  Matrix x;
  Matrix v;
  // Right derivative of v (the model right-hand side once integration runs).
  Matrix vdot;
  // Left derivative of v where it differs from vdot. Only the junction between
  // the seed history and the integrated solution (t = 0) carries one.
  std::optional<Matrix> vdot_left;

  const Matrix& left_vdot() const noexcept { return vdot_left ? *vdot_left : vdot; }
};

struct StateSample {
  Matrix x;
  Matrix v;
};

enum class Side { left, right };

// Dense record of (x, v, dv/dt) on a uniform grid, with cubic Hermite dense
// output. The x channel uses v as its derivative and the v channel uses the
// stored dv/dt, so interpolation is exact at knots and on cubics.
class HistoryBuffer {
 public:
  HistoryBuffer(double h, std::size_t n, std::size_t d);

  double h() const noexcept { return h_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }

  std::size_t size() const noexcept { return knots_.size(); }
  bool empty() const noexcept { return knots_.empty(); }
  const Knot& operator[](std::size_t k) const { return knots_[k]; }
  const Knot& front() const { return knots_.front(); }
  const Knot& back() const { return knots_.back(); }
  Knot& back() { return knots_.back(); }

  double time_of(const Knot& knot) const noexcept { return static_cast<double>(knot.index) * h_; }
  double start_time() const;
  double end_time() const;

  // The knot index must follow the current back knot (any index when empty).
  void push_back(Knot knot);

  // Throws LookbackError when t falls outside [start_time, end_time].
  StateSample interpolate(double t) const;

  // dv/dt at t from the derivative of the v-channel interpolant. At a knot the
  // requested one-sided value is returned.
  Matrix interpolate_vdot(double t, Side side = Side::right) const;

  // Drops leading knots while the buffer still has a knot at or before t.
  void trim_before(double t);

  bool covers(double lo, double hi) const;

 private:
  struct Location {
    std::size_t cell = 0;  // t in [t_cell, t_cell+1]
    double theta = 0.0;
    std::optional<std::size_t> knot;  // set when t snaps onto a knot
  };
  Location locate(double t) const;

  double h_;
  std::size_t n_;
  std::size_t d_;
  std::deque<Knot> knots_;
};

}  // namespace delayflock
