#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "delayflock/history.hpp"
#include "delayflock/matrix.hpp"

namespace delayflock::testing {

inline Matrix section4_x0() { return Matrix::from_rows({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}); }
inline Matrix section4_v0() { return Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.5, 0.5}}); }

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                            double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(rows, cols);
  for (double& value : m.values()) value = u(rng);
  return m;
}

// Buffer on [t0, t1] at spacing h from closed-form channels f(t) -> (x, v, vdot).
struct Channels {
  std::function<Matrix(double)> x;
  std::function<Matrix(double)> v;
  std::function<Matrix(double)> vdot;
};

inline HistoryBuffer synthetic_buffer(double h, long long first, long long last, std::size_t n,
                                      std::size_t d, const Channels& ch) {
  HistoryBuffer buffer(h, n, d);
  for (long long k = first; k <= last; ++k) {
    const double t = static_cast<double>(k) * h;
    buffer.push_back(Knot{k, ch.x(t), ch.v(t), ch.vdot(t), std::nullopt});
  }
  return buffer;
}

// Undelayed Cucker-Smale velocity field on plain vectors, written without the
// library: dv_i = (lambda/N) sum_{j != i} (1 + |x_i - x_j|^2)^(-beta) (v_j - v_i).
struct PlainState {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> v;
};

inline PlainState plain_field(const PlainState& s, double lambda, double beta) {
  const std::size_t n = s.x.size();
  const std::size_t d = s.x[0].size();
  PlainState out{s.v, std::vector<std::vector<double>>(n, std::vector<double>(d, 0.0))};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double r2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) r2 += (s.x[i][k] - s.x[j][k]) * (s.x[i][k] - s.x[j][k]);
      const double psi = std::pow(1.0 + r2, -beta);
      for (std::size_t k = 0; k < d; ++k)
        out.v[i][k] += lambda / static_cast<double>(n) * psi * (s.v[j][k] - s.v[i][k]);
    }
  return out;
}

inline PlainState plain_axpy(const PlainState& a, double alpha, const PlainState& b) {
  PlainState out = a;
  for (std::size_t i = 0; i < a.x.size(); ++i)
    for (std::size_t k = 0; k < a.x[i].size(); ++k) {
      out.x[i][k] += alpha * b.x[i][k];
      out.v[i][k] += alpha * b.v[i][k];
    }
  return out;
}

inline PlainState plain_rk4(const PlainState& s, double h, double lambda, double beta) {
  const PlainState k1 = plain_field(s, lambda, beta);
  const PlainState k2 = plain_field(plain_axpy(s, h / 2, k1), lambda, beta);
  const PlainState k3 = plain_field(plain_axpy(s, h / 2, k2), lambda, beta);
  const PlainState k4 = plain_field(plain_axpy(s, h, k3), lambda, beta);
  PlainState out = s;
  for (std::size_t i = 0; i < s.x.size(); ++i)
    for (std::size_t k = 0; k < s.x[i].size(); ++k) {
      out.x[i][k] += h / 6 * (k1.x[i][k] + 2 * k2.x[i][k] + 2 * k3.x[i][k] + k4.x[i][k]);
      out.v[i][k] += h / 6 * (k1.v[i][k] + 2 * k2.v[i][k] + 2 * k3.v[i][k] + k4.v[i][k]);
    }
  return out;
}

inline PlainState to_plain(const Matrix& x, const Matrix& v) {
  PlainState s;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    s.x.emplace_back(x.row(i).begin(), x.row(i).end());
    s.v.emplace_back(v.row(i).begin(), v.row(i).end());
  }
  return s;
}

}  // namespace delayflock::testing
