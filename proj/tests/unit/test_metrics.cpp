#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "delayflock/errors.hpp"
#include "delayflock/experiments.hpp"
#include "delayflock/metrics.hpp"
#include "support.hpp"

namespace delayflock {
namespace {

TEST(Variance, SectionFourVelocities) {
  EXPECT_NEAR(variance_V(testing::section4_v0()), 1.0 / 9.0, 1e-16);
  EXPECT_EQ(variance_V(Matrix(4, 3, 2.5)), 0.0);
  EXPECT_DOUBLE_EQ(variance_V(Matrix::from_rows({{1.0}, {0.0}})), 0.25);
}

// Brute force over ordered pairs.
double pair_variance(const Matrix& a) {
  const double n = static_cast<double>(a.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) {
      const double r = row_distance(a, i, a, j);
      total += r * r;
    }
  return total / (2.0 * n * n);
}

TEST(Variance, FluctuationIdentityOnRandomStates) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::size_t d = 1 + trial % 3;
    const Matrix v = testing::random_matrix(rng, n, d, 3.0);
    const Fluctuation f = fluctuation(v);
    const double norm = squared_norm(f.w) / static_cast<double>(n);
    EXPECT_NEAR(variance_V(v), norm, 1e-12 * norm);
    EXPECT_NEAR(pair_variance(f.w), norm, 1e-12 * norm);
    EXPECT_NEAR(pair_variance(v), variance_V(v), 1e-12 * norm);
  }
}

TEST(Fluctuation, TwoAgentSplit) {
  const Fluctuation f = fluctuation(Matrix::from_rows({{1.0}, {0.0}}));
  EXPECT_DOUBLE_EQ(f.mean[0], 0.5);
  EXPECT_DOUBLE_EQ(f.w(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.w(1, 0), -0.5);
  const Fluctuation aligned = fluctuation(Matrix(3, 2, -1.25));
  EXPECT_EQ(aligned.w.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(aligned.mean[1], -1.25);
}

TEST(Diameters, SectionFourAndTwoPoint) {
  const Diameters d = diameters(testing::section4_x0(), testing::section4_v0());
  EXPECT_NEAR(d.d_v, std::sqrt(0.5), 1e-16);
  EXPECT_NEAR(d.d_x, std::sqrt(2.0), 1e-16);
  EXPECT_EQ(diameters(testing::section4_x0(), Matrix(3, 2, 1.0)).d_v, 0.0);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const Matrix v = testing::random_matrix(rng, 2, 3, 2.0);
    const double dv = diameter(v);
    EXPECT_NEAR(dv, row_distance(v, 0, v, 1), 1e-15);
    EXPECT_NEAR(variance_V(v), dv * dv / 4.0, 1e-14);
  }
}

HistoryBuffer constant_accel_buffer(double h, long long first, long long last, std::size_t n,
                                    std::size_t d, double accel_per_agent) {
  // Every agent shares v(t) = t g with |g| = accel_per_agent, so w = 0.
  const testing::Channels ch{
      [=](double t) { return Matrix(n, d, 0.5 * t * t * accel_per_agent / std::sqrt(double(d))); },
      [=](double t) { return Matrix(n, d, t * accel_per_agent / std::sqrt(double(d))); },
      [=](double) { return Matrix(n, d, accel_per_agent / std::sqrt(double(d))); }};
  return testing::synthetic_buffer(h, first, last, n, d, ch);
}

TEST(WindowIntegrals, ConstantIntegrands) {
  const HistoryBuffer unit = constant_accel_buffer(0.01, -100, 100, 3, 2, 1.0);
  EXPECT_NEAR(r_tau(unit, 0.5, DelaySpec::constant(0.5)), 0.5, 1e-14);
  const HistoryBuffer two = constant_accel_buffer(0.01, -100, 100, 3, 2, 2.0);
  EXPECT_NEAR(sigma_tau(two, 0.3, DelaySpec::constant(0.25)), 0.5, 1e-14);
  EXPECT_EQ(r_tau(unit, 0.5, DelaySpec::constant(0.0)), 0.0);
}

TEST(WindowIntegrals, OffGridWindowEdge) {
  const HistoryBuffer unit = constant_accel_buffer(0.01, -100, 100, 2, 1, 1.0);
  EXPECT_NEAR(r_tau(unit, 0.3, DelaySpec::constant(0.4567)), 0.4567, 1e-13);
}

TEST(WindowIntegrals, UncoveredWindowIsLookbackError) {
  const HistoryBuffer unit = constant_accel_buffer(0.01, -10, 10, 2, 1, 1.0);
  EXPECT_THROW(r_tau(unit, 0.0, DelaySpec::constant(0.5)), LookbackError);
}

TEST(WindowIntegrals, SigmaBoundedByWindowMax) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    HistoryBuffer buffer(0.05, 3, 2);
    double peak = 0.0;
    for (long long k = -40; k <= 0; ++k) {
      const Matrix vdot = testing::random_matrix(rng, 3, 2, 1.0);
      Matrix copy = vdot;
      peak = std::fmax(peak, accel_measure(vdot, AccelMeasure::max_norm));
      buffer.push_back(Knot{k, Matrix(3, 2), Matrix(3, 2), std::move(copy), std::nullopt});
    }
    const double tau = 0.05 * 37;
    EXPECT_LE(sigma_tau(buffer, 0.0, DelaySpec::constant(tau)), tau * peak + 1e-12);
  }
}

TEST(Lyapunov, ConstantIntegrandClosedForm) {
  const double beta = 0.8;
  for (const double tau : {0.3, 1.0, 1.7}) {
    const HistoryBuffer buffer = constant_accel_buffer(0.001, -2000, 500, 3, 2, 1.0);
    const double closed = beta * (1.0 - std::exp(-tau) * (1.0 + tau));
    // trapezoid error is O(h^2)
    EXPECT_NEAR(lyapunov_L2(buffer, 0.25, beta, DelaySpec::constant(tau)), closed, 1e-6);
    EXPECT_NEAR(lyapunov_Linf(buffer, 0.25, beta, DelaySpec::constant(tau)), closed, 1e-6);
  }
}

TEST(Lyapunov, SeedValues) {
  const Scenario s = section4_scenario(2.0, 1.0);
  HistoryBuffer buffer = init_history(s);
  EXPECT_NEAR(lyapunov_L2(buffer, 0.0, 3.0, s.delay), 0.5 / 9.0, 1e-15);
  EXPECT_NEAR(lyapunov_Linf(buffer, 0.0, 3.0, s.delay), std::sqrt(0.5), 1e-15);
  const HistoryBuffer still = constant_accel_buffer(0.01, -100, 0, 3, 2, 0.0);
  EXPECT_EQ(lyapunov_L2(still, 0.0, 2.0, DelaySpec::constant(0.5)), 0.0);
  EXPECT_EQ(lyapunov_Linf(still, 0.0, 2.0, DelaySpec::constant(0.5)), 0.0);
}

TEST(Bounds, ThresholdArithmetic) {
  EXPECT_NEAR(bounds_L2(1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 3).tau0, 1.0 / 6.0, 1e-16);
  EXPECT_NEAR(bounds_Linf(1.0, 1.0, 0.0, 0.0, 0.0, 1.0).tau0, 1.0 / 3.0, 1e-16);
  // (1 - c) scales both thresholds
  EXPECT_NEAR(bounds_L2(1.0, 1.0, 0.0, 0.5, 0.0, 1.0, 3).tau0, 1.0 / 12.0, 1e-16);
  EXPECT_NEAR(bounds_Linf(2.0, 0.5, 0.0, 0.25, 0.0, 1.0).tau0, 0.75 / 2.0 * 0.5 / 2.5, 1e-16);
}

TEST(Bounds, UndelayedReducesToRates) {
  const TheoremBounds l2 = bounds_L2(1.0, 0.4, 0.0, 0.0, 0.0, 0.7, 3);
  ASSERT_TRUE(l2.valid);
  EXPECT_DOUBLE_EQ(*l2.r, 0.4);
  EXPECT_DOUBLE_EQ(*l2.C, 0.7);
  EXPECT_DOUBLE_EQ(*bounds_L2(1.0, 3.0, 0.0, 0.0, 0.0, 0.7, 3).r, 1.0);
  const TheoremBounds linf = bounds_Linf(2.0, 0.2, 0.0, 0.0, 0.0, 0.9);
  ASSERT_TRUE(linf.valid);
  EXPECT_DOUBLE_EQ(*linf.r, 0.4);
  EXPECT_DOUBLE_EQ(*linf.C, 0.9);
}

TEST(Bounds, HandComputedDelayedConstants) {
  const double lambda = 1.0, gamma = 0.9, tau = 0.1, seed = 0.3, v0 = 0.2;
  const double d = std::exp(-tau) - 2.0 * lambda * lambda * tau * tau;
  const TheoremBounds b = bounds_L2(lambda, gamma, tau, 0.0, seed, v0, 3);
  ASSERT_TRUE(b.valid);
  EXPECT_NEAR(*b.beta, lambda * lambda * tau / (2.0 * gamma * d), 1e-15);
  EXPECT_NEAR(*b.r, gamma - 4.0 * lambda * lambda / gamma * lambda * lambda * tau * tau / d, 1e-15);
  EXPECT_NEAR(*b.C, v0 + lambda * lambda * tau / (gamma * 3.0 * d) * seed, 1e-15);

  const double psi = 0.81, tau2 = 0.05;
  const double dinf = std::exp(-tau2) - lambda * tau2;
  const TheoremBounds m = bounds_Linf(lambda, psi, tau2, 0.0, seed, v0);
  ASSERT_TRUE(m.valid);
  EXPECT_NEAR(*m.beta, 2.0 * lambda / dinf, 1e-15);
  EXPECT_NEAR(*m.r, lambda * (psi - 2.0 * lambda * tau2 / dinf), 1e-15);
  EXPECT_NEAR(*m.C, v0 + 2.0 * lambda / dinf * seed, 1e-15);
}

TEST(Bounds, GateOmitsConstants) {
  const TheoremBounds b = bounds_L2(1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 3);
  EXPECT_FALSE(b.valid);
  EXPECT_FALSE(b.r.has_value());
  EXPECT_FALSE(b.C.has_value());
  EXPECT_FALSE(b.beta.has_value());
  const BoundCheck check = verify_bound({}, b);
  EXPECT_TRUE(check.refused);
  EXPECT_FALSE(check.pass);
  EXPECT_EQ(check.reason, "delay condition violated");
}

TEST(Bounds, DomainErrors) {
  EXPECT_THROW(bounds_L2(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 3), DomainError);
  EXPECT_THROW(bounds_L2(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 3), DomainError);
  EXPECT_THROW(bounds_Linf(1.0, 1.0, 0.0, 1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(bounds_Linf(1.0, 1.0, -0.1, 0.0, 0.0, 1.0), DomainError);
}

TEST(VerifyBound, ConsensusDataIsTrivial) {
  Scenario s = section4_scenario(0.2, 5.0);
  s.initial = BallisticHistory{testing::section4_x0(), Matrix(3, 2, 0.3)};
  const RunResult r = run(s);
  const TheoremBounds b = bounds_L2(1.0, structural_certificate(r).gamma_emp, 0.2, 0.0,
                                    r.seed.integral_l2, r.diagnostics.front().V, 3);
  if (b.valid) {
    const BoundCheck check = verify_bound(r.diagnostics, b);
    EXPECT_TRUE(check.pass);
    EXPECT_LE(check.max_violation, 0.0);
  } else {
    EXPECT_TRUE(verify_bound(r.diagnostics, b).refused);
  }
}

TEST(VerifyBound, DetectsViolation) {
  std::vector<DiagnosticsRow> rows(3);
  for (std::size_t k = 0; k < 3; ++k) {
    rows[k].t = static_cast<double>(k);
    rows[k].V = 1.0;
  }
  const TheoremBounds b = bounds_L2(1.0, 0.5, 0.0, 0.0, 0.0, 1.0, 3);
  const BoundCheck check = verify_bound(rows, b);
  EXPECT_FALSE(check.pass);
  EXPECT_DOUBLE_EQ(check.worst_time, 2.0);
  EXPECT_NEAR(check.max_violation, std::exp(1.0) - 1.0, 1e-14);
}

TEST(Margins, AccelerationEstimatesHoldAlongRun) {
  Scenario s = section4_scenario(0.4, 10.0);
  const RunResult r = run(s);
  for (const DiagnosticsRow& row : r.diagnostics) {
    EXPECT_GE(accel_l2_margin(row, 1.0, 0.4, 3), -1e-8) << row.t;
    EXPECT_GE(accel_max_margin(row, 1.0), -1e-8) << row.t;
  }
}

}  // namespace
}  // namespace delayflock
