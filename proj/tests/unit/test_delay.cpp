#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "delayflock/delay.hpp"
#include "delayflock/errors.hpp"

namespace delayflock {
namespace {

TEST(Delay, ConstantValueAndBounds) {
  const DelaySpec d = DelaySpec::constant(5.0);
  EXPECT_DOUBLE_EQ(d(12.7), 5.0);
  EXPECT_DOUBLE_EQ(tau_eval(d, 0.0), 5.0);
  const DelayBounds b = delay_bounds(d);
  EXPECT_DOUBLE_EQ(b.tau_bar, 5.0);
  EXPECT_DOUBLE_EQ(b.c, 0.0);
}

TEST(Delay, SinusoidValues) {
  const DelaySpec d = DelaySpec::sinusoidal(0.2, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(d(0.0), 0.2);
  EXPECT_NEAR(d(std::numbers::pi / 2), 0.3, 1e-15);
  const DelayBounds b = delay_bounds(d);
  EXPECT_NEAR(b.tau_bar, 0.3, 1e-15);
  EXPECT_NEAR(b.c, 0.1, 1e-15);
}

TEST(Delay, SteepSinusoidRejected) {
  try {
    DelaySpec::sinusoidal(0.5, 0.5, 3.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("< 1"), std::string::npos) << e.what();
  }
}

TEST(Delay, NegativeDelayRejected) {
  EXPECT_THROW(DelaySpec::constant(-0.1), ConfigError);
  EXPECT_THROW(DelaySpec::sinusoidal(0.1, 0.2, 0.5), ConfigError);
  EXPECT_THROW(DelaySpec::constant(std::nan("")), ConfigError);
}

TEST(Delay, ZeroDelay) {
  EXPECT_TRUE(DelaySpec::constant(0.0).is_zero());
  EXPECT_FALSE(DelaySpec::sinusoidal(0.1, 0.1, 0.5).is_zero());
  // touches zero at the trough but stays admissible
  const DelaySpec d = DelaySpec::sinusoidal(0.1, 0.1, 0.5);
  EXPECT_GE(d(3 * std::numbers::pi), 0.0);
}

}  // namespace
}  // namespace delayflock
