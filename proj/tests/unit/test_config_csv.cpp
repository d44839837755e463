#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "delayflock/config.hpp"
#include "delayflock/csv.hpp"
#include "delayflock/errors.hpp"
#include "support.hpp"

namespace delayflock {
namespace {

const char* kSection4 = R"({
  "model": {
    "n": 3,
    "d": 2,
    "lambda": 1.0,
    "variant": "main_delay",
    "potential": { "kind": "cucker_smale", "beta": 2.0 }
  },
  "delay": { "kind": "constant", "tau": 5.0 },
  "initial": {
    "mode": "ballistic",
    "x0": [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
    "v0": [[1.0, 0.0], [1.0, 0.0], [0.5, 0.5]]
  },
  "integration": { "h": 0.01, "t_end": 20.0, "sample_stride": 10 }
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  if (pos == std::string::npos) throw std::runtime_error("pattern not found: " + from);
  return text.replace(pos, from.size(), to);
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, SectionFourMatchesBuiltInScenario) {
  const ScenarioConfig c = parse_config_text(kSection4);
  EXPECT_EQ(c.scenario, section4_scenario(5.0, 20.0));
  EXPECT_EQ(c.criteria.eps_v, 1e-3);
  EXPECT_EQ(c.criteria.x_growth_factor, 5.0);
}

TEST(Config, ShippedFileParses) {
  const ScenarioConfig c = parse_config(std::filesystem::path(DELAYFLOCK_SOURCE_DIR) / "configs/section4.json");
  EXPECT_EQ(c.scenario, section4_scenario(0.0, 50.0));
}

TEST(Config, UnknownKeyRejectedWithLine) {
  const std::string msg = error_of(replace(kSection4, "\"lambda\": 1.0,", "\"lambda\": 1.0, \"lamda\": 2,"));
  EXPECT_NE(msg.find("cfg.json:5: model.lamda: unknown key"), std::string::npos) << msg;
}

TEST(Config, MissingKeyNamed) {
  const std::string msg = error_of(replace(kSection4, "\"d\": 2,", ""));
  EXPECT_NE(msg.find("model.d: missing required key"), std::string::npos) << msg;
}

TEST(Config, SteepDelayCitesDerivativeBound) {
  const std::string msg = error_of(replace(kSection4, R"({ "kind": "constant", "tau": 5.0 })",
                                           R"({ "kind": "sinusoidal", "a": 1.0, "b": 0.6, "omega": 2.0 })"));
  EXPECT_NE(msg.find("cfg.json:9: delay:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("c = b*omega"), std::string::npos) << msg;
  EXPECT_NE(msg.find("< 1"), std::string::npos) << msg;
}

TEST(Config, ZeroExponentIsConstantOne) {
  const ScenarioConfig c = parse_config_text(replace(kSection4, "\"beta\": 2.0", "\"beta\": 0"));
  EXPECT_EQ(c.scenario.params.potential(3.0), 1.0);
}

TEST(Config, BadStepAndShapes) {
  EXPECT_NE(error_of(replace(kSection4, "\"h\": 0.01", "\"h\": -0.01")).find("integration: h must be > 0"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kSection4, "[1.0, 0.0]],", "[1.0]],")).find("initial.x0[2]"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kSection4, "\"n\": 3", "\"n\": 2.5")).find("model.n: expected a nonnegative integer"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kSection4, "main_delay", "wu")).find("model.variant"), std::string::npos);
  EXPECT_NE(error_of("{ \"model\": ").find("cfg.json"), std::string::npos);
}

TEST(Config, KindSpecificKeys) {
  const std::string msg = error_of(replace(kSection4, "\"tau\": 5.0", "\"tau\": 5.0, \"omega\": 1"));
  EXPECT_NE(msg.find("delay.omega: not allowed"), std::string::npos) << msg;
}

TEST(Config, RoundTripPreservesScenario) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    ScenarioConfig c;
    Scenario& s = c.scenario;
    s.params.n = 2 + trial % 4;
    s.params.d = 1 + trial % 3;
    s.params.lambda = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    switch (trial % 3) {
      case 0:
        s.params.potential = Potential::cucker_smale(std::uniform_real_distribution<double>(0, 3)(rng));
        break;
      case 1:
        s.params.potential = Potential::constant(std::uniform_real_distribution<double>(0.1, 1)(rng));
        s.params.variant = ModelVariant::normalized_nonsymmetric;
        break;
      default:
        s.params.potential = Potential::table({{0.0, 1.0}, {1.0 / 3.0, 0.7}, {2.0, 0.1}});
        s.params.variant = ModelVariant::full_sum_baseline;
    }
    const double tau = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    s.delay = trial % 2 ? DelaySpec::constant(tau) : DelaySpec::sinusoidal(tau + 0.1, 0.1, 2.0);
    const Matrix x0 = testing::random_matrix(rng, s.params.n, s.params.d, 1.0);
    const Matrix v0 = testing::random_matrix(rng, s.params.n, s.params.d, 1.0);
    if (trial % 4 == 3) {
      const double lookback = s.delay(0.0) + 0.05;
      s.initial = ExplicitHistory{{{-lookback, x0, v0}, {0.0, x0, v0}}};
    } else {
      s.initial = BallisticHistory{x0, v0};
    }
    s.h = 0.01 + 0.001 * trial;
    s.t_end = 1.0 / 7.0 + trial;
    s.sample_stride = 1 + trial;
    c.criteria.eps_v = 1e-4 * (trial + 1);
    c.criteria.h = s.h;
    const std::string text = serialize_config(c);
    const ScenarioConfig back = parse_config_text(text);
    EXPECT_EQ(back, c) << text;
    EXPECT_EQ(serialize_config(back), text);
  }
}

TEST(Csv, NumberFormat) {
  EXPECT_EQ(format_number(1.0 / 9.0), "0.1111111111111111");
  EXPECT_EQ(format_number(2.0 / 3.0), "0.66666666666666663");
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-2.5e-300), "-2.5e-300");
  EXPECT_EQ(format_number(1e21), "1e+21");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, HeadersAndEmptyRun) {
  EXPECT_EQ(trajectory_csv({}, 2, 2), "t,x_1_1,x_1_2,x_2_1,x_2_2,v_1_1,v_1_2,v_2_1,v_2_2\n");
  EXPECT_EQ(diagnostics_csv({}),
            "t,X,V,d_X,d_V,mu,psi_star,R_tau,sigma_tau,lyap_L2,lyap_Linf,bound_V,bound_dV\n");
}

TEST(Csv, SectionFourFirstRow) {
  const RunResult r = run(section4_scenario(0.0, 1.0));
  const std::string diag = diagnostics_csv(r.diagnostics);
  const auto line_start = diag.find('\n') + 1;
  const std::string first = diag.substr(line_start, diag.find('\n', line_start) - line_start);
  EXPECT_EQ(first.substr(0, first.find(',', 2 + first.find(',', 2))), "0,0.44444444444444442,0.11111111111111113");
  const std::string traj = trajectory_csv(r.trajectory, 3, 2);
  EXPECT_NE(traj.find("\n0,0,0,0,1,1,0,1,0,1,0,0.5,0.5\n"), std::string::npos) << traj.substr(0, 200);
  EXPECT_EQ(diag, diagnostics_csv(run(section4_scenario(0.0, 1.0)).diagnostics));
}

TEST(Csv, WriteFailureNamesPath) {
  try {
    write_file("/nonexistent-dir/x.csv", "a");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
}

}  // namespace
}  // namespace delayflock
