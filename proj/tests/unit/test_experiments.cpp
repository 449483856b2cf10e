#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "coag/errors.hpp"
#include "coag/experiments.hpp"
#include "coag/report_io.hpp"
#include "coag/svg_plot.hpp"
#include "oracles.hpp"

using namespace coag;
namespace fs = std::filesystem;

namespace {

const Verdict* find_verdict(const ExperimentReport& r, const std::string& name) {
  for (const auto& v : r.verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("coag_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_converge() {
  ExperimentConfig c;
  c.scenario = Scenario::ConvergeConstantM0;
  c.horizon = 4.0;
  c.fibres = 8;
  c.initial.family = Family::PerturbedProfile;
  c.initial.shift = 0.5;
  c.initial.epsilon = 0.4;
  c.initial.width = 1.0;
  return c;
}

}  // namespace

TEST(Config, ParsesNestedFields) {
  const auto c = config_from_json(R"({
    "scenario": "oscillate", "gamma": 0.5, "horizon": 12, "fibres": 16,
    "k_window": [-20, 10], "initial": {"family": "modulated-profile", "shift": 1, "epsilon": 0.3},
    "tolerances": {"floor_factor": 5}
  })");
  EXPECT_EQ(c.scenario, Scenario::Oscillate);
  EXPECT_EQ(c.gamma, 0.5);
  EXPECT_EQ(c.horizon, 12.0);
  EXPECT_EQ(c.fibres, 16);
  ASSERT_TRUE(c.k_window.has_value());
  EXPECT_EQ(c.k_window->first, -20);
  EXPECT_EQ(c.initial.family, Family::ModulatedProfile);
  EXPECT_EQ(c.initial.epsilon, 0.3);
  EXPECT_EQ(c.tolerances.floor_factor, 5.0);
  EXPECT_EQ(c.tolerances.convergence_ratio, 0.01);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(R"({"gamma": 0, "horizn": 3})"), InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"initial": {"famly": "x"}})"), InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"tolerances": {"mass": 1}})"), InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"scenario": "nope"})"), InvalidArgument);
  EXPECT_THROW(config_from_json("not json"), InvalidArgument);

  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.horizon = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.fibres = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.dt_max = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.dx = 0.3;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Config, JsonRoundTrip) {
  auto c = small_converge();
  c.gamma = 0.25;
  c.k_window = std::pair{-12, 7};
  c.tolerances.oracle_sup = 1e-2;
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.scenario, c.scenario);
  EXPECT_EQ(back.gamma, c.gamma);
  EXPECT_EQ(back.fibres, c.fibres);
  EXPECT_EQ(back.k_window, c.k_window);
  EXPECT_EQ(back.initial.family, c.initial.family);
  EXPECT_EQ(back.initial.epsilon, c.initial.epsilon);
  EXPECT_EQ(back.tolerances.oracle_sup, 1e-2);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& entry : fs::directory_iterator(COAG_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path()).validate()) << entry.path();
  }
}

TEST(ScenarioNames, RoundTrip) {
  for (auto s : {Scenario::StationaryValidate, Scenario::ConvergeConstantM0, Scenario::Oscillate,
                 Scenario::Uniqueness, Scenario::OracleCompare}) {
    EXPECT_EQ(scenario_from_string(to_string(s)), s);
  }
  EXPECT_EQ(to_string(Scenario::OracleCompare), "oracle-compare");
  EXPECT_THROW(scenario_from_string("converge"), InvalidArgument);
}

TEST(Verdict, Comparisons) {
  EXPECT_TRUE(make_verdict("a", 1.0, "<", 2.0, "").passed);
  EXPECT_FALSE(make_verdict("a", 2.0, "<", 2.0, "").passed);
  EXPECT_TRUE(make_verdict("a", 2.0, "<=", 2.0, "").passed);
  EXPECT_TRUE(make_verdict("a", 3.0, ">", 2.0, "").passed);
  EXPECT_FALSE(make_verdict("a", 2.0, ">", 2.0, "").passed);
  EXPECT_TRUE(make_verdict("a", 1.15, "band", 0.2, "", 1.0).passed);
  EXPECT_FALSE(make_verdict("a", 1.25, "band", 0.2, "", 1.0).passed);
  EXPECT_FALSE(make_verdict("a", std::nan(""), "<", 1.0, "").passed);
  const auto v = make_verdict("a", 0.5, "<", 1.0, "anchor text");
  EXPECT_EQ(v.tolerance, 1.0);
  EXPECT_EQ(v.anchor, "anchor text");
}

TEST(StationaryScenario, PassesAtGammaZero) {
  ExperimentConfig c;
  const auto r = run_stationary_validate(c);
  EXPECT_TRUE(r.all_passed());
  EXPECT_NEAR(r.summary.at("sigma"), 2.690093067619309, 1e-10);
  for (const auto& v : r.verdicts) EXPECT_TRUE(v.passed) << v.name << " = " << v.value;
}

TEST(StationaryScenario, ReportsPlateauAtGammaHalf) {
  ExperimentConfig c;
  c.gamma = 0.5;
  const auto r = run_stationary_validate(c);
  EXPECT_TRUE(r.all_passed());
  EXPECT_NEAR(r.summary.at("alpha"), 0.5 * std::numbers::ln2, 1e-15);
  EXPECT_NEAR(r.summary.at("plateau"), coag::testing::plateau_oracle(0.5), 1e-14);
}

TEST(StationaryScenario, NegativeSeedFailsFast) {
  ExperimentConfig c;
  c.profile_a = -1.0;
  EXPECT_THROW(run_stationary_validate(c), ProfileError);
}

TEST(ConvergeScenario, ExactStationaryDataStaysPut) {
  auto c = small_converge();
  c.initial.family = Family::ShiftedProfile;
  c.initial.shift = 1.0;
  const auto r = run_converge_constant_m0(c);
  EXPECT_TRUE(r.all_passed());
  EXPECT_LT(r.summary.at("distance_initial"), 1e-6);
  EXPECT_LT(r.summary.at("distance_final"), 1e-6);
}

TEST(ConvergeScenario, RequiresConstantFibreMass) {
  auto c = small_converge();
  c.initial.family = Family::ModulatedProfile;
  EXPECT_THROW(run_converge_constant_m0(c), InvalidArgument);
}

TEST(ConvergeScenario, LyapunovVerdictsHoldOnShortRun) {
  const auto r = run_converge_constant_m0(small_converge());
  for (const char* name : {"mass law on every fibre", "uniform bound", "clamp accounting",
                           "L(n+theta) nonincreasing", "jump relation"}) {
    const auto* v = find_verdict(r, name);
    ASSERT_NE(v, nullptr) << name;
    EXPECT_TRUE(v->passed) << name << " = " << v->value;
  }
  EXPECT_LT(r.summary.at("distance_final"), r.summary.at("distance_initial"));
}

TEST(OscillateScenario, UnmodulatedDataHasNoFloor) {
  ExperimentConfig c;
  c.scenario = Scenario::Oscillate;
  c.horizon = 8.0;
  c.fibres = 8;
  c.initial.family = Family::ModulatedProfile;
  c.initial.shift = 1.0;
  c.initial.epsilon = 0.0;
  const auto r = run_oscillate(c);
  const auto* floor = find_verdict(r, "single-shift distance floor");
  ASSERT_NE(floor, nullptr);
  EXPECT_FALSE(floor->passed);
  EXPECT_FALSE(r.all_passed());
}

TEST(UniquenessScenario, IdenticalSeedsNeedNoShift) {
  ExperimentConfig c;
  c.scenario = Scenario::Uniqueness;
  c.horizon = 2.0;
  c.fibres = 4;
  c.uniqueness_ratio = 1.0;
  c.initial.family = Family::PerturbedProfile;
  c.initial.epsilon = 0.4;
  c.initial.width = 0.75;
  const auto r = run_uniqueness(c);
  EXPECT_NEAR(r.summary.at("best_shift"), 0.0, 1e-6);
  const auto* v = find_verdict(r, "a and a 2^sigma coincide after translation");
  ASSERT_NE(v, nullptr);
  EXPECT_TRUE(v->passed);
}

TEST(BestFitShift, RecoversShiftOfStationaryFibre) {
  const auto prof = coag::testing::shared_profile();
  const double lambda = 0.37;
  const InitialData h0 = [prof, lambda](double x) { return (*prof)(x - lambda); };
  const auto [lo, hi] = required_window(h0, 0.4, prof->params());
  auto f = init_fibre(h0, 0.4, lo, hi, prof->params());
  evolve(f, 1.3);
  EXPECT_NEAR(best_fit_shift(f, *prof, -2.0, 2.0), lambda, 1e-6);
}

TEST(Reports, RerunsAreByteIdentical) {
  auto c = small_converge();
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  auto ra = run_scenario(c);
  write_report(ra, a);
  auto rb = run_scenario(c);
  write_report(rb, b);
  std::size_t csv = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++csv;
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
  }
  EXPECT_GT(csv, 0u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Reports, JsonCitesTolerances) {
  ExperimentReport r;
  r.verdicts.push_back(make_verdict("x", 0.5, "<", 1.0, "some statement"));
  r.summary["inf"] = std::numeric_limits<double>::infinity();
  const auto j = nlohmann::json::parse(report_to_json(r));
  ASSERT_EQ(j.at("verdicts").size(), 1u);
  EXPECT_EQ(j["verdicts"][0]["tolerance"].get<double>(), 1.0);
  EXPECT_EQ(j["verdicts"][0]["anchor"].get<std::string>(), "some statement");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_TRUE(j["summary"]["inf"].is_string());
}

TEST(Reports, CsvUsesFullPrecision) {
  Table t{"t", {"a", "b"}, {{0.1, 1.0 / 3.0}}};
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(), "a,b\n0.10000000000000001,0.33333333333333331\n");
}

TEST(Plots, EmptyReportWritesNothing) {
  ExperimentReport r;
  ASSERT_TRUE(r.empty());
  const auto dir = scratch("empty_plots");
  const auto res = emit_plots(r, dir);
  EXPECT_EQ(res.written, 0u);
  EXPECT_FALSE(res.warning.empty());
  EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));
}

TEST(Plots, RenderSkipsNonpositiveOnLogAxis) {
  Plot p{"p", "title & <stuff>", "x", "y", true, {{"c", {0.0, 1.0, 2.0}, {1.0, 0.0, 1e-3}}}};
  const auto svg = render_svg(p);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("&amp;"), std::string::npos);
  EXPECT_EQ(svg.find("<stuff>"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plots, ConvergeRunWritesDistanceCurve) {
  auto r = run_scenario(small_converge());
  const auto dir = scratch("converge_plots");
  const auto res = emit_plots(r, dir);
  EXPECT_GT(res.written, 0u);
  EXPECT_TRUE(fs::exists(dir / "distance.svg"));
  fs::remove_all(dir);
}
