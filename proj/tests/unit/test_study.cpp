#include <gtest/gtest.h>

#include "optstudy/error.hpp"
#include "optstudy/prompt.hpp"
#include "optstudy/study.hpp"
#include "optstudy/study_file.hpp"
#include "paths.hpp"

using namespace optstudy;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const StudyError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a StudyError";
  return ErrorCode::IoError;
}

const ParameterDef& param(const StudySpec& s, std::size_t i) { return s.analysis.parameters.at(i); }

// Prompts as users typed them for the five case studies.
const char* kPitzSingle =
    "Please help me analyze the effect of the inlet flow velocity on max yplus in a simulation: do a RANS "
    "simulation of incompressible pitzDaily flow using pimpleFoam";
const char* kPitzDouble =
    "Please help me analyze the effect of the inlet flow velocity and inlet turbulent kinetic energy on max yplus "
    "and determine the optimal inlet flow velocity and inlet turbulent kinetic energy at which max yplus is blow 25 "
    "in a simulation: do a RANS simulation of incompressible pitzDaily flow using pimpleFoam";
const char* kHit =
    "Please help me analyze the effect of the laminar viscosity $\\nu_{in_physicalProperties}$ (from 0.01 to 0.1) on "
    "the average turbulent kinetic energy ($average(1/2*U^2)$) and determine the optimal "
    "$\\nu_{in_physicalProperties}$ at which the average turbulent kinetic energy is near 0.01 in the simulation: do "
    "a DNS simulation of incompressible forcing homogeneous isotropic turbulence (boxTurb) using dnsFoam with Grid 16^3";
const char* kCavitySingle =
    "Please help me analyze the effect of the temperature difference between the hot and cold (from 10 K to 30 K) on "
    "the max velocity in X direction and determine the optimal temperature difference between the hot and cold at "
    "which max velocity in X direction is near 0.07 m/s in a simulation: do a RANS simulation of buoyantCavity using "
    "buoyantFoam";
const char* kCavityFour =
    "Please help me analyze the effect of the temperature difference between hot and cold (from 10 K to 30 K), k of "
    "all boundarys (from $1e-04$ to $1e-03$), ϵ of all boundarys (from $1e-06$ to $1e-05$) and Prt of all boundarys "
    "in α (from 0.6 to 1.0) on the max velocity in X direction in a simulation: do a RANS simulation of buoyantCavity "
    "using buoyantFoam and kEpsilon turbulent model";
const char* kFlameSingle =
    "Please help me analyze the effect of inlet velocity (from 10.0 to 60.0 m/s) on max temperature and determine the "
    "optimal inlet velocity at which max temperature is blow 1000 K in the simulation: do a 2D laminar simulation of "
    "counterflow flame using reactingFoam in combustion";
const char* kFlameDouble =
    "Please help me analyze the effect of inlet velocity (from 10.0 to 60.0 m/s) and inlet temperature (from 243 to "
    "343 K) on max temperature in the simulation: do a 2D laminar simulation of counterflow flame using reactingFoam";
const char* kHydrogenSingle =
    "Analyze the effect of equivalenceRatio (from 0.5 to 1.5) on the distance from the origin at latest time and "
    "determine the min equivalenceRatio at which d is near d_{max} (0.0707) at latest time";
const char* kHydrogenTriple =
    "Analyze the effect of equivalenceRatio (from 0.5 to 1.5), initial turbulent kinetic energy (from 1 to 10), "
    "initial ignition duration time (from 0 to 0.002) on the distance from the origin";

} // namespace

TEST(ParsePrompt, SingleParameterWithRangeAndUnits) {
  const auto s = parse_prompt("Analyze the effect of inlet velocity (from 10.0 to 60.0 m/s) on max temperature");
  ASSERT_EQ(s.dimension(), 1u);
  EXPECT_EQ(param(s, 0).name, "inlet_velocity");
  EXPECT_EQ(param(s, 0).lower, 10.0);
  EXPECT_EQ(param(s, 0).upper, 60.0);
  EXPECT_EQ(param(s, 0).units, "m/s");
  EXPECT_EQ(param(s, 0).range_origin, RangeOrigin::explicit_bounds);
  EXPECT_EQ(s.postprocess.qoi.name, "max_temperature");
  EXPECT_FALSE(s.goal.has_value());
}

TEST(ParsePrompt, NearGoalBecomesTarget) {
  const auto s = parse_prompt(
      "analyze the effect of nu_in_physicalProperties (from 0.01 to 0.1) on the average turbulent kinetic energy and "
      "determine the optimal nu_in_physicalProperties at which the average turbulent kinetic energy is near 0.01");
  ASSERT_TRUE(s.goal.has_value());
  EXPECT_EQ(s.goal->kind, GoalKind::target);
  EXPECT_EQ(*s.goal->target, 0.01);
}

TEST(ParsePrompt, OptimizationClauseAlone) {
  const auto s = parse_prompt(
      "determine the optimal nu_in_physicalProperties at which the average turbulent kinetic energy is near 0.01",
      {.nominals = {{"nu_in_physicalProperties", 0.05}}});
  ASSERT_EQ(s.dimension(), 1u);
  EXPECT_EQ(s.goal->kind, GoalKind::target);
  EXPECT_EQ(param(s, 0).range_origin, RangeOrigin::nominal_default);
  EXPECT_DOUBLE_EQ(param(s, 0).lower, 0.04);
  EXPECT_DOUBLE_EQ(param(s, 0).upper, 0.06);
}

TEST(ParsePrompt, DegenerateInputsAreRejected) {
  EXPECT_EQ(code_of([] { parse_prompt("analyze the effect of"); }), ErrorCode::UnrecognizedTemplate);
  EXPECT_EQ(code_of([] { parse_prompt("tell me a story about flames"); }), ErrorCode::UnrecognizedTemplate);
  EXPECT_EQ(code_of([] { parse_prompt(""); }), ErrorCode::UnrecognizedTemplate);
  EXPECT_EQ(code_of([] { parse_prompt("analyze the effect of v (from 5 to 2) on q"); }), ErrorCode::MalformedRange);
  EXPECT_EQ(code_of([] { parse_prompt("determine the optimal v at which q is near"); }), ErrorCode::MissingTarget);
}

TEST(ParsePrompt, DefaultRangeIsFlaggedNeverInvented) {
  const auto s = parse_prompt("analyze the effect of the inlet flow velocity on max yplus",
                              {.nominals = {{"inlet_flow_velocity", 10.0}}});
  EXPECT_EQ(param(s, 0).lower, 8.0);
  EXPECT_EQ(param(s, 0).upper, 12.0);
  EXPECT_EQ(param(s, 0).range_origin, RangeOrigin::nominal_default);
  EXPECT_EQ(*param(s, 0).nominal, 10.0);

  const auto unit = parse_prompt("analyze the effect of the inlet flow velocity on max yplus");
  EXPECT_EQ(param(unit, 0).range_origin, RangeOrigin::nominal_default);
}

TEST(ParsePrompt, CaseStudyPromptsYieldStatedParameterCounts) {
  struct Case {
    const char* text;
    std::size_t m;
  };
  for (const Case& c : {Case{kPitzSingle, 1}, Case{kPitzDouble, 2}, Case{kHit, 1}, Case{kCavitySingle, 1},
                        Case{kCavityFour, 4}, Case{kFlameSingle, 1}, Case{kFlameDouble, 2}, Case{kHydrogenSingle, 1},
                        Case{kHydrogenTriple, 3}}) {
    const auto s = parse_prompt(c.text);
    EXPECT_EQ(s.dimension(), c.m) << c.text;
  }
}

TEST(ParsePrompt, CaseStudyBoundsAreVerbatim) {
  const auto hit = parse_prompt(kHit);
  EXPECT_EQ(param(hit, 0).lower, 0.01);
  EXPECT_EQ(param(hit, 0).upper, 0.1);
  EXPECT_EQ(*hit.goal->target, 0.01);

  const auto cavity = parse_prompt(kCavityFour);
  EXPECT_EQ(param(cavity, 0).lower, 10.0);
  EXPECT_EQ(param(cavity, 0).upper, 30.0);
  EXPECT_EQ(param(cavity, 1).lower, 1e-4);
  EXPECT_EQ(param(cavity, 1).upper, 1e-3);
  EXPECT_EQ(param(cavity, 2).lower, 1e-6);
  EXPECT_EQ(param(cavity, 2).upper, 1e-5);
  EXPECT_EQ(param(cavity, 3).lower, 0.6);
  EXPECT_EQ(param(cavity, 3).upper, 1.0);

  const auto flame = parse_prompt(kFlameDouble);
  EXPECT_EQ(param(flame, 1).name, "inlet_temperature");
  EXPECT_EQ(param(flame, 1).lower, 243.0);
  EXPECT_EQ(param(flame, 1).upper, 343.0);

  const auto hydrogen = parse_prompt(kHydrogenSingle);
  EXPECT_EQ(param(hydrogen, 0).name, "equivalenceRatio");
  EXPECT_EQ(param(hydrogen, 0).lower, 0.5);
  EXPECT_EQ(param(hydrogen, 0).upper, 1.5);
  EXPECT_EQ(hydrogen.goal->kind, GoalKind::min_input_at_target);
  EXPECT_EQ(*hydrogen.goal->target, 0.0707);
}

TEST(ParsePrompt, BelowGoalAcceptsTheTypoSpelling) {
  const auto s = parse_prompt(kPitzDouble);
  ASSERT_TRUE(s.goal.has_value());
  EXPECT_EQ(s.goal->kind, GoalKind::below);
  EXPECT_EQ(*s.goal->target, 25.0);
  EXPECT_EQ(s.simulation.description, "do a RANS simulation of incompressible pitzDaily flow using pimpleFoam");
}

TEST(ParsePrompt, AsCloseAsPossibleIsATarget) {
  const auto s = parse_prompt(
      "analyze the effect of the inlet flow velocity (from 8 to 12) on max yplus and determine the optimal inlet flow "
      "velocity at which the max yplus should be as close to 25 as possible");
  EXPECT_EQ(s.goal->kind, GoalKind::target);
  EXPECT_EQ(*s.goal->target, 25.0);
}

TEST(ParsePrompt, RenderedPromptsParseBack) {
  for (const char* text : {kHit, kCavityFour, kFlameSingle, kHydrogenSingle, kHydrogenTriple}) {
    const auto s = parse_prompt(text);
    const auto again = parse_prompt(render_prompt(s));
    EXPECT_EQ(again.analysis.parameters, s.analysis.parameters) << text;
    EXPECT_EQ(again.postprocess.qoi.name, s.postprocess.qoi.name);
    EXPECT_EQ(again.goal.has_value(), s.goal.has_value());
    if (s.goal) {
      EXPECT_EQ(again.goal->kind, s.goal->kind);
      EXPECT_EQ(again.goal->target, s.goal->target);
    }
  }
}

TEST(Identifier, SnakeCase) {
  EXPECT_EQ(to_identifier("inlet flow velocity"), "inlet_flow_velocity");
  EXPECT_EQ(to_identifier("k-epsilon  model"), "k_epsilon_model");
  EXPECT_EQ(to_identifier("$\\nu_{in_physicalProperties}$"), "nu_in_physicalProperties");
}

TEST(StudyFile, MinimalFileDefaultsTheta) {
  const auto s = parse_study_text(R"({
    "postprocess": {"qoi": {"name": "q"}},
    "parameters": [{"name": "v", "lower": 1, "upper": 2}]
  })");
  EXPECT_EQ(s.settings.theta, kDefaultTheta);
  EXPECT_EQ(s.settings.theta, 4.0);
  EXPECT_EQ(s.settings.seed, 0u);
}

TEST(StudyFile, InvariantViolations) {
  EXPECT_EQ(code_of([] {
              parse_study_text(R"({"postprocess": {"qoi": {"name": "q"}},
                                   "parameters": [{"name": "v", "lower": 1, "upper": 1}]})");
            }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] {
              parse_study_text(R"({"postprocess": {"qoi": {"name": "q"}},
                                   "parameters": [{"name": "v", "lower": 0, "upper": 1},
                                                  {"name": "v", "lower": 0, "upper": 2}]})");
            }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] {
              parse_study_text(R"({"postprocess": {"qoi": {"name": "q"}},
                                   "parameters": [{"name": "v", "lower": 0, "upper": 1}],
                                   "settings": {"theta": 12}})");
            }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] {
              parse_study_text(R"({"postprocess": {"qoi": {"name": "q"}},
                                   "parameters": [{"name": "v", "lower": 0, "upper": 1}],
                                   "goal": {"kind": "target"}})");
            }),
            ErrorCode::ValidationError);
}

TEST(StudyFile, SchemaErrorsNameTheField) {
  try {
    parse_study_text(R"({"postprocess": {"qoi": {"name": "q"}},
                         "parameters": [{"name": "v", "lower": 0, "upper": 1, "lowr": 3}]})");
    FAIL() << "expected SchemaError";
  } catch (const StudyError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    EXPECT_NE(std::string(e.what()).find("$.parameters[0].lowr"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_study_text("{ not json"); }), ErrorCode::SchemaError);
}

TEST(StudyFile, RenderRoundTripsAndIsByteStable) {
  auto s = parse_prompt(kHydrogenTriple);
  s.settings.seed = 17;
  s.goal = GoalSpec{GoalKind::target, 0.05, s.postprocess.qoi.name};
  const std::string a = render_spec(s);
  const std::string b = render_spec(s);
  EXPECT_EQ(a, b);
  EXPECT_EQ(parse_study_text(a), s);
  EXPECT_EQ(render_spec(parse_study_text(a)), a);
}

TEST(StudyFile, EmptyGoalOmitsOptimizationBlock) {
  const auto s = parse_prompt(kFlameDouble);
  EXPECT_EQ(render_spec(s).find("\"goal\""), std::string::npos);
}

TEST(StudyFile, ShippedStudiesLoad) {
  for (const char* name : {"demo_2param.json", "hit_decay.json", "hydrogen_saturating.json", "counterflow_quench.json",
                           "process_demo.json"}) {
    const auto s = load_spec(optstudy::testing::studies_dir() / name);
    EXPECT_TRUE(s.simulation.backend.has_value()) << name;
    EXPECT_TRUE(s.goal.has_value()) << name;
  }
  const auto proc = load_spec(optstudy::testing::studies_dir() / "process_demo.json");
  EXPECT_TRUE(std::filesystem::path(proc.simulation.backend->template_dir).is_absolute());
}
