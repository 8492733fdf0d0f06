#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "optstudy/analytic.hpp"
#include "optstudy/error.hpp"
#include "optstudy/optimize.hpp"
#include "optstudy/rng.hpp"
#include "optstudy/sampling.hpp"
#include "paths.hpp"

using namespace optstudy;
using optstudy::testing::ScratchDir;

namespace {

Objective quadratic_1d(double center, double lo, double hi) {
  Objective o;
  o.eval = [center](const Eigen::VectorXd& x) { return (x(0) - center) * (x(0) - center); };
  o.grad = [center](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, 2.0 * (x(0) - center)); };
  o.lower = Eigen::VectorXd::Constant(1, lo);
  o.upper = Eigen::VectorXd::Constant(1, hi);
  return o;
}

Objective rosenbrock() {
  Objective o;
  o.eval = [](const Eigen::VectorXd& x) {
    return std::pow(1 - x(0), 2) + 100 * std::pow(x(1) - x(0) * x(0), 2);
  };
  o.grad = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    g(0) = -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0));
    g(1) = 200 * (x(1) - x(0) * x(0));
    return g;
  };
  o.lower = Eigen::Vector2d(-2, -2);
  o.upper = Eigen::Vector2d(2, 2);
  return o;
}

struct BoxQuadratic {
  Eigen::MatrixXd H;
  Eigen::VectorXd c;
  Eigen::VectorXd lo, hi;
  double operator()(const Eigen::VectorXd& x) const { return 0.5 * (x - c).dot(H * (x - c)); }
};

BoxQuadratic random_problem(UniformStream& s, Eigen::Index m) {
  BoxQuadratic p;
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = s.next_unit() - 0.5;
  p.H = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(m, m);
  p.c.resize(m);
  p.lo.resize(m);
  p.hi.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    p.c(i) = 4.0 * s.next_unit() - 2.0;
    p.lo(i) = -1.0 + s.next_unit();
    p.hi(i) = p.lo(i) + 0.5 + s.next_unit();
  }
  return p;
}

// Exhaustive zooming grid: 41 points per axis, shrink around the best cell.
double grid_oracle(const BoxQuadratic& p) {
  const auto m = p.lo.size();
  Eigen::VectorXd lo = p.lo, hi = p.hi;
  double best = 1e300;
  Eigen::VectorXd arg = lo;
  const int k = 41;
  for (int round = 0; round < 40; ++round) {
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    while (true) {
      Eigen::VectorXd x(m);
      for (Eigen::Index i = 0; i < m; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * idx[static_cast<std::size_t>(i)] / (k - 1.0);
      const double f = p(x);
      if (f < best) {
        best = f;
        arg = x;
      }
      Eigen::Index d = 0;
      while (d < m && ++idx[static_cast<std::size_t>(d)] == k) idx[static_cast<std::size_t>(d++)] = 0;
      if (d == m) break;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const double w = (hi(i) - lo(i)) / (k - 1.0) * 2.0;
      lo(i) = std::max(p.lo(i), arg(i) - w);
      hi(i) = std::min(p.hi(i), arg(i) + w);
    }
  }
  return best;
}

Poly1DSurrogate line(double slope, double intercept, double lo, double hi) {
  Poly1DSurrogate g;
  g.degree = 1;
  g.coeffs = {intercept, slope};
  g.lower = lo;
  g.upper = hi;
  return g;
}

ASResult direction_of(Eigen::VectorXd w) {
  ASResult as;
  as.direction = std::move(w);
  return as;
}

std::vector<ParameterDef> unit_box(std::size_t m) {
  std::vector<ParameterDef> p;
  for (std::size_t i = 0; i < m; ++i) p.push_back({"x" + std::to_string(i + 1), 0.0, 1.0});
  return p;
}

} // namespace

TEST(Lbfgsb, InteriorMinimum) {
  const auto res = minimize_lbfgsb(quadratic_1d(3.0, 0.0, 10.0), Eigen::VectorXd::Constant(1, 9.0));
  EXPECT_NEAR(res.x_star(0), 3.0, 1e-8);
  EXPECT_EQ(res.termination, Termination::gradient_tol);
}

TEST(Lbfgsb, ActiveBound) {
  const auto obj = quadratic_1d(3.0, 4.0, 10.0);
  const auto res = minimize_lbfgsb(obj, Eigen::VectorXd::Constant(1, 9.0));
  EXPECT_EQ(res.x_star(0), 4.0);
  EXPECT_EQ(res.termination, Termination::gradient_tol);
  EXPECT_EQ(projected_gradient(res.x_star, obj.grad(res.x_star), obj.lower, obj.upper).norm(), 0.0);
}

TEST(Lbfgsb, StartOutsideBoxIsClamped) {
  const auto res = minimize_lbfgsb(quadratic_1d(3.0, 0.0, 10.0), Eigen::VectorXd::Constant(1, 25.0));
  EXPECT_NEAR(res.x_star(0), 3.0, 1e-8);
  EXPECT_FALSE(res.warnings.empty());
}

TEST(Lbfgsb, Rosenbrock) {
  const auto res = minimize_lbfgsb(rosenbrock(), Eigen::Vector2d(-1.2, 1.0), {.tolerance = 1e-10, .max_iter = 2000});
  EXPECT_NEAR(res.x_star(0), 1.0, 1e-5);
  EXPECT_NEAR(res.x_star(1), 1.0, 1e-5);
  const auto from_center = minimize_lbfgsb(rosenbrock(), Eigen::Vector2d(0.0, 0.0), {.tolerance = 1e-10, .max_iter = 2000});
  EXPECT_NEAR(from_center.x_star(0), 1.0, 1e-5);
}

TEST(Lbfgsb, MatchesGridOracleAndStaysFeasible) {
  UniformStream s(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index m = 1 + trial % 2;
    const auto p = random_problem(s, m);
    Objective o;
    o.eval = [p](const Eigen::VectorXd& x) { return p(x); };
    o.grad = [p](const Eigen::VectorXd& x) { return Eigen::VectorXd(p.H * (x - p.c)); };
    o.lower = p.lo;
    o.upper = p.hi;
    const auto res = minimize_lbfgsb(o, 0.5 * (p.lo + p.hi));
    EXPECT_NEAR(res.objective_value, grid_oracle(p), 1e-6) << "trial " << trial;
    EXPECT_TRUE((res.x_star.array() >= p.lo.array()).all() && (res.x_star.array() <= p.hi.array()).all());
    EXPECT_EQ(res.objective_value, o.eval(res.x_star));
    for (std::size_t k = 1; k < res.trace.size(); ++k) EXPECT_LE(res.trace[k].objective, res.trace[k - 1].objective);

    // scaling the objective leaves the argmin alone
    Objective scaled = o;
    scaled.eval = [p](const Eigen::VectorXd& x) { return 7.0 * p(x); };
    scaled.grad = [p](const Eigen::VectorXd& x) { return Eigen::VectorXd(7.0 * p.H * (x - p.c)); };
    const auto res7 = minimize_lbfgsb(scaled, 0.5 * (p.lo + p.hi));
    EXPECT_LE((res7.x_star - res.x_star).norm(), 1e-5);
  }
}

TEST(Lbfgsb, MemoryNeverExceedsCapacity) {
  LbfgsMemory mem(3);
  UniformStream s(1);
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd sv(4), yv(4);
    for (int i = 0; i < 4; ++i) {
      sv(i) = s.next_unit();
      yv(i) = sv(i) * (1.0 + s.next_unit());
    }
    EXPECT_TRUE(mem.push(sv, yv));
    EXPECT_LE(mem.size(), 3u);
  }
  EXPECT_EQ(mem.size(), 3u);
  // negative curvature is rejected
  EXPECT_FALSE(mem.push(Eigen::Vector4d(1, 0, 0, 0), Eigen::Vector4d(-1, 0, 0, 0)));
  const Eigen::VectorXd d = mem.direction(Eigen::Vector4d(1, 1, 1, 1), {false, true, false, false});
  EXPECT_EQ(d(1), 0.0);
  EXPECT_LT(d.dot(Eigen::Vector4d(1, 0, 1, 1)), 0.0);
}

TEST(Brent, Examples) {
  int outside = 0;
  auto guarded = [&](auto fn, double lo, double hi) {
    return [=, &outside](double x) {
      if (x < lo || x > hi) ++outside;
      return fn(x);
    };
  };
  const auto r1 = minimize_scalar_bounded(guarded([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0), 0.0, 1.0);
  EXPECT_NEAR(r1.x_star(0), 0.3, 1e-9);
  const auto r2 = minimize_scalar_bounded(guarded([](double x) { return -x; }, 0.0, 1.0), 0.0, 1.0);
  EXPECT_EQ(r2.x_star(0), 1.0);
  const auto r3 = minimize_scalar_bounded(guarded([](double x) { return x * x * x; }, -2.0, 5.0), -2.0, 5.0);
  EXPECT_EQ(r3.x_star(0), -2.0);
  EXPECT_EQ(outside, 0);
  EXPECT_EQ(r1.termination, Termination::interval_tol);
}

TEST(Brent, DecayTargetClosedForm) {
  const double q0 = 0.02, k = 34.657359027997266;
  auto f = [&](double nu) {
    const double r = q0 * std::exp(-k * nu) - 0.01;
    return r * r;
  };
  const auto res = minimize_scalar_bounded(f, 0.01, 0.03);
  EXPECT_NEAR(res.x_star(0), std::log(q0 / 0.01) / k, 1e-6);
}

TEST(CompileObjective, GoalsAndGradients) {
  QuadraticSurrogate q;
  q.intercept = 10.0;
  q.linear = Eigen::Vector2d(3.0, -1.0);
  q.quadratic = Eigen::Matrix2d::Identity();
  const Surrogate s = q;
  const Eigen::Vector2d lo(0, 0), hi(1, 1);
  const Eigen::Vector2d x(0.3, 0.6);
  const double p = predict(s, x);

  const auto mn = compile_objective({GoalKind::minimize, std::nullopt, "q"}, s, lo, hi);
  const auto mx = compile_objective({GoalKind::maximize, std::nullopt, "q"}, s, lo, hi);
  const auto tg = compile_objective({GoalKind::target, 25.0, "q"}, s, lo, hi);
  const auto bl = compile_objective({GoalKind::below, 25.0, "yplus"}, s, lo, hi);
  EXPECT_EQ(mn.eval(x), p);
  EXPECT_EQ(mx.eval(x), -p);
  EXPECT_EQ(tg.eval(x), (p - 25.0) * (p - 25.0));
  EXPECT_EQ(bl.eval(x), (p - 25.0) * (p - 25.0));
  EXPECT_EQ(bl.description, "(yplus - 25)^2");

  const double h = 1e-5;
  for (const auto* o : {&mn, &mx, &tg, &bl}) {
    const Eigen::VectorXd g = o->grad(x);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (o->eval(xp) - o->eval(xm)) / (2 * h);
      EXPECT_NEAR(g(i), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }

  try {
    compile_objective({GoalKind::min_input_at_target, 1.0, "q"}, s, lo, hi);
    FAIL();
  } catch (const StudyError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedGoal);
  }
  EXPECT_THROW(compile_objective({GoalKind::target, std::nullopt, "q"}, s, lo, hi), StudyError);
}

TEST(OptimizeReduced, LinearMinimizeGoesToTheFace) {
  ReducedModel red;
  red.g = line(2.0, 0.0, 0.0, 1.0);
  const auto box = unit_box(2);
  const auto res = optimize_reduced(red, direction_of(Eigen::Vector2d(1.0, 0.0)), {GoalKind::minimize, std::nullopt, "q"}, box);
  EXPECT_NEAR(*res.z_star, 0.0, 1e-8);
  EXPECT_NEAR(res.x_star(0), 0.0, 1e-8);
  EXPECT_EQ(res.x_star(1), 0.5); // axis-aligned ray leaves the other coordinate at the center
  EXPECT_FALSE(res.clamped);
}

TEST(OptimizeReduced, TargetInsideRangeIsHit) {
  ReducedModel red;
  const Eigen::Vector2d w = Eigen::Vector2d(0.6, 0.8);
  red.g = line(10.0, 1.0, 0.0, 1.4);
  std::vector<ParameterDef> box{{"u", 8.0, 12.0}, {"k", 0.3, 0.45}};
  const auto res = optimize_reduced(red, direction_of(w), {GoalKind::target, 8.0, "q"}, box);
  ASSERT_FALSE(res.clamped);
  const Eigen::VectorXd xn = normalize_point(box, res.x_star);
  EXPECT_LE(std::abs(predict(red.g, w.dot(xn)) - 8.0), 1e-6);
  EXPECT_TRUE((res.x_star.array() >= Eigen::Vector2d(8.0, 0.3).array()).all());
}

TEST(OptimizeReduced, ClampingIsFlagged) {
  ReducedModel red;
  const Eigen::Vector2d w = Eigen::Vector2d(1.0, 1.0).normalized();
  red.g = line(1.0, 0.0, 0.0, std::sqrt(2.0));
  const auto box = unit_box(2);
  const auto res = optimize_reduced(red, direction_of(w), {GoalKind::target, 0.05, "q"}, box);
  // the diagonal ray covers the whole z range
  EXPECT_FALSE(res.clamped);
  const Eigen::Vector2d w2(0.6, 0.8);
  red.g = line(1.0, 0.0, 0.0, 1.4);
  const auto res2 = optimize_reduced(red, direction_of(w2), {GoalKind::maximize, std::nullopt, "q"}, box);
  // the ray through the center leaves the box at z = 1.325, short of 1.4
  EXPECT_TRUE(res2.clamped);
  EXPECT_FALSE(res2.warnings.empty());
  EXPECT_TRUE((res2.x_star.array() >= 0.0).all() && (res2.x_star.array() <= 1.0).all());
}

TEST(TargetScan, Examples) {
  // ramp from 0.6 to 1.1 reaching 0.0707; 2% tolerance first met at 0.6 + 0.5 * 0.98
  auto sat = [](double phi) { return 0.0707 * std::clamp((phi - 0.6) / 0.5, 0.0, 1.0); };
  const auto hit = min_input_at_target(sat, 0.5, 1.5, 0.0707);
  EXPECT_TRUE(hit.reached);
  EXPECT_NEAR(hit.x, 0.6 + 0.5 * 0.98, 1e-9);

  const auto flat = min_input_at_target([](double) { return 3.0; }, 2.0, 4.0, 3.0);
  EXPECT_TRUE(flat.reached);
  EXPECT_EQ(flat.x, 2.0);

  const auto never = min_input_at_target([](double x) { return x; }, 0.0, 1.0, 5.0);
  EXPECT_FALSE(never.reached);
  EXPECT_EQ(never.x, 1.0);

  // 2x within 2% of 1 first at x = 0.49
  const auto poly = min_input_at_target(line(2.0, 0.0, 0.0, 1.0), 1.0);
  EXPECT_TRUE(poly.reached);
  EXPECT_NEAR(poly.x, 0.49, 1e-12);
}

TEST(Validate, ExactAnalyticSurrogate) {
  ScratchDir tmp("validate");
  BackendConfig cfg;
  cfg.analytic_name = "linear";
  cfg.analytic_params = {{"c", 1.0}, {"b0", 2.0}};
  const auto box = unit_box(1);
  const auto rep = validate_optimum(cfg, {"q", BackendDirect{}, std::nullopt}, box, Eigen::VectorXd::Constant(1, 0.25),
                                    1.5, tmp.path());
  ASSERT_TRUE(rep.available);
  EXPECT_EQ(rep.actual, 1.5);
  EXPECT_LE(rep.rel_error, 1e-10);
}

TEST(Validate, QuenchCliffShowsTheError) {
  ScratchDir tmp("quench");
  BackendConfig cfg;
  cfg.analytic_name = "quench";
  std::vector<ParameterDef> box{{"inlet_velocity", 10.0, 60.0}};
  std::vector<double> v, q;
  for (int i = 0; i < 9; ++i) {
    v.push_back(10.0 + 50.0 * i / 8.0);
    q.push_back(300.0 + 1700.0 / (1.0 + std::exp(0.5 * (v.back() - 40.0))));
  }
  const auto g = fit_poly1d(v, q);
  const auto opt = minimize_scalar_bounded([&](double x) { return std::pow(predict(g, x) - 1000.0, 2); }, 10.0, 60.0);
  const double predicted = predict(g, opt.x_star(0));
  const auto rep = validate_optimum(cfg, {"T", BackendDirect{}, std::nullopt}, box, opt.x_star, predicted, tmp.path());
  ASSERT_TRUE(rep.available);
  const double actual = 300.0 + 1700.0 / (1.0 + std::exp(0.5 * (opt.x_star(0) - 40.0)));
  EXPECT_NEAR(rep.actual, actual, 1e-9);
  EXPECT_NEAR(rep.rel_error, std::abs(actual - predicted) / (1.0 + std::abs(actual)), 1e-15);
  EXPECT_GT(rep.rel_error, 1e-3);
}

TEST(Validate, TimeoutIsUnavailable) {
  ScratchDir tmp("vtimeout");
  std::filesystem::create_directories(tmp / "tpl");
  std::ofstream(tmp / "tpl/in") << "@{x1}\n";
  BackendConfig cfg;
  cfg.kind = BackendKind::process_template;
  cfg.template_dir = (tmp / "tpl").string();
  cfg.run_command = {"sleep", "5"};
  cfg.timeout_seconds = 0.2;
  const auto rep = validate_optimum(cfg, {"q", BackendDirect{}, std::nullopt}, unit_box(1),
                                    Eigen::VectorXd::Constant(1, 0.5), 1.0, tmp / "case");
  EXPECT_FALSE(rep.available);
  EXPECT_NE(rep.message.find("timeout"), std::string::npos);
}
