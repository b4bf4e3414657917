#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tsfrac/errors.hpp"
#include "tsfrac/fracops.hpp"
#include "tsfrac/random.hpp"
#include "tsfrac/solver.hpp"
#include "tsfrac/verify.hpp"

using namespace tsfrac;

namespace {

GridPtr z_grid(double a, double b) { return share(TimeScaleGrid::lattice(a, b, 1.0)); }

RightHandSide linear(double l) {
  return {[l](double, double u) { return l * u; }, std::abs(l), "linear"};
}

RightHandSide zero_rhs() { return {[](double, double) { return 0.0; }, 0.0, "zero"}; }

CauchyProblem problem(GridPtr g, double alpha, RightHandSide f, double w, double eta) {
  CauchyProblem p;
  p.grid = std::move(g);
  p.alpha = alpha;
  p.rhs = std::move(f);
  p.w = w;
  p.eta = eta;
  return p;
}

/// Lattice h_a at distance m, independent of fracops.
double lattice_h(double a, int m) {
  if (m < a) return 0.0;
  double v = 1.0 / (std::tgamma(a + 1.0) * std::tgamma(1.0 - a));
  for (int p = 1; p <= m; ++p) v *= p / (p - a);
  return v;
}

}  // namespace

TEST_CASE("problem validation") {
  const auto z = z_grid(0, 5);
  CHECK_NOTHROW(problem(z, 0.5, linear(1), 1, 2).validate());
  CHECK_THROWS_AS(problem(z, 0.0, linear(1), 1, 2).validate(), DomainError);
  CHECK_THROWS_AS(problem(z, 1.5, linear(1), 1, 2).validate(), DomainError);
  CHECK_THROWS_AS(problem(z, 0.5, linear(1), 1, 0).validate(), DomainError);
  auto late = problem(z, 0.5, linear(1), 1, 2);
  late.t0_index = 5;
  CHECK_THROWS_AS(late.validate(), ArgumentError);
  CHECK_THROWS_AS(picard_solve(problem(z, 0.5, linear(1), 1, 2), 0.0, 10), ArgumentError);
}

TEST_CASE("operator G") {
  const auto z = z_grid(0, 6);
  const auto some = GridFunction::sample(z, [](double t) { return std::cos(t); });
  const auto homog = apply_G(problem(z, 0.5, zero_rhs(), 3.0, 1.0), some);
  for (std::size_t i = 0; i < z->size(); ++i)
    CHECK(homog.at(i) == doctest::Approx(3.0 * lattice_h(-0.5, static_cast<int>(i))).epsilon(1e-12));

  const auto classical = apply_G(problem(z, 1.0, linear(0.5), 2.0, 1.0), some);
  double running = 2.0;
  for (std::size_t i = 0; i < z->size(); ++i) {
    CHECK(classical.at(i) == doctest::Approx(running).epsilon(1e-14));
    running += 0.5 * std::cos(z->point(i));
  }

  const auto doubling = problem(z, 1.0, linear(1.0), 1.0, 2.0);
  const auto pow2 = GridFunction::sample(z, [](double t) { return std::exp2(t); });
  const auto g2 = apply_G(doubling, pow2);
  for (std::size_t i = 0; i < z->size(); ++i) CHECK(g2.at(i) == pow2.at(i));
}

TEST_CASE("zero right-hand side converges in one step") {
  const auto z = z_grid(0, 8);
  for (double alpha : {0.5, 0.8, 1.0}) {
    const SolveResult r = picard_solve(problem(z, alpha, zero_rhs(), 1.5, 1.0), 1e-12, 10);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    for (std::size_t i = 0; i < z->size(); ++i)
      CHECK(r.solution.at(i) ==
            doctest::Approx(1.5 * lattice_h(alpha - 1.0, static_cast<int>(i))).epsilon(1e-12));
  }
}

TEST_CASE("discrete exponential oracle") {
  const auto z = z_grid(0, 6);
  const SolveResult r = picard_solve(problem(z, 1.0, linear(0.5), 1.0, 2.0), 1e-12, 1000);
  CHECK(r.converged);
  CHECK(r.contraction_bound == 0.25);
  CHECK(r.contraction_observed <= 0.25 + 0.05);
  for (std::size_t i = 0; i < z->size(); ++i)
    CHECK(std::abs(r.solution.at(i) - std::pow(1.5, static_cast<double>(i))) <= 1e-10);

  const auto h = share(TimeScaleGrid::lattice(0, 4, 0.5));
  const SolveResult q = picard_solve(problem(h, 1.0, linear(-0.8), 2.0, 3.0), 1e-13, 1000);
  for (std::size_t i = 0; i < h->size(); ++i)
    CHECK(std::abs(q.solution.at(i) - 2.0 * std::pow(1 - 0.8 * 0.5, static_cast<double>(i))) <=
          1e-10);
}

TEST_CASE("continuous exponential oracle") {
  const auto u = share(TimeScaleGrid::uniform(0, 1, 1000));
  const SolveResult r = picard_solve(problem(u, 1.0, linear(1.0), 1.0, 2.0), 1e-12, 1000);
  double worst = 0.0;
  for (std::size_t i = 0; i < u->size(); ++i)
    worst = std::max(worst, std::abs(r.solution.at(i) - std::exp(u->point(i))));
  CHECK(worst <= 5e-3);
}

TEST_CASE("representations") {
  const auto u = share(TimeScaleGrid::uniform(0, 1, 100));
  auto rl = problem(u, 0.5, linear(0.3), 1.0, 1.0);
  const SolveResult a = picard_solve(rl, 1e-12, 1000);
  CHECK(a.solution.defined().begin == 1);
  CHECK_FALSE(a.solution.is_defined(0));
  std::stringstream csv;
  write_function_csv(csv, a.solution);
  CHECK(csv.str().find("\n0,") == std::string::npos);

  auto cap = rl;
  cap.representation = Representation::CaputoType;
  const SolveResult b = picard_solve(cap, 1e-12, 1000);
  CHECK(b.solution.at(0) == 1.0);

  const auto z = z_grid(0, 5);
  const SolveResult c = picard_solve(problem(z, 0.5, linear(0.3), 1.0, 1.0), 1e-12, 1000);
  CHECK(c.solution.is_defined(0));
  CHECK(c.solution.at(0) == doctest::Approx(2.0 / std::acos(-1.0)));
}

TEST_CASE("p1") {
  const auto z = z_grid(0, 6);
  CHECK(compute_p1(problem(z, 0.5, zero_rhs(), 0.0, 1.0)) == 0.0);
  CHECK(compute_p1(problem(z, 1.0, zero_rhs(), 1.0, 1.0)) == 1.0);
  const auto p = problem(z, 0.8, RightHandSide{[](double t, double u) { return std::sin(t) + u; }, 1.0, "s"},
                         -0.7, 2.0);
  const auto first = apply_G(p, GridFunction::constant(z, 0.0));
  CHECK(compute_p1(p) == weighted_norm(first, WeightedNormContext(z, 2.0, 0)));
}

TEST_CASE("non-convergence, divergence and bad right-hand sides") {
  const auto z = z_grid(0, 10);
  const auto p = problem(z, 1.0, linear(0.5), 1.0, 2.0);
  CHECK_THROWS_AS(picard_solve(p, 1e-14, 2), NonConvergenceError);
  try {
    picard_solve(p, 1e-14, 2);
  } catch (const NonConvergenceError& e) {
    CHECK(e.partial().iterations == 2);
    CHECK_FALSE(e.partial().converged);
    CHECK(e.partial().solution.defined().length() == z->size());
  }

  const SolveResult wild = picard_solve(problem(z, 1.0, linear(3.0), 1.0, 1.0), 1e-10, 1000);
  CHECK(wild.contraction_bound == 3.0);
  REQUIRE(wild.warnings.size() == 1);
  CHECK(wild.warnings[0].find("divergence") != std::string::npos);

  const auto nan_rhs = RightHandSide{[](double t, double u) { return t > 3 ? std::log(-1.0 - u * u) : u; },
                                     1.0, "nan"};
  CHECK_THROWS_AS(picard_solve(problem(z, 1.0, nan_rhs, 1.0, 2.0), 1e-10, 100), RhsEvaluationError);
}

TEST_CASE("solver invariants on seeded problems") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CauchyProblem p = random_problem(mix_seed(s + 1000), 30);
    const double q = p.rhs.lipschitz / p.eta;
    const double tol = 1e-10;
    const WeightedNormContext ctx(p.grid, p.eta, 0);
    const SolveResult r = picard_solve(p, tol, 2000);
    CHECK(r.converged);
    CHECK(r.final_metric <= tol);
    CHECK(r.residual <= 2 * tol);
    CHECK(r.contraction_observed <= q + 0.1);

    const SolveResult ref = picard_solve(p, tol / 100, 4000);
    CHECK(weighted_metric(r.solution, ref.solution, ctx) <= tol * q / (1 - q));

    const SolveResult z0 = picard_solve(p, tol, 2000, GridFunction::constant(p.grid, 0.0));
    CHECK(weighted_metric(r.solution, z0.solution, ctx) <= 10 * tol);

    for (std::size_t i = 2; i < r.metric_history.size(); ++i)
      CHECK(r.metric_history[i] <= r.metric_history[i - 1] * (1 + 1e-12) + 1e-300);

    if (p.alpha == 1.0) {
      std::vector<double> e(p.grid->size());
      e[0] = p.w;
      for (std::size_t i = 0; i + 1 < e.size(); ++i) e[i + 1] = e[i] + p.rhs(p.grid->point(i), e[i]);
      CHECK(weighted_metric(ref.solution, GridFunction(p.grid, e), ctx) <= 1e-10);
    }
  }
}

TEST_CASE("Lipschitz sampling") {
  const auto z = z_grid(0, 4);
  CHECK(sample_lipschitz(problem(z, 1.0, linear(-0.7), 1.0, 1.0), 3) == doctest::Approx(0.7));
  const auto sine =
      problem(z, 1.0, RightHandSide{[](double, double u) { return 2.0 * std::sin(u); }, 2.0, "s"}, 1, 3);
  const double s = sample_lipschitz(sine, 3, 2000);
  CHECK(s <= 2.0);
  CHECK(s > 1.5);
}

TEST_CASE("dependence H") {
  const auto z = z_grid(0, 8);
  const auto a = problem(z, 0.5, linear(0.5), 1.0, 2.0);
  const auto v = GridFunction::sample(z, [](double t) { return 1.0 + t; });
  const auto same = dependence_H({a, a, 0.5}, v);
  for (std::size_t i = 0; i < z->size(); ++i) CHECK(same.at(i) == 0.0);

  auto shifted = a;
  shifted.w = 1.25;
  const auto hw = dependence_H({a, shifted, 0.5}, v);
  for (std::size_t i = 0; i < z->size(); ++i)
    CHECK(hw.at(i) == doctest::Approx(0.25 * lattice_h(-0.5, static_cast<int>(i))).epsilon(1e-12));

  // Constant forcing: eps * I^alpha 1, which is eps * h_alpha at integer order and on the
  // continuous scale.
  const double eps = 0.01;
  auto plus = [eps](CauchyProblem p) {
    const auto f = p.rhs.fn;
    p.rhs.fn = [f, eps](double t, double u) { return f(t, u) + eps; };
    return p;
  };
  const auto a1 = problem(z, 1.0, linear(0.5), 1.0, 2.0);
  const auto h1 = dependence_H({a1, plus(a1), 0.5}, v);
  for (std::size_t i = 0; i < z->size(); ++i)
    CHECK(h1.at(i) == doctest::Approx(eps * z->point(i)).epsilon(1e-12));

  const auto u = share(TimeScaleGrid::uniform(0, 1, 200));
  const auto ac = problem(u, 0.5, linear(0.5), 1.0, 2.0);
  const auto hc = dependence_H({ac, plus(ac), 0.5}, GridFunction::constant(u, 1.0));
  for (std::size_t i = hc.defined().begin; i < u->size(); ++i)
    CHECK(hc.at(i) ==
          doctest::Approx(eps * std::sqrt(u->point(i)) / std::tgamma(1.5)).epsilon(1e-10));

  const auto hz = dependence_H({a, plus(a), 0.5}, v);
  for (std::size_t i = 1; i < z->size(); ++i) {
    double direct = 0.0;
    for (std::size_t j = 0; j < i; ++j) direct += lattice_h(-0.5, static_cast<int>(i - j - 1));
    CHECK(hz.at(i) == doctest::Approx(eps * direct).epsilon(1e-12));
  }

  auto other = a;
  other.alpha = 0.8;
  CHECK_THROWS_AS(dependence_H({a, other, 0.5}, v), ArgumentError);
}

TEST_CASE("dependence certification") {
  const auto z6 = z_grid(0, 6);
  const auto a = problem(z6, 1.0, linear(0.5), 1.0, 2.0);
  const DependenceReport same = dependence_certify({a, a, 0.5}, 1e-13, 1e-12);
  CHECK(same.bound.passed());
  for (std::size_t i = 0; i < z6->size(); ++i) {
    CHECK((*same.bound.actual)[i] == 0.0);
    CHECK(same.bound.bound[i] == 0.0);
  }

  auto b = a;
  b.w = 1.1;
  const DependenceReport pair = dependence_certify({a, b, 0.5}, 1e-13, 1e-12);
  CHECK(pair.bound.passed());
  for (std::size_t i = 0; i < z6->size(); ++i) {
    CHECK(std::abs((*pair.bound.actual)[i] - 0.1 * std::pow(1.5, static_cast<double>(i))) <= 1e-12);
    CHECK(pair.bound.bound[i] >= (*pair.bound.actual)[i] - 1e-12);
  }

  const auto z8 = z_grid(0, 8);
  const auto c = problem(z8, 0.5, linear(0.5), 1.0, 2.0);
  auto d = c;
  d.rhs.fn = [](double, double u) { return 0.5 * u + 0.01; };
  const DependenceReport frac = dependence_certify({c, d, 0.5}, 1e-14, 1e-12);
  CHECK(frac.bound.passed());
  const auto& slack = *frac.bound.slack;
  CHECK(std::abs(slack[0]) <= 1e-15);
  CHECK(std::abs(slack[1]) <= 1e-15);
  for (std::size_t i = 2; i < z8->size(); ++i) CHECK(slack[i] > 0.0);
}

TEST_CASE("dependence on seeded pairs") {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const CauchyProblem a = random_problem(mix_seed(s + 77), 15);
    Rng rng(s);
    CauchyProblem b = a;
    b.w += rng.uniform(-0.5, 0.5);
    const double eps = rng.uniform(-0.1, 0.1);
    const auto f = a.rhs.fn;
    b.rhs.fn = [f, eps](double t, double u) { return f(t, u) + eps * std::cos(t); };
    const DependenceReport r = dependence_certify({a, b, a.rhs.lipschitz}, 1e-14, 1e-12, 4000);
    CHECK(r.bound.passed());
  }
}

TEST_CASE("solve summary") {
  const auto z = z_grid(0, 6);
  const SolveResult r = picard_solve(problem(z, 1.0, linear(0.5), 1.0, 2.0), 1e-12, 1000);
  std::stringstream ss;
  write_solve_summary(ss, r);
  const std::string s = ss.str();
  CHECK(s.find("converged = true\n") != std::string::npos);
  CHECK(s.find("contraction_bound = 0.25\n") != std::string::npos);
  CHECK(s.find("p1 = 1\n") != std::string::npos);
}
