#include "tsfrac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "tsfrac/errors.hpp"
#include "tsfrac/fracops.hpp"

namespace tsfrac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Ratios between metrics this small are dominated by rounding.
constexpr double kMetricFloor = 1e-300;

bool singular_at_t0(const CauchyProblem& p) {
  return p.representation == Representation::RlType &&
         p.grid->kind() == GridKind::ContinuousApprox && p.alpha < 1.0 &&
         !is_integer_order(p.alpha);
}

// sum_{t0 <= tau < t} K(t, sigma(tau)) g(tau) mu(tau) with g given on raw slots.
std::vector<double> convolve(const PowerFunctionTable& kernel, const std::vector<double>& g,
                             std::size_t t0) {
  const TimeScaleGrid& grid = kernel.grid();
  std::vector<double> weighted(grid.size(), 0.0);
  for (std::size_t j = t0; j < grid.size(); ++j) weighted[j] = g[j] * grid.graininess(j);
  std::vector<double> out(grid.size(), kNaN);
  for (std::size_t i = t0; i < grid.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = t0; j < i; ++j) sum += kernel.at(i, j) * weighted[j];
    out[i] = sum;
  }
  return out;
}

// f(tau, u(tau)) on [t0, N]; u's raw slots are used, including a t0 surrogate.
std::vector<double> evaluate_rhs(const RightHandSide& rhs, const GridFunction& u,
                                 std::size_t t0) {
  const auto pts = u.grid().points();
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t j = t0; j < u.size(); ++j) {
    const double value = rhs(pts[j], u[j]);
    if (!std::isfinite(value))
      throw RhsEvaluationError("right-hand side '" + rhs.name + "' is not finite at t = " +
                               format_double(pts[j]) + ", u = " + format_double(u[j]));
    out[j] = value;
  }
  return out;
}

IndexRange defined_range(const CauchyProblem& p) {
  return IndexRange{p.t0_index + (singular_at_t0(p) ? 1 : 0), p.grid->size()};
}

GridFunction apply_G_with(const CauchyProblem& problem, const PowerFunctionTable& kernel,
                          const GridFunction& base, const GridFunction& u) {
  const std::size_t t0 = problem.t0_index;
  const auto integral = convolve(kernel, evaluate_rhs(problem.rhs, u, t0), t0);
  std::vector<double> out(u.size(), kNaN);
  for (std::size_t i = t0; i < out.size(); ++i) out[i] = base[i] + integral[i];
  return GridFunction(u.grid_ptr(), std::move(out), defined_range(problem));
}

void check_iterate(const CauchyProblem& problem, const GridFunction& u) {
  if (!(u.grid_ptr() == problem.grid || u.grid() == *problem.grid))
    throw ArgumentError("iterate lives on a different grid than the problem");
  for (std::size_t j = problem.t0_index; j < u.size(); ++j)
    if (!std::isfinite(u[j]))
      throw ArgumentError("iterate has no usable value at index " + std::to_string(j));
}

}  // namespace

void CauchyProblem::validate() const {
  if (!grid) throw ArgumentError("problem has no grid");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(rhs.lipschitz >= 0.0)) throw DomainError("Lipschitz constant must be nonnegative");
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  if (!rhs.fn) throw ArgumentError("problem has no right-hand side");
  if (!std::isfinite(w)) throw ArgumentError("initial datum must be finite");
  if (t0_index >= grid->last()) throw ArgumentError("t0 index must precede the terminal point");
}

GridFunction initial_term(const CauchyProblem& problem) {
  problem.validate();
  const TimeScaleGrid& grid = *problem.grid;
  const std::size_t t0 = problem.t0_index;
  std::vector<double> v(grid.size(), kNaN);
  for (std::size_t i = t0; i < grid.size(); ++i) {
    if (problem.representation == Representation::CaputoType) {
      v[i] = problem.w;
    } else if (i == t0 && singular_at_t0(problem)) {
      v[i] = problem.w * power_function(grid, problem.alpha, t0 + 1, t0) / grid.graininess(t0);
    } else {
      v[i] = problem.w * power_function(grid, problem.alpha - 1.0, i, t0);
    }
  }
  return GridFunction(problem.grid, std::move(v), defined_range(problem));
}

GridFunction apply_G(const CauchyProblem& problem, const GridFunction& u) {
  problem.validate();
  check_iterate(problem, u);
  const PowerFunctionTable kernel = power_table(problem.grid, problem.alpha - 1.0);
  return apply_G_with(problem, kernel, initial_term(problem), u);
}

SolveResult picard_solve(const CauchyProblem& problem, double tol, int max_iter,
                         const std::optional<GridFunction>& start) {
  problem.validate();
  if (!(tol > 0.0)) throw ArgumentError("tol must be positive");
  if (max_iter < 1) throw ArgumentError("max_iter must be at least 1");
  const PowerFunctionTable kernel = power_table(problem.grid, problem.alpha - 1.0);
  const GridFunction base = initial_term(problem);
  const WeightedNormContext ctx(problem.grid, problem.eta, problem.t0_index);

  GridFunction u = start ? *start : base;
  check_iterate(problem, u);
  if (start) {
    // Keep the reported range consistent with the problem's.
    u = GridFunction(u.grid_ptr(), std::vector<double>(u.values().begin(), u.values().end()),
                     defined_range(problem));
  }

  SolveResult result{u};
  result.p1 = compute_p1(problem);
  result.contraction_bound = problem.rhs.lipschitz / problem.eta;

  int growth_streak = 0;
  bool warned = false;
  for (int n = 1; n <= max_iter; ++n) {
    GridFunction next = apply_G_with(problem, kernel, base, u);
    const double metric = weighted_metric(next, u, ctx);
    if (!result.metric_history.empty()) {
      const double prev = result.metric_history.back();
      if (prev > kMetricFloor) {
        const double ratio = metric / prev;
        result.contraction_observed = std::max(result.contraction_observed, ratio);
        growth_streak = ratio >= 1.0 ? growth_streak + 1 : 0;
        if (growth_streak >= 3 && !warned) {
          result.warnings.push_back("divergence: metric ratio >= 1 for 3 consecutive iterations");
          warned = true;
        }
      }
    }
    result.metric_history.push_back(metric);
    u = std::move(next);
    result.iterations = n;
    result.final_metric = metric;
    if (metric <= tol) {
      result.converged = true;
      break;
    }
  }
  result.solution = u;
  result.residual = weighted_metric(apply_G_with(problem, kernel, base, u), u, ctx);
  if (!result.converged)
    throw NonConvergenceError("Picard iteration did not reach tol " + format_double(tol) +
                                  " in " + std::to_string(max_iter) + " iterations (metric " +
                                  format_double(result.final_metric) + ")",
                              std::move(result));
  return result;
}

double compute_p1(const CauchyProblem& problem) {
  problem.validate();
  const GridFunction zero = GridFunction::constant(problem.grid, 0.0);
  const GridFunction first = apply_G(problem, zero);
  return weighted_norm(first, WeightedNormContext(problem.grid, problem.eta, problem.t0_index));
}

double sample_lipschitz(const CauchyProblem& problem, unsigned long long seed, int samples,
                        double radius) {
  problem.validate();
  std::mt19937_64 rng(seed);
  const auto pts = problem.grid->points();
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = pts[static_cast<std::size_t>(rng() % pts.size())];
    const double x = (2.0 * unit() - 1.0) * radius;
    const double y = (2.0 * unit() - 1.0) * radius;
    if (x == y) continue;
    worst = std::max(worst, std::abs(problem.rhs(t, x) - problem.rhs(t, y)) / std::abs(x - y));
  }
  return worst;
}

void DependenceInput::validate() const {
  problem_a.validate();
  problem_b.validate();
  if (!(*problem_a.grid == *problem_b.grid)) throw ArgumentError("problems use different grids");
  if (problem_a.alpha != problem_b.alpha) throw ArgumentError("problems use different orders");
  if (problem_a.t0_index != problem_b.t0_index)
    throw ArgumentError("problems use different base points");
  if (problem_a.representation != problem_b.representation)
    throw ArgumentError("problems use different representations");
  if (!(lipschitz >= 0.0)) throw DomainError("Lipschitz constant must be nonnegative");
}

GridFunction dependence_H(const DependenceInput& input, const GridFunction& v) {
  input.validate();
  const CauchyProblem& a = input.problem_a;
  const CauchyProblem& b = input.problem_b;
  check_iterate(a, v);
  const std::size_t t0 = a.t0_index;

  CauchyProblem delta = a;
  delta.w = std::abs(a.w - b.w);
  const GridFunction datum = initial_term(delta);

  const auto fa = evaluate_rhs(a.rhs, v, t0);
  const auto fb = evaluate_rhs(b.rhs, v, t0);
  std::vector<double> diff(fa.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = fa[j] - fb[j];
  const auto integral = convolve(power_table(a.grid, a.alpha - 1.0), diff, t0);

  std::vector<double> out(v.size(), kNaN);
  for (std::size_t i = t0; i < out.size(); ++i) out[i] = datum[i] + std::abs(integral[i]);
  return GridFunction(a.grid, std::move(out), defined_range(a));
}

DependenceReport dependence_certify(const DependenceInput& input, double tol_solve,
                                    double series_tol, int max_iter, int max_terms) {
  input.validate();
  SolveResult ua = picard_solve(input.problem_a, tol_solve, max_iter);
  SolveResult vb = picard_solve(input.problem_b, tol_solve, max_iter);
  GridFunction H = dependence_H(input, vb.solution);

  const CauchyProblem& a = input.problem_a;
  GronwallInput gin{H, GridFunction::constant(a.grid, input.lipschitz), a.alpha, input.lipschitz,
                    a.t0_index};
  BoundReport bound = gronwall_bound(gin, series_tol, max_terms);
  const GridFunction actual = abs(ua.solution - vb.solution);
  verify_dominance(gin, actual, bound, 1e-8 + series_tol, HypothesisCheck::Skip);
  return DependenceReport{std::move(ua), std::move(vb), std::move(H), std::move(bound)};
}

void write_solve_summary(std::ostream& out, const SolveResult& r) {
  out << "converged = " << (r.converged ? "true" : "false") << '\n'
      << "iterations = " << r.iterations << '\n'
      << "final_metric = " << format_double(r.final_metric) << '\n'
      << "residual = " << format_double(r.residual) << '\n'
      << "contraction_observed = " << format_double(r.contraction_observed) << '\n'
      << "contraction_bound = " << format_double(r.contraction_bound) << '\n'
      << "p1 = " << format_double(r.p1) << '\n';
  for (const auto& w : r.warnings) out << "warning = " << w << '\n';
}

}  // namespace tsfrac
