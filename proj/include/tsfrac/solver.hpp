#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsfrac/gronwall.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// f(t, u) with a declared Lipschitz constant in u.
struct RightHandSide {
  std::function<double(double, double)> fn;
  double lipschitz = 0.0;
  std::string name = "custom";

  double operator()(double t, double u) const { return fn(t, u); }
};

/// How the initial datum enters the integral form.
enum class Representation {
  RlType,      ///< u = w h_{alpha-1}(t, t0) + I^alpha f(., u)
  CaputoType,  ///< u = w + I^alpha f(., u), so u(t0) = w
};

struct CauchyProblem {
  double alpha = 1.0;  ///< in (0, 1]
  RightHandSide rhs;
  double w = 0.0;
  GridPtr grid;
  std::size_t t0_index = 0;
  double eta = 1.0;
  Representation representation = Representation::RlType;

  void validate() const;
};

struct SolveResult {
  GridFunction solution;
  int iterations = 0;
  double final_metric = 0.0;
  double contraction_observed = 0.0;
  double p1 = 0.0;
  double contraction_bound = 0.0;  ///< L / eta
  bool converged = false;
  /// m_eta(G(solution), solution).
  double residual = 0.0;
  /// m_eta(u_{n+1}, u_n) per iteration.
  std::vector<double> metric_history;
  std::vector<std::string> warnings;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, SolveResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SolveResult& partial() const { return partial_; }

 private:
  SolveResult partial_;
};

/// The inhomogeneous term: w h_{alpha-1}(t, t0) (RlType) or w (CaputoType).
///
/// On ContinuousApprox with alpha < 1 the RlType value at t0 is singular; that
/// point is left out of the defined range and its slot holds the grain mean
/// w h_alpha(t_1, t0) / mu(t0) so convolution sums stay finite.
GridFunction initial_term(const CauchyProblem& problem);

/// (G u)(t) = initial_term(t) + (I^alpha f(., u))(t).
GridFunction apply_G(const CauchyProblem& problem, const GridFunction& u);

/// Picard iteration from u_0 = initial_term (or `start`) until the weighted
/// metric between successive iterates is at most tol. Throws
/// NonConvergenceError carrying the partial result when max_iter is reached.
SolveResult picard_solve(const CauchyProblem& problem, double tol, int max_iter,
                         const std::optional<GridFunction>& start = std::nullopt);

/// sup_t |w h_{alpha-1}(t, t0) + I^alpha f(., 0)(t)| / e_eta(t, t0).
double compute_p1(const CauchyProblem& problem);

/// Samples |f(t,x) - f(t,y)| / |x - y| at random pairs; returns the largest ratio.
double sample_lipschitz(const CauchyProblem& problem, unsigned long long seed, int samples = 256,
                        double radius = 10.0);

struct DependenceInput {
  CauchyProblem problem_a;  ///< f, w
  CauchyProblem problem_b;  ///< f_bar, w_bar
  double lipschitz = 0.0;   ///< L of f

  void validate() const;
};

/// H(t) = |w - w_bar| h_{alpha-1}(t, t0) + |I^alpha (f(., v) - f_bar(., v))(t)|.
GridFunction dependence_H(const DependenceInput& input, const GridFunction& v);

struct DependenceReport {
  SolveResult solution_a;
  SolveResult solution_b;
  GridFunction H;
  BoundReport bound;
};

/// Solves both problems and checks |u - v| against the Gronwall bound with
/// u := H and constant v := L, at tolerance 1e-8 + series_tol.
DependenceReport dependence_certify(const DependenceInput& input, double tol_solve,
                                    double series_tol, int max_iter = 1000,
                                    int max_terms = 10000);

/// `key = value` diagnostics block.
void write_solve_summary(std::ostream& out, const SolveResult& result);

}  // namespace tsfrac
