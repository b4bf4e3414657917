#include "tsfrac/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "tsfrac/errors.hpp"
#include "tsfrac/fracops.hpp"

namespace tsfrac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pointwise scale(t) * g(t) over the common defined range.
GridFunction multiply(const GridFunction& scale, const GridFunction& g, int power = 1) {
  if (!scale.same_grid(g)) throw ArgumentError("grid functions live on different grids");
  const IndexRange a = scale.defined();
  const IndexRange b = g.defined();
  const IndexRange r{std::max(a.begin, b.begin), std::max(std::max(a.begin, b.begin),
                                                          std::min(a.end, b.end))};
  std::vector<double> out(g.size(), kNaN);
  for (std::size_t i = r.begin; i < r.end; ++i) out[i] = std::pow(scale[i], power) * g[i];
  return GridFunction(g.grid_ptr(), std::move(out), r);
}

double max_abs(const GridFunction& f) {
  double m = 0.0;
  const IndexRange r = f.defined();
  for (std::size_t i = r.begin; i < r.end; ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

}  // namespace

void GronwallInput::validate() const {
  if (!u.same_grid(v)) throw ArgumentError("u and v live on different grids");
  if (!(alpha > 0.0)) throw DomainError("Gronwall inequality needs alpha > 0");
  if (t0_index > u.grid().last()) throw ArgumentError("t0 index out of range");
  const IndexRange ur = u.defined();
  const IndexRange vr = v.defined();
  if (vr.begin > std::max(ur.begin, t0_index) || vr.end < ur.end)
    throw ArgumentError("v must be defined wherever u is");
  for (std::size_t i = ur.begin; i < ur.end; ++i)
    if (u[i] < 0.0) throw DomainError("u must be nonnegative (index " + std::to_string(i) + ")");
  const double slack = 1e-12 * std::max(1.0, std::abs(bound_v));
  for (std::size_t i = vr.begin; i < vr.end; ++i) {
    if (v[i] < 0.0) throw DomainError("v must be nonnegative (index " + std::to_string(i) + ")");
    if (v[i] > bound_v + slack)
      throw DomainError("v exceeds its bound B at index " + std::to_string(i));
    if (i > vr.begin && v[i] < v[i - 1])
      throw DomainError("v must be nondecreasing (index " + std::to_string(i) + ")");
  }
}

GridFunction apply_Q(const GronwallInput& input, const GridFunction& psi) {
  return multiply(input.v, rl_integral(input.alpha, psi, input.t0_index));
}

GridFunction iterated_Q_bound(const GronwallInput& input, const GridFunction& psi, int k) {
  if (k < 1) throw ArgumentError("iterated_Q_bound needs k >= 1");
  return multiply(input.v, rl_integral(k * input.alpha, psi, input.t0_index), k);
}

BoundReport gronwall_bound(const GronwallInput& input, double series_tol, int max_terms) {
  input.validate();
  if (!(series_tol > 0.0)) throw ArgumentError("series_tol must be positive");
  if (max_terms < 1) throw ArgumentError("max_terms must be at least 1");

  GridFunction bound = input.u;
  double last_term = 0.0;
  for (int k = 1; k <= max_terms; ++k) {
    const GridFunction term = iterated_Q_bound(input, input.u, k);
    bound = bound + term;
    last_term = max_abs(term);
    if (last_term <= series_tol * max_abs(bound)) {
      BoundReport report{bound};
      report.terms_used = k;
      report.tail_estimate = last_term;
      report.next_term_max = max_abs(iterated_Q_bound(input, input.u, k + 1));
      report.verdict = Verdict::Pass;
      return report;
    }
  }
  BoundReport partial{bound};
  partial.terms_used = max_terms;
  partial.tail_estimate = last_term;
  partial.verdict = Verdict::Fail;
  throw TruncationFailure("Gronwall series did not reach relative tolerance " +
                              format_double(series_tol) + " within " +
                              std::to_string(max_terms) + " terms",
                          std::move(partial));
}

Verdict verify_dominance(const GronwallInput& input, const GridFunction& y, BoundReport& report,
                         double tol, HypothesisCheck check) {
  if (!y.same_grid(report.bound)) throw ArgumentError("y and the bound use different grids");
  if (check == HypothesisCheck::Enforce) {
    const GridFunction rhs = input.u + apply_Q(input, y);
    const IndexRange r = rhs.defined();
    for (std::size_t i = std::max(r.begin, y.defined().begin);
         i < std::min(r.end, y.defined().end); ++i)
      if (y[i] > rhs[i] + tol)
        throw HypothesisError("y violates y <= u + v I^alpha y at index " + std::to_string(i) +
                              " by " + format_double(y[i] - rhs[i]));
  }
  GridFunction slack = report.bound - y;
  report.violations.clear();
  const IndexRange r = slack.defined();
  for (std::size_t i = r.begin; i < r.end; ++i)
    if (slack[i] < -tol) report.violations.push_back(i);
  report.actual = y;
  report.slack = std::move(slack);
  report.tolerance = tol;
  report.verdict = report.violations.empty() ? Verdict::Pass : Verdict::Fail;
  return report.verdict;
}

GridFunction gronwall_fixed_point(const GronwallInput& input, double tol, int max_iter) {
  input.validate();
  const PowerFunctionTable kernel = power_table(input.u.grid_ptr(), input.alpha - 1.0);
  GridFunction y = input.u;
  for (int it = 0; it < max_iter; ++it) {
    GridFunction next = input.u + multiply(input.v, rl_integral(kernel, y, input.t0_index));
    const double change = max_abs(next - y);
    y = std::move(next);
    if (change <= tol * std::max(1.0, max_abs(y))) return y;
  }
  throw std::runtime_error("fixed point of y = u + Qy did not settle");
}

void write_report_csv(std::ostream& out, const BoundReport& report, const GridFunction& u) {
  out << "t,y,u,bound,slack\n";
  const IndexRange r = report.bound.defined();
  const auto pts = report.bound.grid().points();
  for (std::size_t i = r.begin; i < r.end; ++i) {
    out << format_double(pts[i]) << ',';
    if (report.actual && report.actual->is_defined(i)) out << format_double((*report.actual)[i]);
    out << ',' << (u.is_defined(i) ? format_double(u[i]) : std::string()) << ','
        << format_double(report.bound[i]) << ',';
    if (report.slack && report.slack->is_defined(i)) out << format_double((*report.slack)[i]);
    out << '\n';
  }
}

void write_report_summary(std::ostream& out, const BoundReport& report) {
  out << "terms_used = " << report.terms_used << '\n'
      << "tail_estimate = " << format_double(report.tail_estimate) << '\n'
      << "verdict = " << (report.passed() ? "pass" : "fail") << '\n'
      << "tolerance = " << format_double(report.tolerance) << '\n'
      << "violations = " << report.violations.size() << '\n';
  if (report.slack) {
    double min_slack = std::numeric_limits<double>::infinity();
    const IndexRange r = report.slack->defined();
    for (std::size_t i = r.begin; i < r.end; ++i) min_slack = std::min(min_slack, (*report.slack)[i]);
    out << "min_slack = " << format_double(min_slack) << '\n';
  }
}

}  // namespace tsfrac
