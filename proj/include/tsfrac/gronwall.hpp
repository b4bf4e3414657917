#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// Data of the integral inequality y <= u + v * I^alpha y.
struct GronwallInput {
  GridFunction u;  ///< nonnegative
  GridFunction v;  ///< nonnegative, nondecreasing, max v <= bound_v
  double alpha = 1.0;
  double bound_v = 0.0;  ///< the constant B
  std::size_t t0_index = 0;

  /// Throws ArgumentError/DomainError when an invariant fails.
  void validate() const;
};

enum class Verdict { Pass, Fail };

struct BoundReport {
  GridFunction bound;
  int terms_used = 0;
  double tail_estimate = 0.0;
  std::optional<GridFunction> actual;
  std::optional<GridFunction> slack;  ///< bound - actual
  Verdict verdict = Verdict::Fail;
  double tolerance = 0.0;
  std::vector<std::size_t> violations;  ///< indices where actual > bound + tolerance
  /// max over t of the (K+1)-th term, computed for the decay check.
  double next_term_max = 0.0;

  bool passed() const { return verdict == Verdict::Pass; }
};

/// Series did not reach the requested relative tolerance within max_terms.
class TruncationFailure : public std::runtime_error {
 public:
  TruncationFailure(const std::string& what, BoundReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const BoundReport& partial() const { return partial_; }

 private:
  BoundReport partial_;
};

/// Q psi(t) = v(t) * (I^alpha psi)(t).
GridFunction apply_Q(const GronwallInput& input, const GridFunction& psi);

/// t -> v(t)^k * sum_{s<t} h_{k alpha - 1}(t, sigma(s)) psi(s) mu(s), the majorant of Q^k psi.
GridFunction iterated_Q_bound(const GronwallInput& input, const GridFunction& psi, int k);

/// u + sum_{k=1}^{K} v^k I^{k alpha} u, truncated at the first K whose term max is
/// at most series_tol times the running bound max.
BoundReport gronwall_bound(const GronwallInput& input, double series_tol, int max_terms);

enum class HypothesisCheck { Enforce, Skip };

/// Compares y against report.bound. With HypothesisCheck::Enforce, first checks
/// y <= u + Q y + tol and throws HypothesisError otherwise. Fills the report's
/// actual, slack, violations and verdict.
Verdict verify_dominance(const GronwallInput& input, const GridFunction& y, BoundReport& report,
                         double tol, HypothesisCheck check = HypothesisCheck::Enforce);

/// Fixed point of y = u + Q y by iteration until successive sup-differences
/// fall below `tol` (relative to max |y|, floor 1).
GridFunction gronwall_fixed_point(const GronwallInput& input, double tol, int max_iter = 10000);

/// CSV `t,y,u,bound,slack` (y and slack empty when no actual was supplied).
void write_report_csv(std::ostream& out, const BoundReport& report, const GridFunction& u);
/// `key = value` lines: terms_used, tail_estimate, verdict, tolerance, violations.
void write_report_summary(std::ostream& out, const BoundReport& report);

}  // namespace tsfrac
