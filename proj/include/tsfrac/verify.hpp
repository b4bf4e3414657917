#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsfrac/gronwall.hpp"
#include "tsfrac/solver.hpp"

namespace tsfrac {

/// One line of the verification table.
struct VerifyRow {
  std::string suite;
  std::string invariant;
  std::uint64_t seed = 0;
  std::string status;  ///< pass, fail, or xfail (known, documented failure)
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  int gronwall_instances = 100;
  int solver_instances = 25;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;

  std::size_t count(const std::string& status) const;
  /// xfail rows do not count as failures.
  bool all_passed() const { return count("fail") == 0; }
};

/// Seed of instance `index` in suite `suite`.
std::uint64_t instance_seed(std::uint64_t base, std::uint64_t suite, std::uint64_t index);

/// Nonnegative u, nondecreasing v <= B = 2, alpha in {0.5, 1}, lattice of 4 to 32 points.
GronwallInput random_gronwall_instance(std::uint64_t seed);

/// Lattice problem with alpha in {0.5, 0.8, 1} and L / eta in {0.25, 0.5, 0.9}.
/// The grid is h Z restricted to [0, N h] with N + 1 <= max_points.
CauchyProblem random_problem(std::uint64_t seed, std::size_t max_points = 25);

VerifyReport run_verify_suite(const VerifyOptions& options);

/// `suite,invariant,seed,status,detail`
void write_verify_csv(std::ostream& out, const VerifyReport& report);
void write_verify_summary(std::ostream& out, const VerifyReport& report);

}  // namespace tsfrac
