#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "tsfrac/solver.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// Plain-text `key = value` configuration with `#` comments.
///
/// Every lookup failure or malformed value raises IoError, which the CLI maps
/// to its configuration/I-O exit status.
class Config {
 public:
  static Config parse(std::istream& in, std::filesystem::path base_dir = {});
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer_or(const std::string& key, int fallback) const;

  /// Relative paths are taken relative to the config file's directory.
  std::filesystem::path resolve(std::string_view path) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  std::filesystem::path base_;
};

/// `uniform(a,b,n)`, `lattice(a,b,h)` or `file:<path>`.
GridPtr load_grid(const Config& cfg, const std::string& key = "grid");

/// Builtins: zero, linear(l), affine(l,c), logistic(r,K), custom-table:<path>.
/// The Lipschitz constant is the builtin's own (|l| for linear/affine, 0 for
/// zero and custom-table, |r| for logistic on [0, K]) unless `declared_L` >= 0.
RightHandSide parse_rhs(std::string_view spec, const Config& cfg, const GridPtr& grid,
                        double declared_L = -1.0);

Representation parse_representation(std::string_view name);

/// Reads alpha, w, eta, L, rhs, representation, t0_index; `suffix` selects
/// `w_bar`/`rhs_bar` style keys for the perturbed problem.
CauchyProblem load_problem(const Config& cfg, const GridPtr& grid, const std::string& suffix = "");

}  // namespace tsfrac
