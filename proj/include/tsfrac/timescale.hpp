#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsfrac {

enum class GridKind {
  ContinuousApprox,  ///< uniform fine grid standing in for an interval of R
  UniformLattice,    ///< h*Z restricted to [a, b]; exact
  Arbitrary,         ///< any strictly increasing finite set; exact
};

std::string_view kind_name(GridKind kind);
GridKind parse_kind(std::string_view name);

/// A bounded time scale stored as its finitely many points t_0 < ... < t_N.
///
/// The terminal point is the right edge: sigma(N) = N and mu(N) = 0, so it
/// never contributes to a delta integral. Uniform kinds keep their step so
/// that graininess is exactly h rather than a rounded point difference.
class TimeScaleGrid {
 public:
  static TimeScaleGrid from_points(std::vector<double> points,
                                   GridKind kind = GridKind::Arbitrary);
  /// ContinuousApprox grid of [a, b] with n subintervals (n + 1 points).
  static TimeScaleGrid uniform(double a, double b, std::size_t n);
  /// UniformLattice {a, a + h, ...} up to b (inclusive, within rounding).
  static TimeScaleGrid lattice(double a, double b, double h);

  GridKind kind() const { return kind_; }
  std::size_t size() const { return points_.size(); }
  /// Index of the terminal point N.
  std::size_t last() const { return points_.size() - 1; }
  double point(std::size_t i) const;
  std::span<const double> points() const { return points_; }
  /// Spacing for uniform kinds; 0 for Arbitrary.
  double step() const { return step_; }
  bool is_discrete() const { return kind_ != GridKind::ContinuousApprox; }

  std::size_t sigma(std::size_t i) const;
  double graininess(std::size_t i) const;

  bool operator==(const TimeScaleGrid& other) const;

 private:
  TimeScaleGrid(std::vector<double> points, GridKind kind, double step);
  void check_index(std::size_t i) const;

  std::vector<double> points_;
  GridKind kind_;
  double step_;
};

using GridPtr = std::shared_ptr<const TimeScaleGrid>;

inline GridPtr share(TimeScaleGrid grid) {
  return std::make_shared<const TimeScaleGrid>(std::move(grid));
}

/// Half-open index range [begin, end) of grid points where a function is defined.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool empty() const { return end <= begin; }
  std::size_t length() const { return empty() ? 0 : end - begin; }
};

/// Real values sampled at the points of a grid.
///
/// Only the defined range is reportable. Slots outside it may hold NaN or a
/// finite surrogate used internally by convolution sums (see the solver), and
/// are skipped by norms, metrics and CSV export.
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<double> values);
  GridFunction(GridPtr grid, std::vector<double> values, IndexRange defined);

  static GridFunction constant(GridPtr grid, double value);
  static GridFunction sample(GridPtr grid, const std::function<double(double)>& fn);

  const TimeScaleGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  IndexRange defined() const { return defined_; }
  bool is_defined(std::size_t i) const { return defined_.contains(i); }

  /// Raw slot value, defined or not.
  double operator[](std::size_t i) const { return values_[i]; }
  /// Checked access to a defined value.
  double at(std::size_t i) const;

  bool same_grid(const GridFunction& other) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  IndexRange defined_;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, const GridFunction& f);
/// Pointwise |f|.
GridFunction abs(const GridFunction& f);

/// Cached e_eta(t_i, t_0) on one grid.
class WeightedNormContext {
 public:
  WeightedNormContext(GridPtr grid, double eta, std::size_t t0_index = 0);

  double eta() const { return eta_; }
  std::size_t t0_index() const { return t0_; }
  const TimeScaleGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  /// e_eta(t_i, t_0); throws DomainError for t_i < t_0.
  double exp_at(std::size_t i) const;

 private:
  GridPtr grid_;
  double eta_;
  std::size_t t0_;
  std::vector<double> exp_;
};

std::size_t sigma(const TimeScaleGrid& grid, std::size_t i);
double graininess(const TimeScaleGrid& grid, std::size_t i);

/// Forward difference quotient (f(sigma(t_i)) - f(t_i)) / mu(t_i).
double delta_derivative(const GridFunction& f, std::size_t i);

/// Left-endpoint delta integral sum_{i=a}^{b-1} f(t_i) mu(t_i).
double delta_integral(const GridFunction& f, std::size_t a, std::size_t b);
double delta_integral(const TimeScaleGrid& grid, std::span<const double> values,
                      std::size_t a, std::size_t b);

double exp_eta(const WeightedNormContext& ctx, const TimeScaleGrid& grid, std::size_t i);

/// max_i |f(t_i)| / e_eta(t_i, t_0) over defined points at or after t_0.
double weighted_norm(const GridFunction& f, const WeightedNormContext& ctx);
double weighted_metric(const GridFunction& f, const GridFunction& g,
                       const WeightedNormContext& ctx);

// -- text formats ------------------------------------------------------------

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Parses `uniform(a,b,n)`, `lattice(a,b,h)`.
TimeScaleGrid parse_grid_descriptor(std::string_view descriptor);

/// `kind=<name>` header, then one point per line.
void write_grid(std::ostream& out, const TimeScaleGrid& grid);
TimeScaleGrid read_grid(std::istream& in);

/// Two-column `t,value` CSV over the defined range.
void write_function_csv(std::ostream& out, const GridFunction& f);

/// Parsed `t,value` rows.
struct FunctionSamples {
  std::vector<double> t;
  std::vector<double> value;
};
FunctionSamples read_function_csv(std::istream& in);
/// Reads a `t,value` CSV whose t column must match points of `grid`.
GridFunction read_function_csv(std::istream& in, const GridPtr& grid);

}  // namespace tsfrac
