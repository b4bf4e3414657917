#include "tsfrac/timescale.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "tsfrac/errors.hpp"

namespace tsfrac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Relative tolerance used when checking that a point list is uniform.
constexpr double kUniformTol = 1e-9;

IndexRange intersect(IndexRange a, IndexRange b) {
  IndexRange r{std::max(a.begin, b.begin), std::min(a.end, b.end)};
  if (r.end < r.begin) r.end = r.begin;
  return r;
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!a.same_grid(b)) throw ArgumentError("grid functions live on different grids");
}

}  // namespace

std::string_view kind_name(GridKind kind) {
  switch (kind) {
    case GridKind::ContinuousApprox: return "continuous-approx";
    case GridKind::UniformLattice: return "uniform-lattice";
    case GridKind::Arbitrary: return "arbitrary";
  }
  return "arbitrary";
}

GridKind parse_kind(std::string_view name) {
  const std::string n = trim(name);
  if (n == "continuous-approx") return GridKind::ContinuousApprox;
  if (n == "uniform-lattice") return GridKind::UniformLattice;
  if (n == "arbitrary") return GridKind::Arbitrary;
  throw ArgumentError("unknown grid kind '" + n + "'");
}

// -- TimeScaleGrid -----------------------------------------------------------

TimeScaleGrid::TimeScaleGrid(std::vector<double> points, GridKind kind, double step)
    : points_(std::move(points)), kind_(kind), step_(step) {}

TimeScaleGrid TimeScaleGrid::from_points(std::vector<double> points, GridKind kind) {
  if (points.size() < 2) throw ArgumentError("a grid needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw ArgumentError("grid point is not finite");
    if (i > 0 && !(points[i] > points[i - 1]))
      throw ArgumentError("grid points must be strictly increasing");
  }
  double step = 0.0;
  if (kind != GridKind::Arbitrary) {
    const std::size_t n = points.size() - 1;
    step = (points.back() - points.front()) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = points[i + 1] - points[i];
      if (std::abs(d - step) > kUniformTol * step)
        throw ArgumentError(std::string("points are not uniformly spaced for kind ") +
                            std::string(kind_name(kind)));
    }
  }
  return TimeScaleGrid(std::move(points), kind, step);
}

TimeScaleGrid TimeScaleGrid::uniform(double a, double b, std::size_t n) {
  if (!(b > a) || n < 1) throw ArgumentError("uniform(a,b,n) needs b > a and n >= 1");
  const double step = (b - a) / static_cast<double>(n);
  std::vector<double> pts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) pts[k] = a + static_cast<double>(k) * step;
  pts.back() = b;
  return TimeScaleGrid(std::move(pts), GridKind::ContinuousApprox, step);
}

TimeScaleGrid TimeScaleGrid::lattice(double a, double b, double h) {
  if (!(h > 0.0)) throw ArgumentError("lattice step must be positive");
  const double span = (b - a) / h;
  if (!(span >= 1.0 - 1e-9)) throw ArgumentError("lattice(a,b,h) needs b >= a + h");
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9));
  std::vector<double> pts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) pts[k] = a + static_cast<double>(k) * h;
  return TimeScaleGrid(std::move(pts), GridKind::UniformLattice, h);
}

void TimeScaleGrid::check_index(std::size_t i) const {
  if (i >= points_.size())
    throw ArgumentError("point index " + std::to_string(i) + " out of range [0, " +
                        std::to_string(last()) + "]");
}

double TimeScaleGrid::point(std::size_t i) const {
  check_index(i);
  return points_[i];
}

std::size_t TimeScaleGrid::sigma(std::size_t i) const {
  check_index(i);
  return i < last() ? i + 1 : i;
}

double TimeScaleGrid::graininess(std::size_t i) const {
  check_index(i);
  if (i == last()) return 0.0;
  if (kind_ != GridKind::Arbitrary) return step_;
  return points_[i + 1] - points_[i];
}

bool TimeScaleGrid::operator==(const TimeScaleGrid& other) const {
  return kind_ == other.kind_ && step_ == other.step_ && points_ == other.points_;
}

// -- GridFunction ------------------------------------------------------------

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : GridFunction(grid, std::move(values), IndexRange{0, grid ? grid->size() : 0}) {}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values, IndexRange defined)
    : grid_(std::move(grid)), values_(std::move(values)), defined_(defined) {
  if (!grid_) throw ArgumentError("grid function without a grid");
  if (values_.size() != grid_->size())
    throw ArgumentError("grid function has " + std::to_string(values_.size()) +
                        " values for " + std::to_string(grid_->size()) + " grid points");
  if (defined_.end > values_.size() || defined_.begin > defined_.end)
    throw ArgumentError("defined range exceeds the grid");
  for (std::size_t i = defined_.begin; i < defined_.end; ++i)
    if (!std::isfinite(values_[i]))
      throw ArgumentError("non-finite value at defined point " + std::to_string(i));
}

GridFunction GridFunction::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return GridFunction(std::move(grid), std::vector<double>(n, value));
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->points()[i]);
  return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::at(std::size_t i) const {
  if (!defined_.contains(i))
    throw ArgumentError("grid function is undefined at index " + std::to_string(i));
  return values_[i];
}

bool GridFunction::same_grid(const GridFunction& other) const {
  return grid_ == other.grid_ || *grid_ == *other.grid_;
}

namespace {

template <typename Op>
GridFunction combine(const GridFunction& a, const GridFunction& b, Op op) {
  require_same_grid(a, b);
  const IndexRange r = intersect(a.defined(), b.defined());
  std::vector<double> v(a.size(), kNaN);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!r.contains(i) && !std::isfinite(v[i])) v[i] = kNaN;
  return GridFunction(a.grid_ptr(), std::move(v), r);
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}

GridFunction operator*(double c, const GridFunction& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= c;
  return GridFunction(f.grid_ptr(), std::move(v), f.defined());
}

GridFunction abs(const GridFunction& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x = std::abs(x);
  return GridFunction(f.grid_ptr(), std::move(v), f.defined());
}

// -- WeightedNormContext -----------------------------------------------------

WeightedNormContext::WeightedNormContext(GridPtr grid, double eta, std::size_t t0_index)
    : grid_(std::move(grid)), eta_(eta), t0_(t0_index) {
  if (!grid_) throw ArgumentError("weighted norm context without a grid");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive");
  if (t0_ > grid_->last()) throw ArgumentError("t0 index out of range");
  exp_.assign(grid_->size(), kNaN);
  double e = 1.0;
  for (std::size_t i = t0_; i < grid_->size(); ++i) {
    exp_[i] = e;
    e *= 1.0 + grid_->graininess(i) * eta_;
  }
}

double WeightedNormContext::exp_at(std::size_t i) const {
  if (i >= exp_.size()) throw ArgumentError("point index out of range");
  if (i < t0_) throw DomainError("e_eta(t, t0) requires t >= t0");
  return exp_[i];
}

// -- primitive calculus ------------------------------------------------------

std::size_t sigma(const TimeScaleGrid& grid, std::size_t i) { return grid.sigma(i); }

double graininess(const TimeScaleGrid& grid, std::size_t i) { return grid.graininess(i); }

double delta_derivative(const GridFunction& f, std::size_t i) {
  const auto& g = f.grid();
  if (i >= g.size()) throw ArgumentError("point index out of range");
  if (i == g.last()) throw TerminalPointError("delta derivative is undefined at the terminal point");
  return (f.at(i + 1) - f.at(i)) / g.graininess(i);
}

double delta_integral(const TimeScaleGrid& grid, std::span<const double> values,
                      std::size_t a, std::size_t b) {
  if (a > b) throw ArgumentError("delta integral needs a <= b");
  if (b > grid.last()) throw ArgumentError("delta integral bound out of range");
  double sum = 0.0;
  for (std::size_t i = a; i < b; ++i) sum += values[i] * grid.graininess(i);
  return sum;
}

double delta_integral(const GridFunction& f, std::size_t a, std::size_t b) {
  if (a > b) throw ArgumentError("delta integral needs a <= b");
  for (std::size_t i = a; i < b; ++i) (void)f.at(i);
  return delta_integral(f.grid(), f.values(), a, b);
}

double exp_eta(const WeightedNormContext& ctx, const TimeScaleGrid& grid, std::size_t i) {
  if (!(grid == ctx.grid())) throw ArgumentError("context belongs to a different grid");
  return ctx.exp_at(i);
}

double weighted_norm(const GridFunction& f, const WeightedNormContext& ctx) {
  if (!(f.grid_ptr() == ctx.grid_ptr() || f.grid() == ctx.grid()))
    throw ArgumentError("grid function and norm context use different grids");
  double best = 0.0;
  const IndexRange r = f.defined();
  for (std::size_t i = std::max(r.begin, ctx.t0_index()); i < r.end; ++i)
    best = std::max(best, std::abs(f[i]) / ctx.exp_at(i));
  return best;
}

double weighted_metric(const GridFunction& f, const GridFunction& g,
                       const WeightedNormContext& ctx) {
  return weighted_norm(f - g, ctx);
}

// -- text formats ------------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw ArgumentError("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  const std::string s = trim(text);
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || s.empty())
    throw ArgumentError("not a number: '" + s + "'");
  return x;
}

namespace {

std::vector<std::string> split_args(std::string_view inner) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = inner.find(',', start);
    out.push_back(trim(inner.substr(start, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

TimeScaleGrid parse_grid_descriptor(std::string_view descriptor) {
  const std::string d = trim(descriptor);
  const auto open = d.find('(');
  if (open == std::string::npos || d.back() != ')')
    throw ArgumentError("malformed grid descriptor '" + d + "'");
  const std::string name = trim(std::string_view(d).substr(0, open));
  const auto args = split_args(std::string_view(d).substr(open + 1, d.size() - open - 2));
  if (args.size() != 3) throw ArgumentError("grid descriptor takes three arguments: '" + d + "'");
  const double a = parse_double(args[0]);
  const double b = parse_double(args[1]);
  if (name == "uniform") {
    const double n = parse_double(args[2]);
    if (n < 1 || n != std::floor(n)) throw ArgumentError("uniform(a,b,n) needs integer n >= 1");
    return TimeScaleGrid::uniform(a, b, static_cast<std::size_t>(n));
  }
  if (name == "lattice") return TimeScaleGrid::lattice(a, b, parse_double(args[2]));
  throw ArgumentError("unknown grid descriptor '" + name + "'");
}

void write_grid(std::ostream& out, const TimeScaleGrid& grid) {
  out << "kind=" << kind_name(grid.kind()) << '\n';
  for (double t : grid.points()) out << format_double(t) << '\n';
}

TimeScaleGrid read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty grid file");
  line = trim(line);
  if (line.rfind("kind=", 0) != 0) throw IoError("grid file must start with kind=<name>");
  GridKind kind;
  try {
    kind = parse_kind(std::string_view(line).substr(5));
  } catch (const ArgumentError& e) {
    throw IoError(e.what());
  }
  std::vector<double> pts;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    try {
      pts.push_back(parse_double(line));
    } catch (const ArgumentError&) {
      throw IoError("bad grid point '" + line + "'");
    }
  }
  try {
    return TimeScaleGrid::from_points(std::move(pts), kind);
  } catch (const ArgumentError& e) {
    throw IoError(std::string("invalid grid file: ") + e.what());
  }
}

void write_function_csv(std::ostream& out, const GridFunction& f) {
  out << "t,value\n";
  const IndexRange r = f.defined();
  for (std::size_t i = r.begin; i < r.end; ++i)
    out << format_double(f.grid().points()[i]) << ',' << format_double(f[i]) << '\n';
}

FunctionSamples read_function_csv(std::istream& in) {
  FunctionSamples s;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "t,value") continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("expected two CSV columns: '" + line + "'");
    try {
      s.t.push_back(parse_double(std::string_view(line).substr(0, comma)));
      s.value.push_back(parse_double(std::string_view(line).substr(comma + 1)));
    } catch (const ArgumentError&) {
      throw IoError("bad CSV row '" + line + "'");
    }
  }
  return s;
}

GridFunction read_function_csv(std::istream& in, const GridPtr& grid) {
  const FunctionSamples s = read_function_csv(in);
  if (s.t.empty()) throw IoError("function CSV has no rows");
  const auto pts = grid->points();
  auto tol = [&](double t) { return 1e-12 * std::max(1.0, std::abs(t)); };
  std::size_t first = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (std::abs(pts[i] - s.t[0]) <= tol(pts[i])) {
      first = i;
      break;
    }
  if (first == pts.size() || first + s.t.size() > pts.size())
    throw IoError("function CSV does not match the grid points");
  std::vector<double> v(pts.size(), kNaN);
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    if (std::abs(pts[first + k] - s.t[k]) > tol(pts[first + k]))
      throw IoError("function CSV does not match the grid points");
    v[first + k] = s.value[k];
  }
  try {
    return GridFunction(grid, std::move(v), IndexRange{first, first + s.t.size()});
  } catch (const ArgumentError& e) {
    throw IoError(e.what());
  }
}

}  // namespace tsfrac
