#include "tsfrac/fracops.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "tsfrac/errors.hpp"

namespace tsfrac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

int as_int(double x) { return static_cast<int>(std::lround(x)); }

// log|Gamma(x)| with the sign of Gamma(x).
double log_gamma(double x, int& sign) {
  sign = 1;
  if (x > 0.0) return std::lgamma(x);
  const double lg = std::lgamma(x);
  // Gamma alternates sign on (-n-1, -n).
  const double fl = std::floor(x);
  sign = (static_cast<long long>(-fl) % 2 == 1) ? -1 : 1;
  return lg;
}

// x^gamma / Gamma(gamma + 1) on the real line, x >= 0.
double continuous_power(double gamma, double x) {
  if (is_integer_order(gamma)) {
    const int k = as_int(gamma);
    if (k == 0) return 1.0;
    double v = 1.0;
    for (int p = 1; p <= k; ++p) v *= x / p;
    return v;
  }
  if (x <= 0.0) return gamma > 0.0 ? 0.0 : kInf;
  int s = 1;
  const double lg = log_gamma(gamma + 1.0, s);
  return s * std::exp(gamma * std::log(x) - lg);
}

// h^gamma Gamma(m + 1) / (Gamma(gamma + 1) Gamma(m + 1 - gamma)), zero below the
// support m < gamma.
double lattice_power(double gamma, long long m, double h) {
  if (is_integer_order(gamma)) {
    const int k = as_int(gamma);
    if (m < k) return 0.0;
    double v = 1.0;
    for (int p = 0; p < k; ++p) v *= static_cast<double>(m - p) * h / (p + 1);
    return v;
  }
  if (static_cast<double>(m) < gamma) return 0.0;
  int s1 = 1, s2 = 1, s3 = 1;
  const double lg = log_gamma(static_cast<double>(m) + 1.0, s1) - log_gamma(gamma + 1.0, s2) -
                    log_gamma(static_cast<double>(m) + 1.0 - gamma, s3);
  return s1 * s2 * s3 * std::exp(lg + gamma * std::log(h));
}

// h_k(t_r, t_j) for r = j..N by the delta-integration recursion.
std::vector<double> recursive_column(const TimeScaleGrid& grid, int k, std::size_t j) {
  const std::size_t n = grid.size();
  std::vector<double> cur(n, 0.0);
  for (std::size_t r = j; r < n; ++r) cur[r] = 1.0;
  std::vector<double> next(n, 0.0);
  for (int p = 0; p < k; ++p) {
    next[j] = 0.0;
    for (std::size_t r = j; r + 1 < n; ++r) next[r + 1] = next[r] + cur[r] * grid.graininess(r);
    std::swap(cur, next);
  }
  return cur;
}

void check_order(double alpha) {
  if (!(alpha > -1.0) || !std::isfinite(alpha))
    throw DomainError("power function order must exceed -1, got " + format_double(alpha));
}

void check_pair(const TimeScaleGrid& grid, std::size_t i, std::size_t j) {
  if (i >= grid.size() || j >= grid.size()) throw ArgumentError("point index out of range");
  if (i < j) throw DomainError("power function needs t >= s");
}

[[noreturn]] void unsupported() {
  throw UnsupportedScaleError("fractional order unsupported on Arbitrary scale");
}

}  // namespace

bool is_integer_order(double x) { return std::abs(x - std::round(x)) < 1e-12; }

FractionalOrder FractionalOrder::of(double alpha) {
  FractionalOrder o;
  o.alpha = alpha;
  o.integer = is_integer_order(alpha);
  o.m = o.integer ? as_int(alpha) : static_cast<int>(std::floor(alpha)) + 1;
  return o;
}

double power_function(const TimeScaleGrid& grid, double alpha, std::size_t i, std::size_t j) {
  check_order(alpha);
  check_pair(grid, i, j);
  if (is_integer_order(alpha) && as_int(alpha) == 0) return 1.0;
  switch (grid.kind()) {
    case GridKind::ContinuousApprox:
      return continuous_power(alpha, static_cast<double>(i - j) * grid.step());
    case GridKind::UniformLattice:
      return lattice_power(alpha, static_cast<long long>(i - j), grid.step());
    case GridKind::Arbitrary:
      if (!is_integer_order(alpha)) unsupported();
      return recursive_column(grid, as_int(alpha), j)[i];
  }
  return kNaN;
}

double kernel_weight(const TimeScaleGrid& grid, double beta, std::size_t i, std::size_t j) {
  check_order(beta);
  if (j >= i) throw ArgumentError("kernel weight needs column j < row i");
  if (i >= grid.size()) throw ArgumentError("point index out of range");
  if (is_integer_order(beta) && as_int(beta) == 0) return 1.0;
  if (grid.kind() == GridKind::ContinuousApprox) {
    const double h = grid.step();
    const auto d = static_cast<double>(i - j);
    return (continuous_power(beta + 1.0, d * h) - continuous_power(beta + 1.0, (d - 1.0) * h)) / h;
  }
  return power_function(grid, beta, i, j + 1);
}

PowerFunctionTable::PowerFunctionTable(GridPtr grid, double alpha, std::vector<double> packed,
                                       std::vector<double> diagonal)
    : grid_(std::move(grid)), alpha_(alpha), packed_(std::move(packed)),
      diagonal_(std::move(diagonal)) {}

PowerFunctionTable power_table(const GridPtr& grid_ptr, double alpha) {
  check_order(alpha);
  const TimeScaleGrid& grid = *grid_ptr;
  const std::size_t n = grid.size();
  if (grid.kind() == GridKind::Arbitrary && !is_integer_order(alpha)) unsupported();

  std::vector<double> packed(n * (n - 1) / 2);
  std::vector<double> diag(n);
  auto slot = [](std::size_t i, std::size_t j) { return i * (i - 1) / 2 + j; };

  if (grid.kind() == GridKind::Arbitrary) {
    const int k = as_int(alpha);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const auto col = recursive_column(grid, k, j + 1);
      for (std::size_t i = j + 1; i < n; ++i) packed[slot(i, j)] = col[i];
    }
    for (std::size_t i = 0; i < n; ++i) diag[i] = k == 0 ? 1.0 : 0.0;
  } else {
    // Uniform kinds are translation invariant: one weight per offset i - j.
    std::vector<double> by_offset(n);
    for (std::size_t d = 1; d < n; ++d) by_offset[d] = kernel_weight(grid, alpha, d, 0);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) packed[slot(i, j)] = by_offset[i - j];
    const double base = power_function(grid, alpha, 0, 0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = base;
  }

  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double w = packed[slot(i, j)];
      if (!std::isfinite(w) || w < 0.0)
        throw DomainError("kernel of order " + format_double(alpha) + " has weight " +
                          format_double(w) + " at (" + std::to_string(i) + "," +
                          std::to_string(j) + "); nonnegative finite weights are required");
    }
  return PowerFunctionTable(grid_ptr, alpha, std::move(packed), std::move(diag));
}

double semigroup_residual(const TimeScaleGrid& grid, double alpha, int k, std::size_t i,
                          std::size_t j) {
  if (k < 1) throw ArgumentError("semigroup residual needs k >= 1");
  if (!(alpha > 0.0)) throw DomainError("semigroup residual needs alpha > 0");
  if (i >= grid.size()) throw ArgumentError("point index out of range");
  if (j >= i) throw DomainError("semigroup residual needs t_j < t_i");
  const double a = alpha - 1.0;
  const double b = k * alpha - 1.0;
  const double target = (k + 1) * alpha - 1.0;
  // tau = t_j lies before sigma(t_j), where h_b(tau, sigma(t_j)) vanishes.
  std::vector<double> integrand(grid.size(), 0.0);
  for (std::size_t tau = j + 1; tau < i; ++tau)
    integrand[tau] = kernel_weight(grid, a, i, tau) * kernel_weight(grid, b, tau, j);
  const double lhs = delta_integral(grid, integrand, j, i);
  const double rhs = kernel_weight(grid, target, i, j);
  return std::abs(lhs - rhs);
}

double max_semigroup_residual(const TimeScaleGrid& grid, double alpha, int k) {
  double worst = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      worst = std::max(worst, semigroup_residual(grid, alpha, k, i, j));
  return worst;
}

GridFunction rl_integral(const PowerFunctionTable& kernel, const GridFunction& f,
                         std::size_t t0) {
  if (!(kernel.grid_ptr() == f.grid_ptr() || kernel.grid() == f.grid()))
    throw ArgumentError("kernel table and function use different grids");
  const TimeScaleGrid& grid = f.grid();
  if (t0 > grid.last()) throw ArgumentError("t0 index out of range");
  const IndexRange in = f.defined();
  if (in.end <= t0) throw ArgumentError("function is undefined from t0 on");

  std::vector<double> weighted(grid.size(), 0.0);
  for (std::size_t j = t0; j < in.end; ++j) {
    if (!std::isfinite(f[j]))
      throw ArgumentError("function has no usable value at index " + std::to_string(j));
    weighted[j] = f[j] * grid.graininess(j);
  }

  const std::size_t end = std::min(grid.size(), in.end + 1);
  std::vector<double> out(grid.size(), kNaN);
  for (std::size_t i = t0; i < end; ++i) {
    double sum = 0.0;
    for (std::size_t j = t0; j < i; ++j) sum += kernel.at(i, j) * weighted[j];
    out[i] = sum;
  }
  return GridFunction(f.grid_ptr(), std::move(out), IndexRange{std::max(t0, in.begin), end});
}

GridFunction rl_integral(double alpha, const GridFunction& f, std::size_t t0) {
  if (alpha < 0.0) throw DomainError("negative order: use rl_derivative for I^alpha, alpha < 0");
  if (alpha == 0.0) return f;
  return rl_integral(power_table(f.grid_ptr(), alpha - 1.0), f, t0);
}

namespace {

GridFunction forward_difference(const GridFunction& g) {
  const IndexRange r = g.defined();
  if (r.length() < 2)
    throw InsufficientGridError("not enough defined points for another delta derivative");
  std::vector<double> out(g.size(), kNaN);
  for (std::size_t i = r.begin; i + 1 < r.end; ++i)
    out[i] = (g[i + 1] - g[i]) / g.grid().graininess(i);
  return GridFunction(g.grid_ptr(), std::move(out), IndexRange{r.begin, r.end - 1});
}

}  // namespace

GridFunction rl_derivative(double alpha, const GridFunction& f, std::size_t s) {
  if (alpha < 0.0) return rl_integral(-alpha, f, s);
  if (alpha == 0.0) return f;
  const FractionalOrder order = FractionalOrder::of(alpha);
  const double rest = order.m - alpha;
  GridFunction g = is_integer_order(rest) ? f : rl_integral(rest, f, s);
  if (g.defined().begin < s) {
    std::vector<double> v(g.values().begin(), g.values().end());
    for (std::size_t i = 0; i < s; ++i) v[i] = kNaN;
    g = GridFunction(g.grid_ptr(), std::move(v), IndexRange{s, std::max(s, g.defined().end)});
  }
  for (int p = 0; p < order.m; ++p) g = forward_difference(g);
  return g;
}

GridFunction caputo_derivative(double alpha, const GridFunction& f, std::size_t t0) {
  if (!(alpha > 0.0)) throw DomainError("Caputo derivative needs alpha > 0");
  const TimeScaleGrid& grid = f.grid();
  if (t0 > grid.last()) throw ArgumentError("t0 index out of range");
  const FractionalOrder order = FractionalOrder::of(alpha);
  const auto m = static_cast<std::size_t>(order.m);
  const IndexRange r = f.defined();
  if (!r.contains(t0) || r.end < t0 + m)
    throw InsufficientGridError("need " + std::to_string(m) +
                                " defined points from t0 for the Taylor polynomial");

  // Delta derivatives f^{Delta^k}(t0), k < m, by repeated forward differences.
  std::vector<double> coeff(m);
  std::vector<double> diff(f.values().begin() + static_cast<long>(t0),
                           f.values().begin() + static_cast<long>(t0 + m));
  for (std::size_t k = 0; k < m; ++k) {
    coeff[k] = diff[0];
    for (std::size_t q = 0; q + 1 < diff.size(); ++q)
      diff[q] = (diff[q + 1] - diff[q]) / grid.graininess(t0 + q);
    diff.pop_back();
  }

  std::vector<double> rem(f.size(), kNaN);
  for (std::size_t i = t0; i < r.end; ++i) {
    double taylor = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      taylor += coeff[k] * power_function(grid, static_cast<double>(k), i, t0);
    rem[i] = f[i] - taylor;
  }
  return rl_derivative(alpha, GridFunction(f.grid_ptr(), std::move(rem), IndexRange{t0, r.end}),
                       t0);
}

void write_table_csv(std::ostream& out, const PowerFunctionTable& table) {
  const auto pts = table.grid().points();
  out << "i,j,t_i,sigma_t_j,h_alpha\n";
  for (std::size_t i = 1; i < table.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      out << i << ',' << j << ',' << format_double(pts[i]) << ',' << format_double(pts[j + 1])
          << ',' << format_double(table.at(i, j)) << '\n';
}

}  // namespace tsfrac
