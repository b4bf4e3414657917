#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// Order alpha together with its derivative count m (m = floor(alpha) + 1
/// for non-integer alpha, m = alpha for integer alpha).
struct FractionalOrder {
  double alpha = 0.0;
  int m = 0;
  bool integer = false;

  static FractionalOrder of(double alpha);
};

/// True when `x` is within 1e-12 of an integer. Orders such as k*alpha - 1
/// are formed in floating point and must still hit the integer branches.
bool is_integer_order(double x);

/// h_alpha(t_i, t_j) for t_i >= t_j.
///
/// ContinuousApprox: (t - s)^alpha / Gamma(alpha + 1).
/// UniformLattice (step h, m = (t - s)/h): h^alpha Gamma(m + 1) /
///   (Gamma(alpha + 1) Gamma(m + 1 - alpha)), taken as 0 when m < alpha.
/// Arbitrary: integer alpha only, by h_{k+1}(t, s) = int_s^t h_k(tau, s) dtau.
///
/// Returns +inf at t = s on ContinuousApprox when alpha < 0.
double power_function(const TimeScaleGrid& grid, double alpha, std::size_t i, std::size_t j);

/// Convolution weight for order beta at row i, column j < i.
///
/// Discrete kinds: h_beta(t_i, sigma(t_j)). ContinuousApprox: the mean of
/// h_beta(t_i, r) over r in [t_j, sigma(t_j)], which stays finite for
/// beta in (-1, 0) where the pointwise value at sigma(t_j) = t_i is not.
double kernel_weight(const TimeScaleGrid& grid, double beta, std::size_t i, std::size_t j);

/// All kernel weights of one order on one grid, strictly lower triangular,
/// plus the diagonal base values h_alpha(t_i, t_i).
class PowerFunctionTable {
 public:
  PowerFunctionTable(GridPtr grid, double alpha, std::vector<double> packed,
                     std::vector<double> diagonal);

  const TimeScaleGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double alpha() const { return alpha_; }
  std::size_t size() const { return diagonal_.size(); }

  /// Weight for (t_i, sigma(t_j)), j < i; 0 for j >= i.
  double at(std::size_t i, std::size_t j) const {
    return j < i ? packed_[i * (i - 1) / 2 + j] : 0.0;
  }
  double diagonal(std::size_t i) const { return diagonal_[i]; }

 private:
  GridPtr grid_;
  double alpha_;
  std::vector<double> packed_;
  std::vector<double> diagonal_;
};

/// Builds the table; throws DomainError if any weight is negative or non-finite.
PowerFunctionTable power_table(const GridPtr& grid, double alpha);

/// |int_{t_j}^{t_i} h_{alpha-1}(t_i, sigma(tau)) h_{k alpha-1}(tau, sigma(t_j)) dtau
///  - h_{(k+1) alpha - 1}(t_i, sigma(t_j))|, the left side summed with delta_integral.
double semigroup_residual(const TimeScaleGrid& grid, double alpha, int k, std::size_t i,
                          std::size_t j);
/// Max of semigroup_residual over all pairs j < i.
double max_semigroup_residual(const TimeScaleGrid& grid, double alpha, int k);

/// Riemann-Liouville fractional delta integral started at t0_index.
GridFunction rl_integral(double alpha, const GridFunction& f, std::size_t t0_index);
/// Same, with a prebuilt kernel table of order alpha - 1.
GridFunction rl_integral(const PowerFunctionTable& kernel, const GridFunction& f,
                         std::size_t t0_index);

/// D^m I^{m - alpha} f; the trailing m points are left undefined.
/// Negative alpha gives I^{-alpha} f.
GridFunction rl_derivative(double alpha, const GridFunction& f, std::size_t s_index);

/// Riemann-Liouville derivative of f minus its delta-Taylor polynomial at t0.
GridFunction caputo_derivative(double alpha, const GridFunction& f, std::size_t t0_index);

/// `i,j,t_i,sigma_t_j,h_alpha` rows for every j < i.
void write_table_csv(std::ostream& out, const PowerFunctionTable& table);

}  // namespace tsfrac
