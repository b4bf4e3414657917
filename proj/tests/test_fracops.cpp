#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tsfrac/errors.hpp"
#include "tsfrac/fracops.hpp"
#include "tsfrac/random.hpp"

using namespace tsfrac;

namespace {

/// h_a on h*Z at distance m steps:
/// h^a prod_{p=1}^{m} p / (p - a) / (Gamma(a + 1) Gamma(1 - a)), zero below the support m < a.
double lattice_oracle(double a, int m, double h = 1.0) {
  if (m < a) return 0.0;
  const double r = std::round(a);
  if (std::abs(a - r) < 1e-12) {
    double v = 1.0;
    for (int p = 0; p < static_cast<int>(r); ++p) v *= (m - p) * h / (p + 1);
    return v;
  }
  double v = std::pow(h, a) / (std::tgamma(a + 1.0) * std::tgamma(1.0 - a));
  for (int p = 1; p <= m; ++p) v *= p / (p - a);
  return v;
}

/// h_k(t_i, t_j) by summing h_{k-1} over the grains.
double recursion_oracle(const TimeScaleGrid& g, int k, std::size_t i, std::size_t j) {
  std::vector<double> h(g.size(), 1.0);
  for (int p = 0; p < k; ++p) {
    std::vector<double> next(g.size(), 0.0);
    for (std::size_t r = j; r < i; ++r) next[r + 1] = next[r] + h[r] * g.graininess(r);
    h = next;
  }
  return h[i];
}

TimeScaleGrid random_grid(Rng& rng, std::size_t n) {
  std::vector<double> pts{rng.uniform(-1, 1)};
  for (std::size_t i = 1; i < n; ++i) pts.push_back(pts.back() + rng.uniform(0.05, 1.2));
  return TimeScaleGrid::from_points(pts);
}

GridPtr z_grid(double a, double b) { return share(TimeScaleGrid::lattice(a, b, 1.0)); }

}  // namespace

TEST_CASE("fractional order bookkeeping") {
  CHECK(FractionalOrder::of(0.5).m == 1);
  CHECK(FractionalOrder::of(1.0).m == 1);
  CHECK(FractionalOrder::of(1.5).m == 2);
  CHECK(FractionalOrder::of(2.0).m == 2);
  CHECK(FractionalOrder::of(2.0).integer);
  CHECK(is_integer_order(3 * 0.1 * 10 - 2.0));
  CHECK_FALSE(is_integer_order(0.3));
}

TEST_CASE("power function basics on every kind") {
  Rng rng(17);
  const TimeScaleGrid grids[] = {TimeScaleGrid::uniform(0, 2, 40), TimeScaleGrid::lattice(0, 4, 0.5),
                                 random_grid(rng, 9)};
  for (const auto& g : grids) {
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        CHECK(power_function(g, 0.0, i, j) == 1.0);
        CHECK(power_function(g, 1.0, i, j) == doctest::Approx(g.point(i) - g.point(j)));
      }
  }
}

TEST_CASE("power function closed forms") {
  const auto u = TimeScaleGrid::uniform(0, 1, 1000);
  CHECK(std::abs(power_function(u, 0.5, u.last(), 0) - 1.128379) <= 1e-5);
  CHECK(power_function(u, 0.5, u.last(), 0) == doctest::Approx(1.0 / std::tgamma(1.5)));
  CHECK(std::isinf(power_function(u, -0.5, 3, 3)));

  const auto z = TimeScaleGrid::lattice(0, 10, 1);
  CHECK(power_function(z, 2.0, 5, 2) == 3.0);
  for (double a : {-0.7, -0.5, 0.3, 0.5, 0.8, 1.5, 2.5})
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        CHECK(power_function(z, a, i, j) ==
              doctest::Approx(lattice_oracle(a, static_cast<int>(i - j))).epsilon(1e-12));

  const auto half = TimeScaleGrid::lattice(0, 3, 0.5);
  CHECK(power_function(half, 0.5, 4, 1) ==
        doctest::Approx(lattice_oracle(0.5, 3, 0.5)).epsilon(1e-12));
}

TEST_CASE("large lattice gamma ratios stay finite") {
  const auto z = TimeScaleGrid::lattice(0, 5000, 1);
  const double v = power_function(z, 0.5, z.last(), 0);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(std::sqrt(5000.0) / std::tgamma(1.5)).epsilon(1e-3));
}

TEST_CASE("integer orders match the integration recursion") {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = random_grid(rng, 12);
    for (int k = 0; k <= 4; ++k)
      for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          const double want = recursion_oracle(g, k, i, j);
          CHECK(std::abs(power_function(g, k, i, j) - want) <= 1e-10 * std::max(1.0, std::abs(want)));
        }
  }
  const auto lat = TimeScaleGrid::lattice(0, 3, 0.25);
  const auto con = TimeScaleGrid::uniform(0, 1, 5);
  for (int k = 0; k <= 4; ++k)
    for (std::size_t i = 0; i < lat.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        CHECK(power_function(lat, k, i, j) ==
              doctest::Approx(recursion_oracle(lat, k, i, j)).epsilon(1e-12));
  // Continuous closed form (t-s)^k/k! is the limit, not the grid recursion.
  CHECK(power_function(con, 2.0, 5, 0) == doctest::Approx(0.5));
}

TEST_CASE("power function errors") {
  const auto a = TimeScaleGrid::from_points({0.0, 0.3, 1.0});
  CHECK_THROWS_WITH_AS(power_function(a, 0.5, 2, 0),
                       "fractional order unsupported on Arbitrary scale", UnsupportedScaleError);
  CHECK_THROWS_AS(power_table(share(a), 0.5), UnsupportedScaleError);
  CHECK_THROWS_AS(power_function(a, 1.0, 0, 2), DomainError);
  CHECK_THROWS_AS(power_function(a, -1.0, 2, 0), DomainError);
  CHECK_THROWS_AS(power_function(a, -1.5, 2, 0), DomainError);
  CHECK_THROWS_AS(power_function(a, 1.0, 5, 0), ArgumentError);
}

TEST_CASE("power tables") {
  const auto z = z_grid(0, 4);
  const auto ones = power_table(z, 0.0);
  for (std::size_t i = 1; i < z->size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(ones.at(i, j) == 1.0);

  const auto lin = power_table(z, 1.0);
  for (std::size_t i = 1; i < z->size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(lin.at(i, j) == z->point(i) - z->point(j + 1));
  CHECK(lin.at(2, 3) == 0.0);

  const auto u = share(TimeScaleGrid::uniform(0, 1, 50));
  const auto half = power_table(u, 0.5);
  for (std::size_t i = 2; i < u->size(); ++i)
    for (std::size_t j = 1; j < i; ++j) CHECK(half.at(i, j) < half.at(i, j - 1));

  for (double beta : {-0.7, -0.5, -0.2, 0.3, 1.5}) {
    const auto tz = power_table(z_grid(0, 20), beta);
    const auto tu = power_table(u, beta);
    for (std::size_t i = 1; i < tz.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(tz.at(i, j) >= 0.0);
    for (std::size_t i = 1; i < tu.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        CHECK(tu.at(i, j) >= 0.0);
        CHECK(std::isfinite(tu.at(i, j)));
      }
  }

  std::stringstream ss;
  write_table_csv(ss, power_table(z_grid(0, 2), 1.0));
  CHECK(ss.str() == "i,j,t_i,sigma_t_j,h_alpha\n1,0,1,1,0\n2,0,2,1,1\n2,1,2,2,0\n");
}

TEST_CASE("semigroup identity at integer orders") {
  const auto six = TimeScaleGrid::lattice(0, 5, 1);
  CHECK(max_semigroup_residual(six, 1.0, 1) == 0.0);
  const auto z = TimeScaleGrid::lattice(0, 10, 1);
  for (double a : {1.0, 2.0})
    for (int k = 1; k <= 3; ++k) CHECK(max_semigroup_residual(z, a, k) <= 1e-10);
  Rng rng(41);
  const auto g = random_grid(rng, 10);
  for (int k = 1; k <= 3; ++k) CHECK(max_semigroup_residual(g, 1.0, k) <= 1e-10);
}

TEST_CASE("semigroup residual on a single grain") {
  const auto z = TimeScaleGrid::lattice(0, 5, 1);
  // Empty sum on the left; the right side is h at zero distance.
  CHECK(semigroup_residual(z, 1.0, 1, 3, 2) == 0.0);
  CHECK(semigroup_residual(z, 0.5, 1, 3, 2) == 1.0);
  CHECK(semigroup_residual(z, 0.5, 2, 3, 2) == 0.0);
  CHECK(semigroup_residual(z, 0.25, 3, 3, 2) == 1.0);
  CHECK_THROWS_AS(semigroup_residual(z, 1.0, 0, 3, 2), ArgumentError);
  CHECK_THROWS_AS(semigroup_residual(z, 1.0, 1, 2, 2), DomainError);
}

TEST_CASE("continuous semigroup residual shrinks under refinement") {
  for (double a : {1.0, 0.5}) {
    const auto coarse = TimeScaleGrid::uniform(0, 1, 200);
    const auto fine = TimeScaleGrid::uniform(0, 1, 400);
    const double rc = semigroup_residual(coarse, a, 1, coarse.last(), 0);
    const double rf = semigroup_residual(fine, a, 1, fine.last(), 0);
    CHECK(rf <= 0.6 * rc);
    CHECK(rc <= 2.0 * coarse.step());
  }
}

TEST_CASE("fractional integral") {
  const auto z = z_grid(0, 4);
  const auto one = GridFunction::constant(z, 1.0);
  const auto f = GridFunction::sample(z, [](double t) { return std::sin(t) + 2; });
  const auto same = rl_integral(0.0, f, 0);
  for (std::size_t i = 0; i < z->size(); ++i) CHECK(same[i] == f[i]);

  const auto plain = rl_integral(1.0, one, 0);
  for (std::size_t i = 0; i < z->size(); ++i) CHECK(plain.at(i) == static_cast<double>(i));

  CHECK_THROWS_AS(rl_integral(-0.5, f, 0), DomainError);
}

TEST_CASE("fractional integral of one is the next power function") {
  const auto z = z_grid(0, 12);
  for (double a : {0.3, 0.5, 0.8, 1.0, 2.0, 3.0}) {
    const auto r = rl_integral(a, GridFunction::constant(z, 1.0), 2);
    CHECK(r.at(2) == 0.0);
    for (std::size_t i = 2; i < z->size(); ++i) {
      // Direct summation of the kernel against the constant.
      double sum = 0.0;
      for (std::size_t j = 2; j < i; ++j) sum += lattice_oracle(a - 1.0, static_cast<int>(i - j - 1));
      CHECK(r.at(i) == doctest::Approx(sum).epsilon(1e-12));
      if (is_integer_order(a))
        CHECK(r.at(i) == lattice_oracle(a, static_cast<int>(i - 2)));
    }
  }
  const auto u = share(TimeScaleGrid::uniform(0, 1, 200));
  for (double a : {0.3, 0.5, 1.5}) {
    const auto r = rl_integral(a, GridFunction::constant(u, 1.0), 0);
    for (std::size_t i = 0; i < u->size(); ++i)
      CHECK(r.at(i) == doctest::Approx(std::pow(u->point(i), a) / std::tgamma(a + 1)).epsilon(1e-10));
  }
}

TEST_CASE("fractional integral is linear and composes at integer order") {
  Rng rng(2);
  const auto g = share(TimeScaleGrid::lattice(0, 6, 0.5));
  std::vector<double> fv(g->size()), gv(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    fv[i] = rng.uniform(-2, 2);
    gv[i] = rng.uniform(-2, 2);
  }
  const GridFunction f(g, fv), h(g, gv);
  const double a = 1.7, b = -0.4;
  for (double alpha : {0.3, 0.5, 1.0, 1.5}) {
    const auto lhs = rl_integral(alpha, a * f + b * h, 0);
    const auto rf = rl_integral(alpha, f, 0), rh = rl_integral(alpha, h, 0);
    for (std::size_t i = 0; i < g->size(); ++i)
      CHECK(lhs.at(i) == doctest::Approx(a * rf.at(i) + b * rh.at(i)).epsilon(1e-13).scale(1.0));
  }
  const auto twice = rl_integral(1.0, rl_integral(1.0, f, 0), 0);
  const auto direct = rl_integral(2.0, f, 0);
  for (std::size_t i = 0; i < g->size(); ++i)
    CHECK(twice.at(i) == doctest::Approx(direct.at(i)).epsilon(1e-13).scale(1.0));
}

TEST_CASE("Riemann-Liouville derivative") {
  const auto z = z_grid(0, 6);
  const auto id = GridFunction::sample(z, [](double t) { return t; });
  const auto d = rl_derivative(1.0, id, 0);
  CHECK(d.defined().end == z->size() - 1);
  for (std::size_t i = d.defined().begin; i < d.defined().end; ++i) CHECK(d.at(i) == 1.0);
  const auto same = rl_derivative(0.0, id, 0);
  for (std::size_t i = 0; i < z->size(); ++i) CHECK(same.at(i) == id.at(i));
  const auto neg = rl_derivative(-1.0, id, 0);
  CHECK(neg.at(3) == 0.0 + 1.0 + 2.0);

  const auto tiny = share(TimeScaleGrid::lattice(0, 1, 1));
  CHECK_THROWS_AS(rl_derivative(1.5, GridFunction::constant(tiny, 1.0), 0), InsufficientGridError);
}

TEST_CASE("Caputo derivative") {
  const auto z = z_grid(0, 10);
  for (double a : {0.3, 0.5, 0.8}) {
    const auto d = caputo_derivative(a, GridFunction::constant(z, -3.5), 0);
    for (std::size_t i = d.defined().begin; i < d.defined().end; ++i)
      CHECK(std::abs(d.at(i)) <= 1e-12);
  }
  const auto sq = GridFunction::sample(z, [](double t) { return t * t; });
  const auto d1 = caputo_derivative(1.0, sq, 0);
  for (std::size_t i = d1.defined().begin; i < d1.defined().end; ++i)
    CHECK(d1.at(i) == 2.0 * z->point(i) + 1.0);

  CHECK_THROWS_AS(caputo_derivative(0.0, sq, 0), DomainError);
  CHECK_THROWS_AS(caputo_derivative(-1.0, sq, 0), DomainError);
}

TEST_CASE("Caputo derivative annihilates Taylor polynomials") {
  const auto g = share(TimeScaleGrid::lattice(0, 5, 0.5));
  Rng rng(8);
  for (double a : {0.4, 1.0, 1.5, 2.0, 2.5}) {
    const auto m = static_cast<std::size_t>(FractionalOrder::of(a).m);
    std::vector<double> c(m);
    for (auto& x : c) x = rng.uniform(-2, 2);
    std::vector<double> v(g->size());
    for (std::size_t i = 1; i < g->size(); ++i) {
      v[i] = 0.0;
      for (std::size_t k = 0; k < m; ++k)
        v[i] += c[k] * recursion_oracle(*g, static_cast<int>(k), i, 1);
    }
    v[0] = 0.0;
    const GridFunction f(g, v, IndexRange{1, g->size()});
    const auto d = caputo_derivative(a, f, 1);
    for (std::size_t i = d.defined().begin; i < d.defined().end; ++i)
      CHECK(std::abs(d.at(i)) <= 1e-10);
  }
}

TEST_CASE("Caputo derivative of h_alpha against direct summation") {
  const auto z = z_grid(0, 10);
  for (double a : {0.3, 0.5, 0.8}) {
    const auto f = GridFunction::sample(z, [a](double t) {
      return lattice_oracle(a, static_cast<int>(std::lround(t)));
    });
    const auto d = caputo_derivative(a, f, 0);
    // f(t0) = 0, so the Caputo and Riemann-Liouville forms agree: Delta of I^{1-a} f.
    std::vector<double> i1(z->size(), 0.0);
    for (std::size_t i = 0; i < z->size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        i1[i] += lattice_oracle(-a, static_cast<int>(i - j - 1)) * f[j];
    for (std::size_t i = d.defined().begin; i < d.defined().end; ++i)
      CHECK(d.at(i) == doctest::Approx(i1[i + 1] - i1[i]).epsilon(1e-12));
  }
}
