#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "interp.hpp"
#include "nonradial.hpp"

using namespace fi;
using namespace fi::nonradial;

namespace {
constexpr int kM = 2, kN = 4;

spaces::GridPtr grid() {
  static auto g = spaces::RadialGrid::panels(std::sqrt(kN) + 7, 0.5, 1.0, 16, std::sqrt(kN) + 2);
  return g;
}
const SphereTables& tables(int d) {
  static const SphereTables t3 = SphereTables::build(3, kM, kN, grid());
  static const SphereTables t2 = SphereTables::build(2, kM, kN, grid());
  return d == 3 ? t3 : t2;
}
SphereRule op_rule(int d) { return SphereRule::make(d, 3 * kM + 8); }

double r2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }
// Gaussian times the solid harmonic x1 x2 (d = 3): its transform is -(same)
cd g_xy(const Point& x) { return std::exp(-pi * r2(x)) * x[0] * x[1]; }
cd g_xy_hat(const Point& x) { return -g_xy(x); }
// Gaussian times x3 (d = 3): transform picks up -i
cd g_z(const Point& x) { return std::exp(-pi * r2(x)) * x[2]; }
cd g_z_hat(const Point& x) { return -I * g_z(x); }
cd gauss(const Point& x) { return std::exp(-pi * r2(x)); }

Point unit(double a, double b, double c) {
  double n = std::sqrt(a * a + b * b + c * c);
  return {a / n, b / n, c / n};
}

SpherePerturbation quarter_budget(int d) {
  auto unit_p = shaped_sphere_perturbation(d, 1.0, 0.0, kN, 5);
  double b = budget_sphere(unit_p, tables(d)).measured;
  return shaped_sphere_perturbation(d, 0.25 / b, 0.0, kN, 5);
}
}  // namespace

TEST_CASE("Gegenbauer values and harmonic dimensions") {
  CHECK(gegenbauer(0, 0.7, 0.3) == 1.0);
  CHECK(gegenbauer(1, 0.7, 0.3) == doctest::Approx(2 * 0.7 * 0.3));
  CHECK(gegenbauer(2, 0.5, 1.0) == doctest::Approx(1.0));
  CHECK(gegenbauer(3, 0.5, 0.4) == doctest::Approx(0.5 * (5 * 0.064 - 3 * 0.4)));
  CHECK(gegenbauer(4, 1.0, std::cos(0.3)) == doctest::Approx(std::sin(1.5) / std::sin(0.3)));
  CHECK_THROWS_AS(gegenbauer(2, -0.6, 0.1), Error);
  CHECK(dim_harmonic(3, 0) == 1);
  CHECK(dim_harmonic(3, 2) == 5);
  CHECK(dim_harmonic(2, 7) == 2);
  CHECK(dim_harmonic(4, 3) == 16);
}

TEST_CASE("zonal kernel: constant, diagonal and degree one") {
  Point z = unit(0.2, -0.5, 0.8), w = unit(1, 1, 0.3);
  CHECK(zonal_Z(3, 0, {2, 3, 4}, z) == 1.0);
  CHECK(zonal_Z(3, 3, {0, 0, 0}, z) == 0.0);
  for (int d : {2, 3}) {
    Point zz = d == 2 ? unit(0.6, -0.8, 0) : z, ww = d == 2 ? unit(1, 2, 0) : w;
    for (int m = 0; m <= 8; ++m) CHECK(zonal_Z(d, m, zz, zz) == doctest::Approx(double(dim_harmonic(d, m))));
    double t = zz[0] * ww[0] + zz[1] * ww[1] + zz[2] * ww[2];
    CHECK(zonal_Z(d, 1, ww, zz) == doctest::Approx(d * t));
  }
  // solid extension is homogeneous of degree m
  CHECK(zonal_Z(3, 4, {0.4, 1.0, 0.6}, z) == doctest::Approx(std::pow(2.0, 4) * zonal_Z(3, 4, {0.2, 0.5, 0.3}, z)));
  // d = 2 is 2 cos(m theta)
  CHECK(zonal_Z(2, 3, unit(1, 0, 0), unit(std::cos(0.7), std::sin(0.7), 0)) == doctest::Approx(2 * std::cos(2.1)));
}

TEST_CASE("reproducing property under the sphere rule") {
  for (int d : {2, 3}) {
    int top = d == 3 ? 6 : 10;
    auto rule = SphereRule::make(d, 2 * top);
    Point a = d == 3 ? unit(0.3, 0.4, -0.2) : unit(0.3, 0.4, 0), b = d == 3 ? unit(-0.7, 0.1, 0.5) : unit(-0.7, 0.1, 0);
    double worst = 0;
    for (int m = 0; m <= top; ++m)
      for (int mp = 0; mp <= top; ++mp) {
        double s = 0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
          s += rule.w[q] * zonal_Z(d, m, a, rule.nodes[q]) * zonal_Z(d, mp, rule.nodes[q], b);
        worst = std::max(worst, std::abs(s - (m == mp ? zonal_Z(d, m, a, b) : 0.0)));
      }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("real harmonics are orthonormal and sum to the zonal kernel") {
  for (int d : {2, 3}) {
    const int M = 5, H = harmonic_count(d, M);
    auto rule = SphereRule::make(d, 2 * M);
    std::vector<double> G(H * H, 0.0), Y(H);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      harmonics(d, M, rule.nodes[q], Y.data());
      for (int i = 0; i < H; ++i)
        for (int j = 0; j < H; ++j) G[i * H + j] += rule.w[q] * Y[i] * Y[j];
    }
    for (int i = 0; i < H; ++i)
      for (int j = 0; j < H; ++j) CHECK(std::abs(G[i * H + j] - (i == j)) < 1e-12);
    Point a = d == 3 ? unit(0.1, 0.9, 0.4) : unit(0.1, 0.9, 0), b = d == 3 ? unit(-0.3, 0.2, 0.6) : unit(-0.3, 0.2, 0);
    std::vector<double> Ya(H), Yb(H);
    harmonics(d, M, a, Ya.data());
    harmonics(d, M, b, Yb.data());
    for (int m = 0; m <= M; ++m) {
      double s = 0;
      for (int h = 0; h < H; ++h)
        if (degree_of(d, h) == m) s += Ya[h] * Yb[h];
      CHECK(s == doctest::Approx(zonal_Z(d, m, a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("projection round trip through point values") {
  auto rule = SphereRule::make(3, 8);
  auto f = [](const Point& x) { return g_xy(x) + 0.3 * g_z(x) + cd(0, 0.2) * gauss(x); };
  auto e = project(3, 4, grid(), f, {}, rule);
  CHECK(static_cast<int>(e.comp.size()) == harmonic_count(3, 4));
  auto e2 = project(3, 4, grid(), [&](const Point& x) { return e.eval(x); }, {}, rule);
  double worst = 0;
  for (std::size_t h = 0; h < e.comp.size(); ++h)
    for (std::size_t i = 0; i < grid()->size(); ++i)
      worst = std::max(worst, std::abs(e.comp[h].values[i] - e2.comp[h].values[i]));
  CHECK(worst < 1e-8);
  CHECK(std::abs(e.eval({0.3, -0.4, 0.5}) - f({0.3, -0.4, 0.5})) < 1e-10);
  CHECK_THROWS_AS(project(3, 6, grid(), f, {}, rule), Error);
}

TEST_CASE("kernels: vanishing threshold, origin value, truncation guard") {
  Point z = unit(0.3, 0.3, 0.9);
  CHECK(kernel_Kn(12, 1, {1, 0, 0}, z, tables(3)).first == 0.0);
  const auto& t = tables(3);
  auto k0 = kernel_Kn(3, 1, {0, 0, 0}, z, t, true);
  CHECK(k0.first.real() == doctest::Approx(t.per_m[0].a_at(1, 0.0)));
  CHECK(k0.second.real() == doctest::Approx(t.per_m[0].at_at(1, 0.0)));
  CHECK_THROWS_AS(kernel_Kn(3, 1, {1, 0, 0}, z, t), Error);
  // terms past 4n+1 vanish structurally
  for (int m = 0; m <= kM; ++m)
    for (int n = 0; n <= kN; ++n)
      if (4 * n + 1 < m)
        for (double v : t.per_m[m].a[n]) CHECK(v == 0.0);
}

TEST_CASE("Fourier pairing per harmonic component") {
  const auto& t = tables(3);
  for (int m = 0; m <= kM; ++m)
    for (int n : {1, 3}) {
      const auto& T = t.per_m[m];
      spaces::RadialFunction f;
      f.d = T.d;
      f.grid = T.grid;
      f.values.assign(T.at[n].begin(), T.at[n].end());
      spaces::FourierConfig cfg;
      cfg.tail_tol = 1e-7;
      auto F = spaces::radial_fourier(f, cfg);
      double worst = 0;
      for (std::size_t i = 0; i < T.grid->size(); ++i) worst = std::max(worst, std::abs(F.values[i] - T.a[n][i]));
      CHECK(worst < 1e-5);
    }
}

TEST_CASE("double series: radial and harmonic Gaussians") {
  const auto& t = tables(3);
  auto rule = SphereRule::make(3, 2 * kM + 4);
  for (double r : {0.0, 0.4, 1.1, 2.0}) {
    Point x{0.48 * r, 0.6 * r, 0.64 * r};
    auto s = double_series_eval(g_xy, g_xy_hat, x, t, rule, kM, kN, 1e-3);
    CHECK(std::abs(s.value - g_xy(x)) < 1e-4);
    auto g = double_series_eval(gauss, gauss, x, t, rule, kM, kN, 1e-3);
    double radial = 0;
    for (int n = 0; n <= kN; ++n)
      radial += t.per_m[0].a_at(n, r) * std::exp(-pi * n) + t.per_m[0].at_at(n, r) * std::exp(-pi * n);
    CHECK(std::abs(g.value - radial) < 1e-8);
    auto zero = [](const Point&) { return cd(0); };
    CHECK(double_series_eval(zero, zero, x, t, rule, kM, kN).value == cd(0));
  }
  CHECK_THROWS_AS(double_series_eval(gauss, gauss, {1, 0, 0}, t, SphereRule::make(3, 2), kM, kN), Error);
}

TEST_CASE("sphere operator: identity at zero perturbation and the budget bound") {
  const auto& t = tables(3);
  auto rule = op_rule(3);
  SpherePerturbation zero;
  zero.d = 3;
  zero.eps.assign(kN + 1, {});
  zero.refresh_sigma();
  // the table-span version of the Gaussian times x3
  auto f = synthesize(t, sample_coeffs(g_z, g_z_hat, zero, t, rule));
  CHECK(budget_sphere(zero, t).measured == 0.0);
  auto diff = [](HarmonicExpansion a, const HarmonicExpansion& b) {
    for (std::size_t h = 0; h < a.comp.size(); ++h)
      for (std::size_t i = 0; i < a.comp[h].values.size(); ++i) {
        a.comp[h].values[i] -= b.comp[h].values[i];
        a.comp[h].hat[i] -= b.comp[h].hat[i];
      }
    return a;
  };
  auto Tf0 = apply_T_sphere(f, zero, t, rule);
  CHECK(surrogate_v1(diff(Tf0, f), rule) < 1e-7 * surrogate_v1(f, rule));
  auto p = quarter_budget(3);
  auto b = budget_sphere(p, t);
  auto Tf = apply_T_sphere(f, p, t, rule);
  CHECK(surrogate_v1(diff(Tf, f), rule) <= b.measured * surrogate_v1(f, rule));
  auto z = project(3, kM, grid(), [](const Point&) { return cd(0); }, [](const Point&) { return cd(0); }, rule);
  CHECK(surrogate_v1(apply_T_sphere(z, p, t, rule), rule) == 0.0);
  CHECK_THROWS_AS(apply_T_sphere(f, p, t, SphereRule::make(3, 4)), Error);
}

TEST_CASE("sphere budget: linear, and the fitted shape dominates") {
  const auto& t = tables(3);
  auto p = shaped_sphere_perturbation(3, 1e-3, 0.0, kN, 2);
  auto q = p;
  q.delta *= 2;
  for (auto& c : q.eps)
    for (auto& v : c) v *= 2;
  for (auto& c : q.eps_hat)
    for (auto& v : c) v *= 2;
  for (auto& v : q.eps0) v *= 2;
  for (auto& v : q.eps0_hat) v *= 2;
  q.refresh_sigma();
  auto a = budget_sphere(p, t), b = budget_sphere(q, t);
  CHECK(b.measured == doctest::Approx(2 * a.measured).epsilon(1e-10));
  for (int n = 1; n <= std::min(4, kN); ++n)
    CHECK(a.kernel_norms[n] <= a.fitted_C * std::pow(double(n), 10.0 * n + 7.5) * (1 + 1e-12));
  CHECK(a.analytic >= a.measured);
}

TEST_CASE("uniqueness harness: zero data and analytic targets") {
  for (int d : {2, 3}) {
    const auto& t = tables(d);
    auto rule = op_rule(d);
    auto p = quarter_budget(d);
    auto zero = [](const Point&) { return cd(0); };
    auto z = uniqueness_harness(zero, zero, p, t, rule);
    CHECK(z.converged);
    CHECK(z.error == 0.0);
    auto rep = d == 2 ? uniqueness_harness(gauss, gauss, p, t, rule) : uniqueness_harness(g_z, g_z_hat, p, t, rule);
    CHECK(rep.converged);
    CHECK(rep.budget < 0.5);
    CHECK(rep.error < 1e-3);
    CHECK(rep.zero_norm == 0.0);
  }
  auto big = shaped_sphere_perturbation(3, 1.0, 0.0, kN, 5);
  CHECK_THROWS_AS(uniqueness_harness(gauss, gauss, big, tables(3), op_rule(3)), Error);
}

TEST_CASE("sphere perturbation validation and round trip") {
  auto p = shaped_sphere_perturbation(3, 0.01, 0.5, kN, 9);
  CHECK_NOTHROW(validate(p));
  for (std::size_t n = 0; n < p.sigma.size(); ++n) CHECK(p.sigma[n] <= sphere_shape(p, int(n)));
  auto path = (std::filesystem::temp_directory_path() / "fi_sphere_pert.txt").string();
  write_sphere_perturbation(path, p);
  auto q = read_sphere_perturbation(path);
  CHECK(q.eps == p.eps);
  CHECK(q.eps_hat == p.eps_hat);
  CHECK(q.eps0 == p.eps0);
  CHECK(q.sigma == p.sigma);
  auto bad = p;
  bad.eps[1][0] *= 100;
  bad.refresh_sigma();
  CHECK_THROWS_AS(validate(bad), Error);
}
