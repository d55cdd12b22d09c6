#include <cmath>

#include "basis.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace fi;
using namespace fi::basis;

namespace {
HalfInt K(int two_k) { return HalfInt{two_k}; }
double maxdiff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("nu and mu") {
  auto m = nu_mu(K(1));
  CHECK(m.nu_minus == 0);
  CHECK(m.nu_plus == 1);
  m = nu_mu(K(4));
  CHECK(m.nu_minus == 1);
  CHECK(m.nu_plus == 1);
  CHECK(m.mu_plus == doctest::Approx(-0.5));
  CHECK_THROWS_AS(nu_mu(K(0)), Error);
}

TEST_CASE("semicircle and shifted contours agree") {
  std::vector<double> r = {0.0, 0.5, 1.0, 1.7, 3.0};
  for (int two_k : {1, 2, 3, 5})
    for (int eps : {1, -1})
      for (cd tau : {cd(0.1, 1.3), cd(-0.4, 1.05), cd(0.3, 2.5)}) {
        auto a = F_semicircle(K(two_k), eps, tau, r);
        auto b = F_shifted(K(two_k), eps, tau, r, std::max(tau.imag(), 1.0) + 0.5);
        CHECK(maxdiff(a, b) < 1e-11);
      }
}

TEST_CASE("continued formula inside the disk agrees with the reduced evaluation") {
  std::vector<double> r = {0.0, 0.8, 1.4, 2.2};
  for (int two_k : {1, 3, 4})
    for (int eps : {1, -1})
      for (cd s : {cd(0.2, 0.6), cd(-0.5, 0.5), cd(0.05, 0.3)}) {
        auto a = F_continued(K(two_k), eps, s, r);
        auto b = F_any(K(two_k), eps, s, r);
        CHECK(maxdiff(a, b) < 1e-10);
      }
}

TEST_CASE("functional equations of F") {
  std::vector<double> r = {0.0, 0.9, 2.0};
  HalfInt k = K(3);
  for (int eps : {1, -1}) {
    cd tau(0.35, 0.4);
    auto f = F_any(k, eps, tau, r);
    auto f2 = F_any(k, eps, tau + 2.0, r);
    CHECK(maxdiff(f, f2) < 1e-10);
    auto g = F_any(k, eps, -1.0 / tau, r);
    cd fac = double(eps) * std::exp(-k.value() * std::log(tau / I));
    for (std::size_t c = 0; c < r.size(); ++c) {
      double pr2 = pi * r[c] * r[c];
      cd lhs = f[c] - fac * g[c];
      cd rhs = std::exp(I * tau * pr2) - fac * std::exp(I * (-1.0 / tau) * pr2);
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("d = 1 coefficients interpolate at square roots") {
  std::vector<double> r;
  for (int m = 1; m <= 6; ++m) r.push_back(std::sqrt(double(m)));
  int n_max = 8;
  for (int sign : {1, -1}) {
    auto t = coefficients(K(1), sign, r, n_max);
    for (int n = 0; n <= n_max; ++n)
      for (int m = 1; m <= 6; ++m) {
        double want = n == m ? 1.0 : 0.0;
        CHECK(std::abs(t.values[n][m - 1] - want) < 1e-8);
      }
    CHECK(t.meta.max_imag < 1e-9);
  }
}

TEST_CASE("PoleProximity near the contour") {
  std::vector<double> r = {1.0};
  CHECK_THROWS_AS(F_semicircle(K(1), 1, cd(0.6, 0.8 + 1e-9), r), Error);
}

TEST_CASE("table round trip") {
  auto t = coefficients(K(2), 1, {0.0, 0.5, 1.5}, 3);
  write_table(fixtures::tmp_path("fi_basis_rt.csv"), t);
  auto u = read_table(fixtures::tmp_path("fi_basis_rt.csv"));
  CHECK(u.n_max == 3);
  CHECK(u.r == t.r);
  for (int n = 0; n <= 3; ++n) CHECK(u.values[n] == t.values[n]);
  CHECK(u.meta.blocks.size() == t.meta.blocks.size());
}

TEST_CASE("g tilde") {
  CHECK(g_tilde(2 * pi * std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g_tilde(3.0) == 1.0);
  CHECK(g_tilde(40.0) == doctest::Approx(std::pow(40.0 / (2 * pi * std::exp(1.0)), 20.0)));
  CHECK(g_tilde(40.0) > 1.0);
}

TEST_CASE("bound report for k = 1/2") {
  std::vector<double> r;
  for (int i = 0; i <= 240; ++i) r.push_back(0.05 * i);
  const int n_max = 6;
  auto plus = coefficients(K(1), 1, r, n_max), minus = coefficients(K(1), -1, r, n_max);
  auto rep = bound_report(K(1), 3.0, plus, minus);
  CHECK(rep.g_tilde == 1.0);
  REQUIRE(rep.rows.size() == n_max + 1);
  CHECK(rep.fitted_constant > 0);
  CHECK(rep.all_dominated);
  CHECK(rep.min_rate > 0);
  for (auto& row : rep.rows) {
    CHECK(row.sup_measured > 0);
    CHECK(row.shape == doctest::Approx(bound_shape(K(1), 3.0, row.n)));
  }
  CHECK_THROWS_AS(bound_report(K(1), 2.5, plus, minus), Error);
  auto short_grid = coefficients(K(1), 1, {0.0, 0.5, 1.0}, 2);
  CHECK_THROWS_AS(bound_report(K(1), 3.0, plus, short_grid), Error);
}

TEST_CASE("deep in the cusp: both contours agree with the closed form at r = 0") {
  // k = 2, eps = -1: F(tau, 0) = 1 + 2 w^2 for w = -1/(tau - 1)
  for (double H : {5.0, 60.0, 120.0, 250.0})
    for (double u : {0.001, 0.2, 0.49}) {
      cd w(u, H), tau = 1.0 - 1.0 / w, want = 1.0 + 2.0 * w * w;
      cd s = F_semicircle(K(4), -1, tau, {0.0})[0];
      cd h = F_shifted(K(4), -1, tau, {0.0}, 1.5)[0];
      CHECK(std::abs(s - want) <= 1e-9 * std::abs(want));
      CHECK(std::abs(h - want) <= 1e-9 * std::abs(want));
    }
}

TEST_CASE("semicircle resolves a pole just off the contour near a cusp") {
  cd tau(0.999978, 0.007814);
  auto s = F_semicircle(K(1), 1, tau, {1.0})[0];
  auto h = F_shifted(K(1), 1, tau, {1.0}, 1.5)[0];
  CHECK(std::abs(s - h) < 1e-10);
}
