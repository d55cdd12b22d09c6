#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "fixtures.hpp"
#include "spaces.hpp"

using namespace fi;
using namespace fi::spaces;

namespace {
double maxabs(const std::vector<cd>& a, const std::vector<cd>& b, const RadialGrid& g, double rmax = 1e300) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (g.r[i] <= rmax) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
cd gauss(double r) { return std::exp(-pi * r * r); }
}  // namespace

TEST_CASE("panel grid shape") {
  auto g = RadialGrid::panels(8.0);
  CHECK(g->breaks.front() == 0.0);
  CHECK(g->r_max() == 8.0);
  CHECK(g->size() == g->panels_count() * 16);
  for (std::size_t i = 1; i < g->breaks.size(); ++i) {
    double h = g->breaks[i] - g->breaks[i - 1];
    CHECK(h <= 0.5 * 1.25 + 1e-12);
  }
  CHECK_THROWS_AS(g->panel_of(8.5), Error);
  CHECK_THROWS_AS(RadialGrid::from_breaks({0.0, 1.0, 1.0}), Error);
}

TEST_CASE("panel interpolation is spectral") {
  auto g = RadialGrid::panels(6.0);
  auto f = sample(1, g, [](double r) { return cd(std::cos(3 * r) * std::exp(-r)); });
  for (double x : {0.0, 0.013, 1.234, 2.5, 5.999, 6.0}) CHECK(std::abs(f.eval(x) - std::cos(3 * x) * std::exp(-x)) < 1e-13);
}

TEST_CASE("lambda_nu is continuous across the series switch") {
  for (int two_nu = -1; two_nu <= 12; ++two_nu) {
    double a = lambda_nu(two_nu, 1.0 - 1e-12), b = lambda_nu(two_nu, 1.0 + 1e-12);
    CHECK(std::abs(a - b) < 1e-11);
  }
  CHECK(lambda_nu(-1, 0.0) == doctest::Approx(1 / std::sqrt(pi)));
  CHECK(lambda_nu(0, 2.0) == doctest::Approx(0.22389077914123567));
}

TEST_CASE("Gaussian is self-dual in every dimension") {
  auto g = RadialGrid::panels(7.0);
  for (int d = 1; d <= 6; ++d) {
    auto f = sample(d, g, gauss);
    auto h = radial_fourier(f);
    CHECK(maxabs(h.values, f.values, *g) < 1e-10);
  }
}

TEST_CASE("scaled Gaussian in d = 1") {
  auto g = RadialGrid::panels(8.0);
  double t = 2;
  auto f = sample(1, g, [&](double r) { return cd(std::exp(-pi * t * r * r)); });
  auto h = radial_fourier(f);
  double m = 0;
  for (std::size_t i = 0; i < g->size(); ++i)
    m = std::max(m, std::abs(h.values[i] - std::exp(-pi * g->r[i] * g->r[i] / t) / std::sqrt(t)));
  CHECK(m < 1e-10);
}

TEST_CASE("radial Fourier is linear") {
  auto g = RadialGrid::panels(7.0);
  auto f = sample(3, g, gauss);
  auto q = sample(3, g, [](double r) { return cd(r * r * std::exp(-pi * r * r), std::exp(-2 * r * r)); });
  auto s = f;
  for (std::size_t i = 0; i < g->size(); ++i) s.values[i] += 2.0 * q.values[i];
  auto hf = radial_fourier(f), hq = radial_fourier(q), hs = radial_fourier(s);
  double m = 0;
  for (std::size_t i = 0; i < g->size(); ++i) m = std::max(m, std::abs(hs.values[i] - hf.values[i] - 2.0 * hq.values[i]));
  CHECK(m < 1e-10);
}

TEST_CASE("Gaussian times polynomial: analytic transform and double inversion") {
  auto g = RadialGrid::panels(8.0);
  for (int d = 1; d <= 4; ++d) {
    auto f = sample(d, g, [](double r) { return cd(r * r * std::exp(-pi * r * r)); });
    auto h = radial_fourier(f);
    double m = 0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      double r = g->r[i];
      m = std::max(m, std::abs(h.values[i] - (d / (2 * pi) - r * r) * std::exp(-pi * r * r)));
    }
    CHECK(m < 1e-10);
    auto hh = radial_fourier(h);
    CHECK(maxabs(hh.values, f.values, *g, 6.0) < 1e-6);
  }
}

TEST_CASE("TailNotNegligible for slowly decaying input") {
  auto g = RadialGrid::panels(5.0);
  auto f = sample(2, g, [](double r) { return cd(1.0 / (1 + r * r)); });
  CHECK_THROWS_AS(radial_fourier(f), Error);
  try {
    radial_fourier(f);
  } catch (const Error& e) {
    CHECK(e.code == Err::TailNotNegligible);
  }
}

TEST_CASE("V^s norm") {
  auto g = RadialGrid::panels(7.0);
  auto f = sample(1, g, gauss, gauss);
  CHECK(vs_norm(f, {1, 1}) == doctest::Approx(2 * (1 + 1 / pi)).epsilon(1e-10));
  auto f2 = f;
  for (auto& v : f2.values) v *= 2.0;
  for (auto& v : f2.hat) v *= 2.0;
  CHECK(vs_norm(f2, {1, 1}) == doctest::Approx(2 * vs_norm(f, {1, 1})).epsilon(1e-14));
  auto z = sample(3, g, [](double) { return cd(0.0); });
  CHECK(vs_norm(z, {2, 3}) == 0.0);
  CHECK_THROWS_AS(vs_norm(f, {0.5, 1}), Error);
}

TEST_CASE("V^s norm dominates the sup norm") {
  auto g = RadialGrid::panels(8.0);
  for (int d = 1; d <= 4; ++d) {
    auto f = sample(d, g, [](double r) { return cd((1 + r * r) * std::exp(-pi * r * r)); });
    double sup = 0;
    for (auto v : f.values) sup = std::max(sup, std::abs(v));
    CHECK(sup <= vs_norm(f, {1, d}));
  }
}

TEST_CASE("decay check") {
  auto g = RadialGrid::panels(7.0);
  auto ga = sample(2, g, gauss, gauss);
  for (double s : {1.0, 2.0, 5.0, 20.0}) CHECK(decay_check(ga, {s, 2}).pass);

  auto gl = RadialGrid::panels(200.0, 0.5, 1e9);
  auto alg = sample(1, gl, [](double x) { return cd(1 / ((1 + x * x) * (1 + x * x))); },
                    [](double x) { return cd(0.5 * pi * std::exp(-2 * pi * x) * (1 + 2 * pi * x)); });
  auto rep = decay_check(alg, {2, 1});
  CHECK(rep.exponent_f == doctest::Approx(4).epsilon(0.05));
  CHECK(rep.pass);

  auto flat = sample(1, gl, [](double x) { return cd(1 / (1 + x)); }, [](double x) { return cd(1 / (1 + x)); });
  bool flagged = false;
  try {
    flagged = !decay_check(flat, {4, 1}).pass;
  } catch (const Error& e) {
    flagged = e.code == Err::GridTooShort;
  }
  CHECK(flagged);
}

TEST_CASE("radial function round trip") {
  auto g = RadialGrid::panels(4.0);
  auto f = sample(3, g, [](double r) { return cd(std::exp(-r), 0.1 * r); }, gauss);
  write_radial(fixtures::tmp_path("fi_rf_rt.txt"), f);
  auto h = read_radial(fixtures::tmp_path("fi_rf_rt.txt"));
  CHECK(h.d == 3);
  CHECK(h.values == f.values);
  CHECK(h.hat == f.hat);
  CHECK(h.grid->breaks == g->breaks);
}
