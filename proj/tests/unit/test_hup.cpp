#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "hup.hpp"

using namespace fi;
using namespace fi::hup;

namespace {
const Pipeline& synth() {
  static const Pipeline P = build_pipeline(synthetic_profile(1.0));
  return P;
}
OddProfile zero_f() {
  return OddProfile::sample([](double) { return 0.0; });
}
interp::PerturbationProfile cross_profile(double delta, int n_max) { return shaped_cross_profile(delta, n_max); }
}  // namespace

TEST_CASE("g from f: weight, parity and errors") {
  auto P = build_pipeline(OddProfile::sample([](double t) { return t * std::exp(-pi * t * t) * (1 - 3 * t * t); }),
                          1e300);
  for (double t : {0.3, 0.9, 1.0, 2.2}) {
    double f = t * std::exp(-pi * t * t) * (1 - 3 * t * t);
    CHECK(P.g.eval(t) == doctest::Approx(t * std::sqrt(1 + t * t * t * t) * f).epsilon(1e-10));
    CHECK(std::abs(P.g.eval(t) - P.g.eval(-t)) <= 1e-12);
  }
  CHECK(std::abs(P.g.eval(0.0)) < 1e-15);
  auto even = OddProfile::sample([](double t) { return std::exp(-t * t); });
  CHECK_THROWS_AS(g_from_f(even), Error);
  try {
    g_from_f(even);
  } catch (const Error& e) {
    CHECK(e.code == Err::ParityViolation);
  }
}

TEST_CASE("antiderivative: zero integral, oddness, flat start") {
  const auto& P = synth();
  CHECK(std::abs(P.anti.total) < 1e-12);
  double odd = 0;
  for (double t = -11.9; t < 12; t += 0.0173) odd = std::max(odd, std::abs(P.G.eval(t) + P.G.eval(-t)));
  CHECK(odd < 1e-9);
  double h = 1e-4;
  CHECK(std::abs(P.G.eval(0)) < 1e-8);
  CHECK(std::abs((P.G.eval(h) - P.G.eval(-h)) / (2 * h)) < 1e-8);
  CHECK(std::abs((P.G.eval(h) - 2 * P.G.eval(0) + P.G.eval(-h)) / (h * h)) < 1e-8);
  // G' = g
  for (double t : {-2.0, 0.4, 1.3}) CHECK((P.G.eval(t + h) - P.G.eval(t - h)) / (2 * h) == doctest::Approx(P.g.eval(t)).epsilon(1e-6));
  auto Z = build_pipeline(zero_f());
  for (double t : {-3.0, 0.0, 5.0}) CHECK(Z.G.eval(t) == 0.0);
  auto bad = OddProfile::sample([](double t) { return t * std::exp(-pi * t * t); });
  CHECK_THROWS_AS(build_pipeline(bad), Error);
}

TEST_CASE("Phi: routes agree and the by-parts identity holds") {
  const auto& P = synth();
  for (double r : {0.0, 0.3, 0.8, 1.2, 2.0, 3.5}) {
    double ag = 1;
    cd v = phi_eval(P, r, &ag);
    CHECK(ag <= 1e-7);
    CHECK(std::abs(v.real()) < 1e-14);  // G odd and real
    if (r >= 0.5) CHECK(std::abs(phi_by_parts(P, r) - v) < 1e-6);
  }
  auto Z = build_pipeline(zero_f());
  CHECK(phi_eval(Z, 1.0) == cd(0));
  CHECK(phi_hat_eval(Z, 1.0) == cd(0));
}

TEST_CASE("Phi decays at least like r^-4 on [2, 6]") {
  const auto& P = synth();
  double prev = std::abs(phi_eval(P, 2.0));
  for (double r = 2.5; r <= 6.0; r += 0.5) {
    double v = std::abs(phi_eval(P, r));
    CHECK(v * std::pow(r, 4) <= std::abs(phi_eval(P, 2.0)) * 16 + 1e-15);
    prev = v;
  }
  (void)prev;
}

TEST_CASE("transform of Phi: direct, by parts, and the 4-d Hankel oracle") {
  const auto& P = synth();
  auto g = spaces::RadialGrid::panels(7, 0.5, 1, 16);
  std::vector<cd> vals;
  for (double r : g->r) vals.push_back(phi_eval(P, r));
  std::vector<double> rho;
  for (double x = 0.5; x <= 3.0; x += 0.5) rho.push_back(x);
  auto H = spaces::hankel(4, *g, vals, rho);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    cd d = phi_hat_eval(P, rho[i]);
    CHECK(std::abs(H[i] - d) <= 1e-5);
    CHECK(std::abs(phi_hat_by_parts(P, rho[i]) - d) <= 1e-6);
  }
  CHECK(std::abs(phi_hat_eval(P, 0.0)) < 1e-12);
}

TEST_CASE("axis transforms: equivalences with Phi, evenness, zero at the origin") {
  const auto& P = synth();
  CHECK(std::abs(mu_hat_axis(P, Axis::X, 0.0)) < 1e-12);
  for (double v : {0.7, 2.0, 5.3}) {
    CHECK(std::abs(mu_hat_axis(P, Axis::X, v) - mu_hat_axis(P, Axis::X, -v)) < 1e-12);
    CHECK(std::abs(mu_hat_axis(P, Axis::Y, v) - mu_hat_axis(P, Axis::Y, -v)) < 1e-12);
    CHECK(std::abs(phi_eval(P, std::sqrt(v)) - I / (pi * v) * mu_hat_axis(P, Axis::X, v)) < 1e-12);
    CHECK(std::abs(phi_hat_eval(P, std::sqrt(v)) - mu_hat_axis(P, Axis::Y, v) / (pi * I * v)) < 1e-10);
  }
  auto Z = build_pipeline(zero_f());
  CHECK(mu_hat_axis(Z, Axis::Y, 3.0) == cd(0));
}

TEST_CASE("hup_check: zero function, forced-zero data, honest data") {
  const auto& t = fixtures::tables4();
  const int N = fixtures::kN4;
  auto p = cross_profile(1e-3, N);
  auto Z = build_pipeline(zero_f());
  auto rz = hup_check(cross_data_from(Z, p, N), zero_f(), t);
  CHECK(rz.verdict == Verdict::Zero);
  CHECK(rz.phi_rec_norm <= 1e-8);
  CHECK(rz.phi_direct_norm <= 1e-8);
  CHECK(rz.data_norm <= 1e-8);

  auto f = synthetic_profile(1.0);
  auto forced = cross_data_from(synth(), p, N);
  for (auto& v : forced.mu_x) v = 0;
  for (auto& v : forced.mu_y) v = 0;
  auto rf = hup_check(forced, f, t);
  CHECK(rf.verdict == Verdict::Inconsistent);
  CHECK(rf.discrepancy > 1e-3);

  auto honest = hup_check(cross_data_from(synth(), p, N), f, t);
  CHECK(honest.verdict == Verdict::Reconstructed);
  CHECK(honest.discrepancy <= 1e-3);
  CHECK(honest.budget < 1);
}

TEST_CASE("cross data validation and round trip") {
  auto p = cross_profile(1e-2, 6);
  auto d = cross_data_from(synth(), p, 6);
  CHECK_NOTHROW(validate(d));
  auto path = (std::filesystem::temp_directory_path() / "fi_cross.txt").string();
  write_cross_data(path, d);
  auto e = read_cross_data(path);
  CHECK(e.mu_x == d.mu_x);
  CHECK(e.mu_y == d.mu_y);
  CHECK(e.profile.eps == d.profile.eps);
  auto bad = d;
  bad.profile.eps[2] = 1e-2;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = d;
  bad.profile.eps[0] = 1e-9;
  CHECK_THROWS_AS(validate(bad), Error);

  auto f = synthetic_profile(1.0);
  auto fp = (std::filesystem::temp_directory_path() / "fi_odd.txt").string();
  write_odd_profile(fp, f);
  CHECK(read_odd_profile(fp).f == f.f);
}
