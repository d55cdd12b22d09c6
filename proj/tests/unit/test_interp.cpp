#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "interp.hpp"

using namespace fi;
using namespace fi::interp;

namespace {
constexpr int kN = fixtures::kN4;
using fixtures::tables4;

double gauss(double r) { return std::exp(-pi * r * r); }

double sup_diff(const spaces::RadialFunction& f, const std::function<double(double)>& g, double r_max = 3.0) {
  double m = 0;
  for (std::size_t i = 0; i < f.grid->size(); ++i)
    if (f.grid->r[i] <= r_max) m = std::max(m, std::abs(f.values[i] - g(f.grid->r[i])));
  return m;
}

PerturbationProfile zero_profile() {
  PerturbationProfile p;
  p.d = 4;
  return p;
}

PerturbationProfile half_budget_profile(const InterpTables& t) {
  auto unit = shaped_profile(4, 1, 0.5, 1.0, kN + 1, 7);
  double ds = delta_star(unit.eps, unit.eps_hat, unit, t, {1, 4});
  auto p = unit;
  for (auto& v : p.eps) v *= ds / 2;
  for (auto& v : p.eps_hat) v *= ds / 2;
  p.delta = ds / 2;
  return p;
}

std::string tmp(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }
}  // namespace

TEST_CASE("tables are Kronecker at the nodes and vanish below the threshold") {
  const auto& t = tables4();
  double dev = 0;
  for (int n = 1; n <= kN; ++n)
    for (int m = 0; m <= kN; ++m) {
      dev = std::max(dev, std::abs(t.a_at(m, std::sqrt(double(n))) - (n == m ? 1.0 : 0.0)));
      dev = std::max(dev, std::abs(t.at_at(m, std::sqrt(double(n)))));
    }
  CHECK(dev < 1e-9);
  for (double v : t.a[0]) CHECK(v == 0.0);
  CHECK_THROWS_AS(t.a_at(kN + 1, 1.0), Error);
}

TEST_CASE("interpolation reproduces a Gaussian in d = 4") {
  NodeData data = node_data_from(4, kN, zero_profile(), gauss, gauss);
  auto res = interpolate(data, tables4());
  CHECK(sup_diff(res.f, gauss) < 1e-8);
  CHECK(res.tail < 1e-8);
}

TEST_CASE("zero perturbation: T is the identity and one Neumann step suffices") {
  const auto& t = tables4();
  Coeffs x{std::vector<double>(kN + 1), std::vector<double>(kN + 1)};
  for (int n = 1; n <= kN; ++n) {
    x.c[n] = std::sin(n);
    x.ch[n] = std::cos(3 * n);
  }
  auto Tx = apply_T(x, zero_profile(), t);
  for (int n = 1; n <= kN; ++n) {
    CHECK(Tx.c[n] == doctest::Approx(x.c[n]).epsilon(1e-9));
    CHECK(Tx.ch[n] == doctest::Approx(x.ch[n]).epsilon(1e-9));
  }
  CHECK(budget(zero_profile(), t, {1, 4}).value == 0.0);
  auto res = reconstruct(node_data_from(4, kN, zero_profile(), gauss, gauss), zero_profile(), t);
  CHECK(res.converged);
  CHECK(res.log.size() == 1);
  CHECK(sup_diff(res.f, gauss) < 1e-8);
}

TEST_CASE("zero data reconstructs the zero function") {
  NodeData z;
  z.d = 4;
  z.n_max = kN;
  z.f_vals.assign(kN + 1, 0.0);
  z.fhat_vals.assign(kN + 1, 0.0);
  auto p = half_budget_profile(tables4());
  auto res = reconstruct(z, p, tables4());
  CHECK(res.converged);
  for (auto v : res.f.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("budget is linear in a global scale of the profile") {
  const auto& t = tables4();
  auto p = shaped_profile(4, 1, 0.5, 1e-3, kN + 1, 3);
  auto q = p;
  q.delta *= 2;
  for (auto& v : q.eps) v *= 2;
  for (auto& v : q.eps_hat) v *= 2;
  double a = budget(p, t, {1, 4}).value, b = budget(q, t, {1, 4}).value;
  CHECK(b == doctest::Approx(2 * a).epsilon(1e-12));
  CHECK(a > 0);
}

TEST_CASE("perturbed reconstruction of a Gaussian within half the critical budget") {
  const auto& t = tables4();
  auto p = half_budget_profile(t);
  auto res = reconstruct(node_data_from(4, kN, p, gauss, gauss), p, t, 60, 1e-13);
  CHECK(res.converged);
  CHECK(res.budget < 0.5);
  for (auto& l : res.log)
    if (l.j >= 2) CHECK(l.ratio <= res.budget + 0.05);
  CHECK(sup_diff(res.f, gauss) < 1e-8);
}

TEST_CASE("reconstruction is linear in the data") {
  const auto& t = tables4();
  auto p = half_budget_profile(t);
  auto g2 = [](double r) { return std::exp(-2 * pi * r * r); };
  auto g2h = [](double r) { return 0.25 * std::exp(-pi * r * r / 2); };
  auto d1 = node_data_from(4, kN, p, gauss, gauss), d2 = node_data_from(4, kN, p, g2, g2h), d3 = d1;
  for (int n = 0; n <= kN; ++n) {
    d3.f_vals[n] += 2 * d2.f_vals[n];
    d3.fhat_vals[n] += 2 * d2.fhat_vals[n];
  }
  auto x1 = reconstruct(d1, p, t).x, x2 = reconstruct(d2, p, t).x, x3 = reconstruct(d3, p, t).x;
  for (int n = 0; n <= kN; ++n) {
    CHECK(std::abs(x3.c[n] - x1.c[n] - 2 * x2.c[n]) < 1e-10);
    CHECK(std::abs(x3.ch[n] - x1.ch[n] - 2 * x2.ch[n]) < 1e-10);
  }
}

TEST_CASE("perturbed basis functions equal the plain ones at zero perturbation") {
  const auto& t = tables4();
  auto h = basis_h(t, zero_profile(), 5, false);
  double m = 0;
  for (std::size_t i = 0; i < t.grid->size(); ++i) m = std::max(m, std::abs(h.f.values[i] - t.a[5][i]));
  CHECK(m < 1e-9);
  // h_n is Kronecker on the perturbed nodes
  auto p = half_budget_profile(t);
  auto hp = basis_h(t, p, 5, false, 60, 1e-13);
  for (int n = 1; n <= kN; ++n) CHECK(std::abs(hp.f.eval(std::sqrt(n + p.e(n))).real() - (n == 5)) < 1e-7);
}

TEST_CASE("profile validation") {
  auto p = shaped_profile(4, 1, 0.5, 0.1, 6, 1);
  CHECK_NOTHROW(validate(p, 4));
  p.eps[2] = 10 * profile_shape(p, 4, 2);
  CHECK_THROWS_AS(validate(p, 4), Error);
  auto q = shaped_profile(4, 1, 0.5, 0.1, 6, 1);
  q.s = 0.5;
  CHECK_THROWS_AS(validate(q, 4), Error);
  CHECK_THROWS_AS(validate(shaped_profile(4, 1, 0.5, 0.1, 6, 1), 3), Error);
}

TEST_CASE("profile and node data round trip") {
  auto p = shaped_profile(4, 1.5, 0.25, 0.05, 9, 11);
  write_profile(tmp("fi_profile.txt"), p);
  auto q = read_profile(tmp("fi_profile.txt"));
  CHECK(q.s == p.s);
  CHECK(q.eta == p.eta);
  CHECK(q.eps == p.eps);
  CHECK(q.eps_hat == p.eps_hat);
  auto d = node_data_from(4, 8, p, gauss, gauss);
  write_node_data(tmp("fi_nodes.txt"), d);
  auto e = read_node_data(tmp("fi_nodes.txt"));
  CHECK(e.f_vals == d.f_vals);
  CHECK(e.fhat_vals == d.fhat_vals);
}
