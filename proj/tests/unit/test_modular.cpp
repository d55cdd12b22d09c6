#include <cmath>
#include <random>

#include "doctest.h"
#include "modular.hpp"

using namespace fi;
using namespace fi::modular;

namespace {
// plain partial sums, only valid well inside H
cd theta3_direct(cd z) {
  cd s = 1.0;
  for (int n = 1; n < 60; ++n) s += 2.0 * std::exp(I * pi * double(n * n) * z);
  return s;
}
}  // namespace

TEST_CASE("theta constants at i and 2i") {
  cd t = theta(Which::Theta3, {0, 1});
  CHECK(std::abs(t - std::pow(pi, 0.25) / std::tgamma(0.75)) < 1e-15);
  CHECK(std::abs(theta(Which::Theta3, {0, 2}) - theta3_direct({0, 2})) < 1e-15);
  auto lj = lambda_J({0, 1});
  CHECK(std::abs(lj.lambda - 0.5) < 1e-14);
  CHECK(std::abs(lj.J - 64.0) < 1e-11);
  CHECK(std::abs(lj.J_minus) < 1e-14);
}

TEST_CASE("Jacobi identity and theta inversion at random points") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> ux(-3, 3), uy(0.05, 3);
  for (int i = 0; i < 200; ++i) {
    HalfPlanePoint z(ux(g), uy(g));
    cd a = theta(Which::Theta2, z), b = theta(Which::Theta3, z), c = theta(Which::Theta4, z);
    double scale = std::max({std::norm(a) * std::norm(a), std::norm(b) * std::norm(b), 1.0});
    CHECK(std::abs(std::pow(b, 4) - std::pow(a, 4) - std::pow(c, 4)) < 1e-11 * scale);
    cd w = -1.0 / z.z();
    cd lhs = theta(Which::Theta3, HalfPlanePoint(w));
    cd rhs = std::sqrt(z.z() / I) * b;
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("theta is 2-periodic and Theta3(z+1) = Theta4(z)") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> ux(-2, 2), uy(0.1, 2);
  for (int i = 0; i < 100; ++i) {
    double x = ux(g), y = uy(g);
    cd a = theta(Which::Theta3, {x, y});
    CHECK(std::abs(theta(Which::Theta3, {x + 2, y}) - a) < 1e-12 * std::max(1.0, std::abs(a)));
    CHECK(std::abs(theta(Which::Theta3, {x + 1, y}) - theta(Which::Theta4, {x, y})) <
          1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("reduction lands in the fundamental domain and is invertible") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> ux(-5, 5), ly(-6, 1);
  for (int i = 0; i < 500; ++i) {
    HalfPlanePoint tau(ux(g), std::pow(10.0, ly(g)));
    auto r = reduce_to_fd(tau);
    CHECK(std::abs(r.z.re) <= 1 + 1e-12);
    CHECK(std::norm(r.z.z()) >= 1 - 1e-9);
    cd back = apply_word_inverse(r);
    CHECK(std::abs(back - tau.z()) < 1e-8 * std::max(1.0, std::abs(tau.z())));
  }
}

TEST_CASE("log theta tracks theta") {
  for (double y : {0.02, 0.1, 0.7, 2.0})
    for (double x : {-0.9, -0.3, 0.0, 0.45, 0.99}) {
      HalfPlanePoint z(x, y);
      cd l = log_theta_pow(z, 2, {});
      cd t = theta(Which::Theta3, z);
      CHECK(std::abs(std::exp(l) - t * t) < 1e-10 * std::norm(t));
    }
}

TEST_CASE("extended precision agrees with double") {
  QSeriesConfig ext;
  ext.precision = Precision::Extended;
  for (double y : {0.01, 0.3, 1.5}) {
    cd a = theta(Which::Theta3, {0.2, y}), b = theta(Which::Theta3, {0.2, y}, ext);
    CHECK(std::abs(a - b) < 1e-11 * std::abs(b));
  }
}

TEST_CASE("reduction examples") {
  auto r = reduce_to_fd({0, 1});
  CHECK(r.word.empty());
  CHECK(std::abs(r.log_j_theta) == 0.0);
  r = reduce_to_fd({2, 1});
  REQUIRE(r.word.size() == 1);
  CHECK(r.word[0] == Letter::Tm2);
  r = reduce_to_fd({0, 0.5});
  REQUIRE(r.word.size() == 1);
  CHECK(r.word[0] == Letter::S);
  CHECK(std::abs(r.z.z() - cd(0, 2)) < 1e-15);
  CHECK(std::abs(log_theta_pow({0, 1}, 1, {}) - std::log(std::pow(pi, 0.25) / std::tgamma(0.75))) < 1e-15);
  CHECK(log_theta_pow({0, 3}, 3, {}).imag() == 0.0);
}

TEST_CASE("invalid input is rejected") {
  CHECK_THROWS_AS(HalfPlanePoint(0, 0), Error);
  CHECK_THROWS_AS(HalfPlanePoint(0, -1), Error);
  QSeriesConfig bad;
  bad.max_terms = 0;
  CHECK_THROWS_AS(validate(bad), Error);
}
