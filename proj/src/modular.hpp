#pragma once
#include <string>
#include <vector>

#include "common.hpp"

namespace fi::modular {

struct HalfPlanePoint {
  double re = 0, im = 1;
  HalfPlanePoint() = default;
  HalfPlanePoint(double r, double i);  // throws InvalidArgument unless i > 0
  explicit HalfPlanePoint(cd z) : HalfPlanePoint(z.real(), z.imag()) {}
  cd z() const { return {re, im}; }
};

enum class Precision { Double, Extended };

struct QSeriesConfig {
  double target_abs_error = 1e-17;
  int max_terms = 40;
  double min_im_direct = 0.5;
  Precision precision = Precision::Double;
};

void validate(const QSeriesConfig& cfg);

enum class Which { Theta2, Theta3, Theta4 };

enum class Letter { S, T2, Tm2 };
std::string letter_name(Letter l);

struct ReductionResult {
  HalfPlanePoint z;
  std::vector<Letter> word;  // letters in the order they were applied to the input
  cd log_j_theta{0, 0};      // log theta(input) - log theta(z)
};

// Gamma_theta reduction into the closure of {|z|>1, |Re z|<1}
ReductionResult reduce_to_fd(const HalfPlanePoint& tau, std::size_t max_letters = 1000000);
// apply the inverse letters in reverse order: recovers the original point
cd apply_word_inverse(const ReductionResult& r);

cd theta(Which w, const HalfPlanePoint& z, const QSeriesConfig& cfg = {});

struct LambdaJ {
  cd lambda, J, J_minus;
};
LambdaJ lambda_J(const HalfPlanePoint& z, const QSeriesConfig& cfg = {});

cd log_theta_pow(const HalfPlanePoint& z, int two_k, const QSeriesConfig& cfg = {});

// logs of (Theta2, Theta3, Theta4) at any point of H; branch is arbitrary up to
// 2 pi i / 8 multiples, which is harmless for integer powers of fourth powers
struct ThetaLogs {
  cd l2, l3, l4;
};
ThetaLogs theta_logs(cd z, const QSeriesConfig& cfg = {});

// everything the kernels need at one point, in log form
struct KernelLogs {
  cd l3;   // log theta
  cd lJ;   // log J
  cd lJm;  // log J_-
};
KernelLogs kernel_logs(cd z);

// e^w - 1 without cancellation for small w
cd expm1c(cd w);

}  // namespace fi::modular
