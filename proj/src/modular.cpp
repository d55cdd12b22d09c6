#include "modular.hpp"

#include <cmath>
#include <sstream>

namespace fi::modular {

HalfPlanePoint::HalfPlanePoint(double r, double i) : re(r), im(i) {
  if (!(i > 0) || !std::isfinite(r) || !std::isfinite(i)) {
    std::ostringstream os;
    os << "point (" << r << ", " << i << ") is not in the upper half-plane";
    fail(Err::InvalidArgument, os.str());
  }
}

void validate(const QSeriesConfig& cfg) {
  if (!(cfg.target_abs_error > 0) || cfg.max_terms < 1 || !(cfg.min_im_direct > 0))
    fail(Err::InvalidArgument, "QSeriesConfig: all fields must be positive");
}

std::string letter_name(Letter l) {
  switch (l) {
    case Letter::S: return "S";
    case Letter::T2: return "T2";
    case Letter::Tm2: return "T-2";
  }
  return "?";
}

namespace {

template <class T>
struct Logs3 {
  std::complex<T> l[3];  // Theta2, Theta3, Theta4
};

// truncation index: first omitted Gaussian weight below target
int terms_for(double im, const QSeriesConfig& cfg) {
  int n = 1;
  while (-pi * double(n) * n * im >= std::log(cfg.target_abs_error)) {
    ++n;
    if (n > cfg.max_terms) {
      std::ostringstream os;
      os << "q-series needs more than " << cfg.max_terms << " terms at Im z = " << im;
      fail(Err::NonConvergence, os.str());
    }
  }
  return n;
}

template <class T>
Logs3<T> direct_logs(std::complex<T> z, const QSeriesConfig& cfg) {
  using C = std::complex<T>;
  const T PI = std::numbers::pi_v<T>;
  int N = terms_for(double(z.imag()), cfg);
  C q = std::exp(C(0, PI) * z);
  C s3 = 0, s4 = 0, s2 = 1;
  // q^{n^2} and q^{n(n+1)} by repeated multiplication
  C qn2 = 1, step = q;  // q^{n^2}, q^{2n+1}
  C qnn = 1, step2 = q * q;  // q^{n(n+1)}, q^{2n+2}
  for (int n = 1; n < N; ++n) {
    qn2 *= step;
    step *= q * q;
    s3 += qn2;
    s4 += (n % 2 ? -qn2 : qn2);
    qnn *= step2;
    step2 *= q * q;
    s2 += qnn;
  }
  Logs3<T> out;
  out.l[0] = std::log(T(2)) + C(0, PI / 4) * z + std::log(s2);
  out.l[1] = std::log(T(1) + T(2) * s3);
  out.l[2] = std::log(T(1) + T(2) * s4);
  return out;
}

template <class T>
Logs3<T> reduced_logs(std::complex<T> z, const QSeriesConfig& cfg) {
  using C = std::complex<T>;
  const T PI = std::numbers::pi_v<T>;
  // value at the input = exp(L[j]) * value at the current point, component p[j]
  C L[3] = {0, 0, 0};
  int p[3] = {0, 1, 2};
  for (int it = 0; it < 100000; ++it) {
    if (double(z.imag()) >= cfg.min_im_direct) break;
    T m = std::floor(z.real() + T(0.5));
    if (m != 0) {
      long long mi = static_cast<long long>(m);
      long long m8 = ((mi % 8) + 8) % 8;
      z -= m;
      for (int j = 0; j < 3; ++j) {
        if (p[j] == 0)
          L[j] += C(0, PI * T(m8) / 4);
        else if (mi % 2)
          p[j] = 3 - p[j];
      }
    }
    if (std::norm(z) < T(1)) {
      C w = T(-1) / z;
      C h = T(0.5) * std::log(w / C(0, 1));
      for (int j = 0; j < 3; ++j) {
        L[j] += h;
        p[j] = 2 - p[j];
      }
      z = w;
      continue;
    }
    break;
  }
  Logs3<T> base = direct_logs(z, cfg);
  Logs3<T> out;
  for (int j = 0; j < 3; ++j) out.l[j] = L[j] + base.l[p[j]];
  return out;
}

ThetaLogs to_double(const Logs3<long double>& e) {
  auto c = [](std::complex<long double> v) { return cd(double(v.real()), double(v.imag())); };
  return {c(e.l[0]), c(e.l[1]), c(e.l[2])};
}

}  // namespace

ThetaLogs theta_logs(cd z, const QSeriesConfig& cfg) {
  if (!(z.imag() > 0)) fail(Err::InvalidArgument, "theta_logs: Im z must be positive");
  if (cfg.precision == Precision::Extended) {
    std::complex<long double> ze(z.real(), z.imag());
    return to_double(reduced_logs<long double>(ze, cfg));
  }
  Logs3<double> r = reduced_logs<double>(z, cfg);
  return {r.l[0], r.l[1], r.l[2]};
}

cd theta(Which w, const HalfPlanePoint& z, const QSeriesConfig& cfg) {
  validate(cfg);
  ThetaLogs t = theta_logs(z.z(), cfg);
  cd l = w == Which::Theta2 ? t.l2 : (w == Which::Theta3 ? t.l3 : t.l4);
  return std::exp(l);
}

LambdaJ lambda_J(const HalfPlanePoint& z, const QSeriesConfig& cfg) {
  validate(cfg);
  ThetaLogs t = theta_logs(z.z(), cfg);
  LambdaJ out;
  out.lambda = std::exp(4.0 * (t.l2 - t.l3));
  out.J = std::exp(std::log(16.0) + 8.0 * t.l3 - 4.0 * t.l2 - 4.0 * t.l4);
  out.J_minus = std::exp(4.0 * t.l4 - 4.0 * t.l3) * -expm1c(4.0 * t.l2 - 4.0 * t.l4);
  if (std::isfinite(std::abs(out.J)) && std::isfinite(std::abs(out.lambda))) {
    cd prod = out.J * out.lambda * (1.0 - out.lambda);
    double res = std::abs(prod - 16.0);
    // residual scale: the identity is checked relative to the larger of |J| and 16
    if (res > 1e-9 * std::max(std::abs(out.J), 16.0)) {
      std::ostringstream os;
      os << "lambda_J consistency residual " << res << " at z = " << z.re << "+" << z.im << "i";
      fail(Err::NonConvergence, os.str());
    }
  }
  return out;
}

ReductionResult reduce_to_fd(const HalfPlanePoint& tau, std::size_t max_letters) {
  ReductionResult r;
  cd z = tau.z();
  for (;;) {
    double j = std::floor((z.real() + 1.0) / 2.0);
    if (j != 0) {
      if (std::abs(j) + double(r.word.size()) > double(max_letters))
        fail(Err::IterationLimit, "reduce_to_fd: word length limit reached");
      z -= 2.0 * j;
      Letter l = j > 0 ? Letter::Tm2 : Letter::T2;
      for (long long c = 0; c < static_cast<long long>(std::abs(j)); ++c) r.word.push_back(l);
    }
    if (std::norm(z) < 1.0) {
      if (r.word.size() + 1 > max_letters)
        fail(Err::IterationLimit, "reduce_to_fd: word length limit reached");
      cd w = -1.0 / z;
      cd h = 0.5 * std::log(w / I);
      if (std::abs(h.imag()) > pi / 4 + 1e-12)
        fail(Err::BranchTracking, "reduce_to_fd: automorphy step left the principal half-plane");
      r.log_j_theta += h;
      r.word.push_back(Letter::S);
      z = w;
      if (!(z.imag() > 0)) fail(Err::IterationLimit, "reduce_to_fd: lost the upper half-plane");
      continue;
    }
    break;
  }
  r.z = HalfPlanePoint(z);
  return r;
}

cd apply_word_inverse(const ReductionResult& r) {
  cd z = r.z.z();
  for (auto it = r.word.rbegin(); it != r.word.rend(); ++it) {
    switch (*it) {
      case Letter::S: z = -1.0 / z; break;
      case Letter::T2: z -= 2.0; break;
      case Letter::Tm2: z += 2.0; break;
    }
  }
  return z;
}

cd log_theta_pow(const HalfPlanePoint& z, int two_k, const QSeriesConfig& cfg) {
  validate(cfg);
  if (two_k < 1) fail(Err::InvalidArgument, "log_theta_pow: 2k must be a positive integer");
  if (z.im >= cfg.min_im_direct) {
    // principal branch is the right one here: theta stays in the right half-plane
    ThetaLogs t = theta_logs(z.z(), cfg);
    return double(two_k) * t.l3;
  }
  ReductionResult r = reduce_to_fd(z);
  ThetaLogs t = theta_logs(r.z.z(), cfg);
  return double(two_k) * (r.log_j_theta + t.l3);
}

cd expm1c(cd w) {
  double a = w.real(), b = w.imag();
  double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

KernelLogs kernel_logs(cd z) {
  static const QSeriesConfig cfg{};
  ThetaLogs t = theta_logs(z, cfg);
  KernelLogs k;
  k.l3 = t.l3;
  k.lJ = std::log(16.0) + 8.0 * t.l3 - 4.0 * t.l2 - 4.0 * t.l4;
  // J_- = (Theta4^4 - Theta2^4) / Theta3^4, kept in log form so it survives the cusps
  k.lJm = 4.0 * t.l4 - 4.0 * t.l3 + std::log(-expm1c(4.0 * t.l2 - 4.0 * t.l4));
  return k;
}

}  // namespace fi::modular
