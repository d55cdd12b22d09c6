#pragma once
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fi {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cd I{0.0, 1.0};

// numeric values are shared with the C API status codes
enum class Err : int {
  Ok = 0,
  InvalidArgument = 1,
  NonConvergence = 2,
  BranchTracking = 3,
  IterationLimit = 4,
  PoleProximity = 5,
  AccuracyNotReached = 6,
  AliasingSuspected = 7,
  GridMismatch = 8,
  GridTooShort = 9,
  TailNotNegligible = 10,
  OscillationBudget = 11,
  TableRange = 12,
  GridCoverage = 13,
  NotContracting = 14,
  Stagnation = 15,
  QuadratureDegree = 16,
  TruncationBudget = 17,
  ParityViolation = 18,
  TotalIntegralNonzero = 19,
  BudgetExceeded = 20,
  Io = 21,
  Parse = 22,
};

const char* err_name(Err e);

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw Error(c, msg); }

// k is always a positive half-integer; keep it exact as 2k
struct HalfInt {
  int two_k = 1;
  double value() const { return 0.5 * two_k; }
  static HalfInt parse(const std::string& s);
  std::string str() const;
};

// worker count from FOURIER_INTERP_THREADS, else hardware concurrency
int thread_cap();

// run body(i) for i in [0,n); each index owns its output slot so the result
// does not depend on scheduling
template <class F>
void parallel_for(std::size_t n, F&& body);

}  // namespace fi

#include "parallel.hpp"
