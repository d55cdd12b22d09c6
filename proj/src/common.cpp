#include "common.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace fi {

const char* err_name(Err e) {
  switch (e) {
    case Err::Ok: return "Ok";
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::NonConvergence: return "NonConvergence";
    case Err::BranchTracking: return "BranchTrackingFailure";
    case Err::IterationLimit: return "IterationLimit";
    case Err::PoleProximity: return "PoleProximity";
    case Err::AccuracyNotReached: return "AccuracyNotReached";
    case Err::AliasingSuspected: return "AliasingSuspected";
    case Err::GridMismatch: return "GridMismatch";
    case Err::GridTooShort: return "GridTooShort";
    case Err::TailNotNegligible: return "TailNotNegligible";
    case Err::OscillationBudget: return "OscillationBudgetExceeded";
    case Err::TableRange: return "TableRangeExceeded";
    case Err::GridCoverage: return "GridCoverage";
    case Err::NotContracting: return "NotContracting";
    case Err::Stagnation: return "Stagnation";
    case Err::QuadratureDegree: return "QuadratureDegreeInsufficient";
    case Err::TruncationBudget: return "TruncationBudget";
    case Err::ParityViolation: return "ParityViolation";
    case Err::TotalIntegralNonzero: return "TotalIntegralNonzero";
    case Err::BudgetExceeded: return "BudgetExceeded";
    case Err::Io: return "IoError";
    case Err::Parse: return "ParseError";
  }
  return "Unknown";
}

HalfInt HalfInt::parse(const std::string& s) {
  std::string t = s;
  double v = 0;
  auto slash = t.find('/');
  try {
    if (slash != std::string::npos) {
      double a = std::stod(t.substr(0, slash));
      double b = std::stod(t.substr(slash + 1));
      v = a / b;
    } else {
      std::size_t pos = 0;
      v = std::stod(t, &pos);
      if (pos != t.size()) fail(Err::InvalidArgument, "k: trailing characters in '" + s + "'");
    }
  } catch (const std::invalid_argument&) {
    fail(Err::InvalidArgument, "k: not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(Err::InvalidArgument, "k: out of range: '" + s + "'");
  }
  double tk = 2.0 * v;
  if (!(tk >= 1.0) || std::abs(tk - std::round(tk)) > 1e-12 || tk > 1e6)
    fail(Err::InvalidArgument, "k must be a positive half-integer, got '" + s + "'");
  return HalfInt{static_cast<int>(std::lround(tk))};
}

std::string HalfInt::str() const {
  if (two_k % 2 == 0) return std::to_string(two_k / 2);
  return std::to_string(two_k) + "/2";
}

int thread_cap() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* e = std::getenv("FOURIER_INTERP_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(e, &end, 10);
    if (end != e && v >= 1) return static_cast<int>(std::min<long>(v, 256));
  }
  return hw;
}

}  // namespace fi
