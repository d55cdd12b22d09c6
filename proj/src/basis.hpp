#pragma once
#include <string>
#include <vector>

#include "common.hpp"
#include "modular.hpp"

namespace fi::basis {

struct NuMu {
  HalfInt k;
  int nu_minus = 0, nu_plus = 0;
  double mu_minus = 0, mu_plus = 0;
};
NuMu nu_mu(HalfInt k);
// index where the expansion of F^eps starts
int nu_of(HalfInt k, int eps);

// modular kernel; throws PoleProximity when J(z) and J(tau) agree to 1e-12
cd kernel_K(HalfInt k, int eps, const modular::HalfPlanePoint& tau, const modular::HalfPlanePoint& z);
cd kernel_from_logs(HalfInt k, int eps, const modular::KernelLogs& t, const modular::KernelLogs& z);

struct QuadConfig {
  double rel_tol = 1e-14;
  double abs_tol = 1e-300;
  int max_intervals = 8000;
  double standoff = 1e-4;  // minimum distance (contour coordinates) from tau to the contour
  double target = 1e-9;    // AccuracyNotReached above this absolute error estimate
};

struct QuadInfo {
  double err = 0;
  int intervals = 0;
  long evals = 0;
  bool converged = true;
  std::string rep;
};

// F^eps_k(tau, r) for tau in the closure of D, vector over r
std::vector<cd> F_semicircle(HalfInt k, int eps, cd tau, const std::vector<double>& r,
                             const QuadConfig& q = {}, QuadInfo* info = nullptr);
std::vector<cd> F_shifted(HalfInt k, int eps, cd tau, const std::vector<double>& r, double y,
                          const QuadConfig& q = {}, QuadInfo* info = nullptr);
// sigma below the unit semicircle: the semicircle integral continued across the contour
std::vector<cd> F_continued(HalfInt k, int eps, cd sigma, const std::vector<double>& r,
                            const QuadConfig& q = {}, QuadInfo* info = nullptr);
// any tau in H: Gamma_theta reduction with the cocycle, then the better-conditioned contour
std::vector<cd> F_any(HalfInt k, int eps, cd tau, const std::vector<double>& r,
                      const QuadConfig& q = {}, QuadInfo* info = nullptr);

// distances used to pick the representation, measured in cusp coordinates near +-1
struct ContourDistances {
  double to_circle, to_lines;
};
ContourDistances contour_distances(cd tau);

// single-radius wrappers
cd F_eval(HalfInt k, int eps, const modular::HalfPlanePoint& tau, double r, const QuadConfig& q = {},
          QuadInfo* info = nullptr);
cd F_eval_shifted(HalfInt k, int eps, const modular::HalfPlanePoint& tau, double r, double y,
                  const QuadConfig& q = {}, QuadInfo* info = nullptr);

struct HeightPolicy {
  enum class Kind { Auto, Fixed } kind = Kind::Auto;
  double y = 0.5;      // used when Fixed
  int oversample = 16;  // samples per coefficient index; Auto doubles it up to kMaxOversample on aliasing
};
constexpr int kMaxOversample = 128;

struct Block {
  int n_lo = 0, n_hi = 0;
  double y = 0;
  int M = 0;
};

struct TableMeta {
  std::vector<Block> blocks;
  double max_imag = 0;
  double max_quad_err = 0;
  double alias_ratio = 0;
  long F_evals = 0;
  double rel_tol = 0;
  int oversample = 0;
  std::string policy;
};

enum class TableKind { B, A, ATilde };

struct BasisTable {
  HalfInt k;
  int sign = 1;  // label of b; ignored for A/ATilde
  TableKind kind = TableKind::B;
  int n_max = 0;
  std::vector<double> r;
  std::vector<std::vector<double>> values;  // [n][ri]
  std::vector<std::vector<double>> imag;    // discarded imaginary parts (B only)
  TableMeta meta;
  double y_header() const;
};

BasisTable coefficients(HalfInt k, int sign, const std::vector<double>& r, int n_max,
                        const HeightPolicy& h = {}, const QuadConfig& q = {});

struct APair {
  BasisTable a, atilde;
};
APair assemble_a(const BasisTable& plus, const BasisTable& minus);

std::vector<double> default_r_grid(int points = 400, double rmax = 8.0);

struct BoundRow {
  int n = 0;
  double sup_measured = 0;  // sup_r (1 + r^beta)|b|, both signs
  double shape = 0;         // (1+n)^{beta/2+k+1} Gamma(beta/2-k+1) gt(beta)
  double rate = 0;          // fitted c in |b| <= C (n+1)^{k+1} exp(-c r / sqrt(n+1))
  bool dominated = true;
};
struct BoundReport {
  HalfInt k;
  double beta = 0;
  double g_tilde = 0;
  double fitted_constant = 0;
  int calibration_n = 0;
  std::vector<BoundRow> rows;
  double min_rate = 0;
  bool all_dominated = true;
};
double g_tilde(double beta);
double bound_shape(HalfInt k, double beta, int n);
BoundReport bound_report(HalfInt k, double beta, const BasisTable& plus, const BasisTable& minus);

void write_table(const std::string& path, const BasisTable& t);
BasisTable read_table(const std::string& path);

}  // namespace fi::basis
