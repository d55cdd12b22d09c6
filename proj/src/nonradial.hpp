#pragma once
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "interp.hpp"
#include "spaces.hpp"

namespace fi::nonradial {

using Point = std::array<double, 3>;  // d = 2 uses the first two entries
using PointFn = std::function<cd(const Point&)>;

// C_m^lam(t); lam = 0 returns the Chebyshev limit (2/m) T_m(t) for m >= 1
double gegenbauer(int m, double lam, double t);
long dim_harmonic(int d, int m);
// solid zonal harmonic |x|^m dim C_m(<x/|x|, zeta>) / C_m(1)
double zonal_Z(int d, int m, const Point& x, const Point& zeta);

// real harmonics orthonormal for the probability measure; flat index h runs over (m, j), m <= M
int harmonic_count(int d, int M);
int degree_of(int d, int h);
void harmonics(int d, int M, const Point& omega, double* out);

struct SphereRule {
  int d = 3;
  int degree = 0;  // exact for harmonics up to this total degree
  std::vector<Point> nodes;
  std::vector<double> w;  // sums to 1
  static SphereRule make(int d, int degree);
};

// radial tables for k = d/2 + m, m = 0..M_max, on one panel grid
struct SphereTables {
  int d = 3, M_max = 0, N_max = 0;
  spaces::GridPtr grid;
  std::vector<interp::InterpTables> per_m;
  static SphereTables build(int d, int M_max, int N_max, spaces::GridPtr grid, const basis::HeightPolicy& h = {},
                            const basis::QuadConfig& q = {});
};

// f = sum_h g_h(|x|) Y_h(x/|x|); comp[h].values = g_h, comp[h].hat = profile of f^ in the same harmonic
struct HarmonicExpansion {
  int d = 3, M_max = 0;
  std::vector<spaces::RadialFunction> comp;  // [h]
  cd eval(const Point& x) const;
  cd eval_hat(const Point& xi) const;
};
// projection of point values onto the harmonics, radius by radius on the grid nodes
HarmonicExpansion project(int d, int M_max, spaces::GridPtr grid, const PointFn& f, const PointFn& fhat,
                          const SphereRule& rule);

std::pair<cd, cd> kernel_Kn(int d, int n, const Point& x, const Point& zeta, const SphereTables& t,
                            bool allow_truncation = false);

struct SeriesValue {
  cd value = 0;
  double tail = 0;  // largest term magnitude in the last n shell
};
SeriesValue double_series_eval(const PointFn& f, const PointFn& fhat, const Point& x, const SphereTables& t,
                               const SphereRule& rule, int M_max, int N_max, double trunc_tol = 1e-6);

struct SpherePerturbation {
  int d = 3;
  double delta = 0, c5 = 0;
  std::vector<std::vector<double>> eps, eps_hat;  // [n][harmonic coefficient], degree <= 4
  Point eps0{0, 0, 0}, eps0_hat{0, 0, 0};
  std::vector<double> sigma;  // filled by refresh_sigma
  double radius(int n, const Point& zeta, bool hat) const;
  void refresh_sigma();
};
constexpr int kPerturbationDegree = 4;
double sphere_shape(const SpherePerturbation& p, int n);
void validate(const SpherePerturbation& p);
SpherePerturbation shaped_sphere_perturbation(int d, double delta, double c5, int N, unsigned seed = 1);
SpherePerturbation read_sphere_perturbation(const std::string& path);
void write_sphere_perturbation(const std::string& path, const SpherePerturbation& p);

// coefficients [h][n] of the double series: x = sum c a + ch atilde per component
struct SphereCoeffs {
  std::vector<std::vector<cd>> c, ch;
};
HarmonicExpansion synthesize(const SphereTables& t, const SphereCoeffs& x);
// discretized V^1 norm: radial grid nodes times the sphere rule, for f and f^
double surrogate_v1(const HarmonicExpansion& e, const SphereRule& rule);
double surrogate_v1(const SphereTables& t, const SphereCoeffs& x, const SphereRule& rule);

// perturbed-sphere samples of f, f^ turned into series coefficients
SphereCoeffs sample_coeffs(const PointFn& f, const PointFn& fhat, const SpherePerturbation& p, const SphereTables& t,
                           const SphereRule& rule);
HarmonicExpansion apply_T_sphere(const HarmonicExpansion& f, const SpherePerturbation& p, const SphereTables& t,
                                 const SphereRule& rule);

struct SphereBudget {
  double measured = 0, analytic = 0;
  double fitted_C = 0;
  double norm_a0 = 0;
  std::vector<double> kernel_norms;  // sup_zeta ||K_n||_{V^1}, n = 0..N (0 unused)
};
std::vector<double> kernel_norms(const SphereTables& t, int zonal_nodes = 64);
SphereBudget budget_sphere(const SpherePerturbation& p, const SphereTables& t);

struct HarnessReport {
  double budget = 0;
  std::vector<interp::IterLog> log;
  bool converged = false;
  double error = 0;        // sup over r <= r_check, sphere nodes, against the target
  double zero_norm = 0;    // surrogate norm of the reconstruction from all-zero data
  SphereCoeffs x;
};
HarnessReport uniqueness_harness(const PointFn& f, const PointFn& fhat, const SpherePerturbation& p,
                                 const SphereTables& t, const SphereRule& rule, int j_max = 60, double tol = 1e-12,
                                 double r_check = 3.0);

}  // namespace fi::nonradial
