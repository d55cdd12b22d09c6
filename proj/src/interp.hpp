#pragma once
#include <functional>
#include <string>
#include <vector>

#include "basis.hpp"
#include "spaces.hpp"

namespace fi::interp {

struct PerturbationProfile {
  int d = 0;
  double s = 1, eta = 0.5, delta = 0;
  std::vector<double> eps, eps_hat;  // index n; missing entries are zero
  double e(std::size_t n) const { return n < eps.size() ? eps[n] : 0.0; }
  double eh(std::size_t n) const { return n < eps_hat.size() ? eps_hat[n] : 0.0; }
};
// shape bound delta (1+n)^{-d-s/2-2-eta} and real perturbed radii
void validate(const PerturbationProfile& p, int d);
double profile_shape(const PerturbationProfile& p, int d, std::size_t n);
// deterministic pseudo-random profile filling a fraction in [1/2, 1] of the shape bound
PerturbationProfile shaped_profile(int d, double s, double eta, double delta, std::size_t len, unsigned seed = 1);
PerturbationProfile read_profile(const std::string& path);
void write_profile(const std::string& path, const PerturbationProfile& p);

struct NodeData {
  int d = 0;
  int n_max = 0;
  std::vector<double> f_vals, fhat_vals;  // entry 0 is the value at radius |eps_0|
};
void validate(const NodeData& data);
NodeData read_node_data(const std::string& path);
void write_node_data(const std::string& path, const NodeData& data);
// samples of an analytic radial pair at the (possibly perturbed) nodes
NodeData node_data_from(int d, int n_max, const PerturbationProfile& p, const std::function<double(double)>& f,
                        const std::function<double(double)>& fhat);

// a_{d/2,n} and atilde_{d/2,n} on a panel grid; for k = d/2 the transform of a is atilde and vice versa
struct InterpTables {
  int d = 0;
  int n_max = 0;
  spaces::GridPtr grid;
  std::vector<std::vector<double>> a, at;  // [n][grid index]
  basis::TableMeta meta_plus, meta_minus;

  static InterpTables build(int d, int n_max, spaces::GridPtr grid, const basis::HeightPolicy& h = {},
                            const basis::QuadConfig& q = {});
  static InterpTables from_pair(int d, const basis::APair& ap, spaces::GridPtr grid);
  double a_at(int n, double r) const;
  double at_at(int n, double r) const;
  // ||a_n||_{V^s} (= ||atilde_n||_{V^s}) on the grid
  std::vector<double> vs_norms(double s) const;
};

// a function x = sum c_n a_n + ch_n atilde_n
struct Coeffs {
  std::vector<double> c, ch;
};
spaces::RadialFunction synthesize(const InterpTables& t, const Coeffs& x);
double coeff_vs_norm(const InterpTables& t, const Coeffs& x, double s);

struct InterpResult {
  spaces::RadialFunction f;
  double tail = 0;  // truncation estimate for n > n_max
};
InterpResult interpolate(const NodeData& data, const InterpTables& t);

// T on grid functions: samples by panel interpolation at the perturbed radii
spaces::RadialFunction apply_T(const spaces::RadialFunction& f, const PerturbationProfile& p, const InterpTables& t);
// the same operator on coefficient vectors
Coeffs apply_T(const Coeffs& x, const PerturbationProfile& p, const InterpTables& t);

struct BudgetReport {
  double value = 0;     // measured norms up to n_max plus tail
  double tail = 0;      // n > n_max from the fitted (1+n)^{d+s/2+3/2} shape
  double fitted_C = 0;
  std::vector<double> norms;
};
BudgetReport budget(const PerturbationProfile& p, const InterpTables& t, const spaces::VsParams& vp);
// largest delta with budget <= target for the profile family p(delta), by bisection
double delta_star(const std::vector<double>& unit_eps, const std::vector<double>& unit_eps_hat,
                  const PerturbationProfile& base, const InterpTables& t, const spaces::VsParams& vp,
                  double target = 0.5);

struct IterLog {
  int j = 0;
  double diff = 0;   // ||x_j - x_{j-1}||_{V^s}
  double ratio = 0;  // diff_j / diff_{j-1}; 0 for j < 2
};
struct ReconstructResult {
  Coeffs x;
  spaces::RadialFunction f;
  std::vector<IterLog> log;
  double budget = 0;
  bool converged = false;
};
ReconstructResult reconstruct(const NodeData& data, const PerturbationProfile& p, const InterpTables& t,
                              int j_max = 60, double tol = 1e-12);
ReconstructResult basis_h(const InterpTables& t, const PerturbationProfile& p, int n, bool tilde, int j_max = 60,
                          double tol = 1e-12);

}  // namespace fi::interp
