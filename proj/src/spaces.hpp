#pragma once
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"

namespace fi::spaces {

// Composite Gauss-Legendre grid: p nodes on each panel [breaks[i], breaks[i+1]].
// Values on it are polynomial on each panel, so interpolation and quadrature are spectral.
struct RadialGrid {
  int p = 16;
  std::vector<double> breaks;
  std::vector<double> r, w;  // nodes and plain quadrature weights (no r^{d-1})

  // panel width min(h_max, osc / max(r, r_floor)): the second bound resolves sin(pi r^2)-type
  // oscillation; r_floor ~ sqrt(n_max) covers basis functions up to index n_max near the origin
  static std::shared_ptr<const RadialGrid> panels(double r_max, double h_max = 0.5, double osc = 1.0, int p = 16,
                                                  double r_floor = 0.0);
  static std::shared_ptr<const RadialGrid> from_breaks(std::vector<double> breaks, int p = 16);
  std::size_t size() const { return r.size(); }
  std::size_t panels_count() const { return breaks.size() - 1; }
  double r_max() const { return breaks.back(); }
  // panel containing x (clamped); throws GridCoverage outside [0, r_max]
  std::size_t panel_of(double x) const;
  // interpolation weights for value at x from the p nodes of its panel
  void interp_weights(double x, std::size_t& panel, std::vector<double>& wts) const;
  void weights_in_panel(std::size_t panel, double x, std::vector<double>& wts) const;
};
using GridPtr = std::shared_ptr<const RadialGrid>;

enum class Provenance { Analytic, Table, Reconstructed };

struct RadialFunction {
  int d = 1;
  GridPtr grid;
  std::vector<cd> values;
  std::vector<cd> hat;  // empty when absent
  Provenance provenance = Provenance::Analytic;

  bool has_hat() const { return !hat.empty(); }
  cd eval(double r) const;
  cd eval_hat(double r) const;
};

RadialFunction sample(int d, GridPtr g, const std::function<cd(double)>& f,
                      const std::function<cd(double)>& fhat = {});

// J_nu(x) / (x/2)^nu for nu = two_nu / 2 >= -1/2
double lambda_nu(int two_nu, double x);
double sphere_area(int d);

struct FourierConfig {
  double abs_tol = 1e-9;       // target per output sample
  double tail_tol = 1e-9;      // TailNotNegligible above this
  double max_phase = 8.0;      // omega * (sub-panel length)
  long max_nodes = 20000000;   // OscillationBudget above this many kernel evaluations
};

// radial d-dimensional Fourier transform of grid data at arbitrary radii
std::vector<cd> hankel(int d, const RadialGrid& g, const std::vector<cd>& vals, const std::vector<double>& rho,
                       const FourierConfig& cfg = {}, double* tail = nullptr);
RadialFunction radial_fourier(const RadialFunction& f, const FourierConfig& cfg = {});

// estimated integral of |v| r^q beyond the grid, from an exponential fit of the last panels
double tail_estimate(const RadialGrid& g, const std::vector<cd>& v, double q);

struct VsParams {
  double s = 1;
  int d = 1;
};
void validate(const VsParams& p);

struct NormResult {
  double value = 0;
  double tail = 0;  // estimated contribution beyond the grid, not included in value
};
// L1(m_s) norm of a radial function in polar form
NormResult weighted_l1(int d, const RadialGrid& g, const std::vector<cd>& v, double s);
NormResult vs_norm_detail(const RadialFunction& f, const VsParams& p, const FourierConfig& cfg = {});
double vs_norm(const RadialFunction& f, const VsParams& p, const FourierConfig& cfg = {});

struct DecayReport {
  double required = 0;      // s/(d+1)
  double exponent_f = 0;    // measured; +inf when the tail falls below the noise floor
  double exponent_hat = 0;
  bool super_f = false, super_hat = false;
  bool pass = false;
};
DecayReport decay_check(const RadialFunction& f, const VsParams& p, const FourierConfig& cfg = {});

void write_radial(const std::string& path, const RadialFunction& f);
RadialFunction read_radial(const std::string& path);

}  // namespace fi::spaces
