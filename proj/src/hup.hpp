#pragma once
#include <functional>
#include <string>
#include <vector>

#include "interp.hpp"

namespace fi::hup {

// Gauss-Legendre panels on [-L, L]; symmetric, so node i mirrors node size-1-i
struct LineGrid {
  double L = 12;
  int panels = 256, p = 16;
  std::vector<double> t, w;
  static LineGrid make(double L = 12, int panels = 256, int p = 16);
  double h() const { return 2 * L / panels; }
};

struct OddProfile {
  LineGrid grid;
  std::vector<double> f;
  double s0 = 0;  // declared regularity, informational
  static OddProfile sample(const std::function<double(double)>& f, const LineGrid& g = LineGrid::make());
};
// t e^{-pi t^2} (A + B t^2) with A chosen on the grid so that the integral of g vanishes
OddProfile synthetic_profile(double B = 1.0, const LineGrid& g = LineGrid::make());
OddProfile read_odd_profile(const std::string& path);
void write_odd_profile(const std::string& path, const OddProfile& p);

// piecewise Legendre series on the uniform panels of a LineGrid; zero outside [-L, L]
struct PanelPoly {
  double L = 12, h = 0;
  int panels = 0, deg = 0;
  std::vector<double> c;  // [panel * (deg+1) + k]
  double eval(double x) const;
};

struct GResult {
  PanelPoly g;
  double parity = 0;  // max |f(t) + f(-t)| relative to max |f|, before symmetrization
};
GResult g_from_f(const OddProfile& p);

struct Antiderivative {
  PanelPoly G;
  double total = 0;        // integral of g
  double discrepancy = 0;  // left and right cumulative routes
  double edge = 0;         // |g| at +-L, a proxy for the neglected tails
};
Antiderivative antiderivative_G(const PanelPoly& g, double tol = 1e-8);

// everything derived from one profile, built once
struct Pipeline {
  PanelPoly g, G;
  GResult gres;
  Antiderivative anti;
  std::vector<double> G_uniform;  // G on a fine uniform grid for the 1-D transform route
  double hu = 0;
};
Pipeline build_pipeline(const OddProfile& p, double tol = 1e-8);

cd phi_eval(const Pipeline& P, double r, double* agreement = nullptr);
cd phi_F1_route(const Pipeline& P, double r);   // 1-D transform of G at -r^2/2
cd phi_by_parts(const Pipeline& P, double r);   // (i/(pi r^2)) int g e^{pi i tau r^2}
cd phi_hat_eval(const Pipeline& P, double rho);
cd phi_hat_by_parts(const Pipeline& P, double rho);

enum class Axis { X, Y };
cd mu_hat_axis(const Pipeline& P, Axis axis, double value);

struct HyperbolaCrossData {
  interp::PerturbationProfile profile;  // d = 4, s = 1, eta = 1/2, no origin perturbation
  std::vector<cd> mu_x, mu_y;           // index n = 0..n_max
  int n_max() const { return static_cast<int>(mu_x.size()) - 1; }
};
void validate(const HyperbolaCrossData& d);
// deterministic d = 4 profile filling between half and all of the delta n^{-7} envelope
interp::PerturbationProfile shaped_cross_profile(double delta, int n_max, unsigned seed = 4);
HyperbolaCrossData cross_data_from(const Pipeline& P, const interp::PerturbationProfile& p, int n_max);
HyperbolaCrossData read_cross_data(const std::string& path);
void write_cross_data(const std::string& path, const HyperbolaCrossData& d);

enum class Verdict { Zero, Reconstructed, Inconsistent };
const char* verdict_name(Verdict v);

struct HupReport {
  Verdict verdict = Verdict::Zero;
  double budget = 0;
  double data_norm = 0;        // max |mu|
  double phi_direct_norm = 0;  // sup over r <= r_check
  double phi_rec_norm = 0;
  double discrepancy = 0;      // sup |Phi_rec - Phi_direct| over r <= r_check
  double parity = 0, total_integral = 0, route_agreement = 0;
  std::vector<interp::IterLog> log_re, log_im;
  spaces::RadialFunction phi_rec;
};
HupReport hup_check(const HyperbolaCrossData& data, const OddProfile& f, const interp::InterpTables& t,
                    double tol = 1e-8, double r_check = 3.0);

}  // namespace fi::hup
