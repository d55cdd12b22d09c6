#include "spaces.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "quad.hpp"
#include "textio.hpp"

namespace fi::spaces {

namespace {

// barycentric weights of the Gauss-Legendre nodes on [-1, 1]
const std::vector<double>& bary(int p) {
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard<std::mutex> g(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  const auto& x = quad::gauss_legendre(p).x;
  std::vector<double> w(p, 1.0);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k)
      if (k != j) w[j] /= (x[j] - x[k]);
  return cache[p] = w;
}

struct GslQuiet {
  GslQuiet() { gsl_set_error_handler_off(); }
} gsl_quiet;

}  // namespace

GridPtr RadialGrid::from_breaks(std::vector<double> breaks, int p) {
  if (p < 2) fail(Err::InvalidArgument, "grid: need at least 2 nodes per panel");
  if (breaks.size() < 2 || breaks.front() != 0.0)
    fail(Err::InvalidArgument, "grid: breakpoints must start at 0 and contain a panel");
  for (std::size_t i = 1; i < breaks.size(); ++i)
    if (!(breaks[i] > breaks[i - 1])) fail(Err::InvalidArgument, "grid: breakpoints must increase");
  auto g = std::make_shared<RadialGrid>();
  g->p = p;
  g->breaks = std::move(breaks);
  const auto& gl = quad::gauss_legendre(p);
  for (std::size_t i = 0; i + 1 < g->breaks.size(); ++i) {
    double a = g->breaks[i], b = g->breaks[i + 1], h = 0.5 * (b - a);
    for (int j = 0; j < p; ++j) {
      g->r.push_back(a + h * (gl.x[j] + 1.0));
      g->w.push_back(h * gl.w[j]);
    }
  }
  return g;
}

GridPtr RadialGrid::panels(double r_max, double h_max, double osc, int p, double r_floor) {
  if (!(r_max > 0) || !(h_max > 0) || !(osc > 0)) fail(Err::InvalidArgument, "grid: r_max, h_max, osc must be positive");
  std::vector<double> br = {0.0};
  double x = 0;
  while (x < r_max) {
    double rr = std::max(x, r_floor);
    double h = rr > 0 ? std::min(h_max, osc / rr) : h_max;
    // avoid a sliver at the end
    if (x + 1.25 * h >= r_max) h = r_max - x;
    x += h;
    br.push_back(x);
  }
  br.back() = r_max;
  return from_breaks(std::move(br), p);
}

std::size_t RadialGrid::panel_of(double x) const {
  if (!(x >= 0) || x > r_max() * (1 + 1e-14))
    fail(Err::GridCoverage, "radius " + textio::fmt17(x) + " outside the grid [0, " + textio::fmt17(r_max()) + "]");
  auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  std::size_t i = static_cast<std::size_t>(it - breaks.begin());
  if (i == 0) i = 1;
  return std::min(i - 1, panels_count() - 1);
}

void RadialGrid::interp_weights(double x, std::size_t& panel, std::vector<double>& wts) const {
  panel = panel_of(x);
  weights_in_panel(panel, x, wts);
}

void RadialGrid::weights_in_panel(std::size_t panel, double x, std::vector<double>& wts) const {
  double a = breaks[panel], b = breaks[panel + 1];
  double t = (2 * x - a - b) / (b - a);
  const auto& nodes = quad::gauss_legendre(p).x;
  const auto& bw = bary(p);
  wts.assign(p, 0.0);
  for (int j = 0; j < p; ++j)
    if (t == nodes[j]) {
      wts[j] = 1.0;
      return;
    }
  double s = 0;
  for (int j = 0; j < p; ++j) {
    wts[j] = bw[j] / (t - nodes[j]);
    s += wts[j];
  }
  for (auto& v : wts) v /= s;
}

namespace {
cd eval_on(const RadialGrid& g, const std::vector<cd>& v, double r) {
  std::size_t pn;
  std::vector<double> w;
  g.interp_weights(r, pn, w);
  cd s = 0;
  for (int j = 0; j < g.p; ++j) s += w[j] * v[pn * g.p + j];
  return s;
}
}  // namespace

cd RadialFunction::eval(double r) const { return eval_on(*grid, values, r); }

cd RadialFunction::eval_hat(double r) const {
  if (!has_hat()) fail(Err::InvalidArgument, "eval_hat: transform values absent");
  return eval_on(*grid, hat, r);
}

RadialFunction sample(int d, GridPtr g, const std::function<cd(double)>& f, const std::function<cd(double)>& fhat) {
  if (d < 1) fail(Err::InvalidArgument, "dimension must be positive");
  RadialFunction out;
  out.d = d;
  out.grid = g;
  out.values.resize(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) out.values[i] = f(g->r[i]);
  if (fhat) {
    out.hat.resize(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) out.hat[i] = fhat(g->r[i]);
  }
  return out;
}

double lambda_nu(int two_nu, double x) {
  if (two_nu < -1) fail(Err::InvalidArgument, "lambda_nu: order must be >= -1/2");
  const double nu = 0.5 * two_nu;
  x = std::abs(x);
  if (x < 1.0) {
    double t = 1.0 / std::tgamma(nu + 1.0), s = t, q = -0.25 * x * x;
    for (int j = 0; j < 30; ++j) {
      t *= q / ((j + 1) * (nu + j + 1));
      s += t;
      if (std::abs(t) < 1e-18 * std::abs(s)) break;
    }
    return s;
  }
  if (two_nu % 2 == 0) {
    int n = two_nu / 2;
    double j = n == 0 ? gsl_sf_bessel_J0(x) : (n == 1 ? gsl_sf_bessel_J1(x) : gsl_sf_bessel_Jn(n, x));
    return j / std::pow(0.5 * x, n);
  }
  int l = (two_nu - 1) / 2;
  static const double rpi = 1.0 / std::sqrt(pi);
  if (l == -1) return std::cos(x) * rpi;
  if (l == 0) return 2.0 * rpi * std::sin(x) / x;
  // J_{l+1/2}(x) = sqrt(2x/pi) j_l(x)
  return std::sqrt(2 * x / pi) * gsl_sf_bessel_jl(l, x) / std::pow(0.5 * x, nu);
}

double sphere_area(int d) { return 2 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

double tail_estimate(const RadialGrid& g, const std::vector<cd>& v, double q) {
  const std::size_t N = g.size();
  const double R = g.r_max();
  std::vector<double> env(N);
  double m = 0;
  for (std::size_t i = N; i-- > 0;) {
    m = std::max(m, std::abs(v[i]));
    env[i] = m;
  }
  if (env.back() == 0.0) return 0.0;
  // a flat tail at roundoff level is noise, not signal
  const bool noise = env.back() <= 1e-13 * env.front();
  double lo = R - std::max(0.25 * R, std::min(1.0, R));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int c = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (g.r[i] < lo || env[i] <= 0) continue;
    double y = std::log(env[i]);
    sx += g.r[i];
    sy += y;
    sxx += g.r[i] * g.r[i];
    sxy += g.r[i] * y;
    ++c;
  }
  double kappa = 0;
  if (c >= 3) {
    double den = c * sxx - sx * sx;
    if (den > 0) kappa = -(c * sxy - sx * sy) / den;
  }
  double eff = kappa - q / R;
  if (!(eff > 1e-3)) return noise ? env.back() * std::pow(R, q) : INFINITY;
  return env.back() * std::pow(R, q) / eff;
}

std::vector<cd> hankel(int d, const RadialGrid& g, const std::vector<cd>& vals, const std::vector<double>& rho,
                       const FourierConfig& cfg, double* tail) {
  if (d < 1) fail(Err::InvalidArgument, "hankel: dimension must be positive");
  if (vals.size() != g.size()) fail(Err::GridMismatch, "hankel: values do not match the grid");
  double rho_max = 0;
  for (double x : rho) {
    if (!(x >= 0) || !std::isfinite(x)) fail(Err::InvalidArgument, "hankel: output radii must be finite and >= 0");
    rho_max = std::max(rho_max, x);
  }
  const double S = sphere_area(d);
  double t = S * tail_estimate(g, vals, d - 1.0);
  if (tail) *tail = t;
  if (t > cfg.tail_tol) {
    std::ostringstream os;
    os << "hankel: estimated tail beyond r = " << g.r_max() << " is " << t;
    fail(Err::TailNotNegligible, os.str());
  }
  // oscillation-aware refinement: sub-panels with omega * length <= max_phase,
  // f carried over by its panel interpolant
  const double omega = 2 * pi * rho_max;
  const int p = g.p;
  const auto& gl = quad::gauss_legendre(p);
  std::vector<double> xs;
  std::vector<cd> fw;
  std::vector<double> wts;
  for (std::size_t pn = 0; pn < g.panels_count(); ++pn) {
    double a = g.breaks[pn], b = g.breaks[pn + 1];
    int nsub = std::max(1, static_cast<int>(std::ceil(omega * (b - a) / cfg.max_phase)));
    double L = (b - a) / nsub;
    for (int s = 0; s < nsub; ++s) {
      double sa = a + s * L, h = 0.5 * L;
      for (int j = 0; j < p; ++j) {
        double x = sa + h * (gl.x[j] + 1.0);
        g.weights_in_panel(pn, x, wts);
        cd fx = 0;
        for (int i = 0; i < p; ++i) fx += wts[i] * vals[pn * p + i];
        xs.push_back(x);
        fw.push_back(fx * (h * gl.w[j]) * std::pow(x, d - 1));
      }
    }
  }
  if (static_cast<double>(xs.size()) * rho.size() > static_cast<double>(cfg.max_nodes))
    fail(Err::OscillationBudget, "hankel: " + std::to_string(xs.size()) + " nodes x " + std::to_string(rho.size()) +
                                     " outputs exceeds the kernel evaluation budget");
  const double pref = 2 * std::pow(pi, 0.5 * d);
  const int two_nu = d - 2;
  std::vector<cd> out(rho.size());
  parallel_for(rho.size(), [&](std::size_t i) {
    double w = 2 * pi * rho[i];
    cd s = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) s += fw[j] * lambda_nu(two_nu, w * xs[j]);
    out[i] = pref * s;
  });
  return out;
}

RadialFunction radial_fourier(const RadialFunction& f, const FourierConfig& cfg) {
  RadialFunction out;
  out.d = f.d;
  out.grid = f.grid;
  out.provenance = f.provenance;
  out.values = hankel(f.d, *f.grid, f.values, f.grid->r, cfg);
  out.hat = f.values;
  return out;
}

void validate(const VsParams& p) {
  if (!(p.s >= 1)) fail(Err::InvalidArgument, "V^s: s must be >= 1");
  if (p.d < 1) fail(Err::InvalidArgument, "V^s: d must be positive");
}

NormResult weighted_l1(int d, const RadialGrid& g, const std::vector<cd>& v, double s) {
  if (v.size() != g.size()) fail(Err::GridMismatch, "weighted_l1: values do not match the grid");
  const double S = sphere_area(d);
  double acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    acc += g.w[i] * std::pow(g.r[i], d - 1) * (1 + std::pow(g.r[i], s)) * std::abs(v[i]);
  NormResult r;
  r.value = S * acc;
  double t = tail_estimate(g, v, d - 1 + s);
  r.tail = S * 2 * t;
  return r;
}

NormResult vs_norm_detail(const RadialFunction& f, const VsParams& p, const FourierConfig& cfg) {
  validate(p);
  if (p.d != f.d) fail(Err::InvalidArgument, "vs_norm: dimension mismatch");
  std::vector<cd> hat = f.has_hat() ? f.hat : hankel(f.d, *f.grid, f.values, f.grid->r, cfg);
  NormResult a = weighted_l1(f.d, *f.grid, f.values, p.s), b = weighted_l1(f.d, *f.grid, hat, p.s);
  NormResult r{a.value + b.value, a.tail + b.tail};
  if (r.tail > std::max(cfg.tail_tol, 1e-6 * r.value)) {
    std::ostringstream os;
    os << "vs_norm: tail estimate " << r.tail << " against norm " << r.value;
    fail(Err::TailNotNegligible, os.str());
  }
  return r;
}

double vs_norm(const RadialFunction& f, const VsParams& p, const FourierConfig& cfg) {
  return vs_norm_detail(f, p, cfg).value;
}

namespace {

// polynomial decay exponent of the right envelope over the last decade of radii;
// returns +inf when the envelope sinks below the noise floor inside the grid
double decay_exponent(const RadialGrid& g, const std::vector<cd>& v, bool& super) {
  const std::size_t N = g.size();
  std::vector<double> env(N);
  double m = 0, peak = 0;
  for (std::size_t i = N; i-- > 0;) {
    m = std::max(m, std::abs(v[i]));
    env[i] = m;
    peak = std::max(peak, std::abs(v[i]));
  }
  if (peak == 0) fail(Err::InvalidArgument, "decay_check: function is zero");
  const double floor = 1e-13 * peak;
  super = env.back() <= floor;
  if (super) return INFINITY;
  const double R = g.r_max(), lo = R / 10;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int c = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (g.r[i] < lo || g.r[i] <= 0) continue;
    double x = std::log(g.r[i]), y = std::log(env[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++c;
  }
  if (c < 5) fail(Err::GridTooShort, "decay_check: fewer than 5 samples in the last decade");
  double den = c * sxx - sx * sx;
  if (!(den > 0)) fail(Err::GridTooShort, "decay_check: degenerate tail fit");
  return -(c * sxy - sx * sy) / den;
}

}  // namespace

DecayReport decay_check(const RadialFunction& f, const VsParams& p, const FourierConfig& cfg) {
  validate(p);
  DecayReport r;
  r.required = p.s / (p.d + 1.0);
  std::vector<cd> hat = f.has_hat() ? f.hat : hankel(f.d, *f.grid, f.values, f.grid->r, cfg);
  r.exponent_f = decay_exponent(*f.grid, f.values, r.super_f);
  r.exponent_hat = decay_exponent(*f.grid, hat, r.super_hat);
  r.pass = r.exponent_f >= r.required - 0.1 && r.exponent_hat >= r.required - 0.1;
  return r;
}

namespace {
const char* prov_name(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Table: return "table";
    case Provenance::Reconstructed: return "reconstructed";
  }
  return "analytic";
}
}  // namespace

void write_radial(const std::string& path, const RadialFunction& f) {
  std::ofstream out(path);
  if (!out) fail(Err::Io, "cannot write '" + path + "'");
  out << "# d=" << f.d << " kind=radial-function provenance=" << prov_name(f.provenance) << " p=" << f.grid->p
      << " hat=" << (f.has_hat() ? 1 : 0) << "\n# breaks=";
  for (std::size_t i = 0; i < f.grid->breaks.size(); ++i) out << (i ? "," : "") << textio::fmt17(f.grid->breaks[i]);
  out << "\n# columns: r, re f, im f" << (f.has_hat() ? ", re fhat, im fhat" : "") << "\n";
  for (std::size_t i = 0; i < f.grid->size(); ++i) {
    out << textio::fmt17(f.grid->r[i]) << ", " << textio::fmt17(f.values[i].real()) << ", "
        << textio::fmt17(f.values[i].imag());
    if (f.has_hat()) out << ", " << textio::fmt17(f.hat[i].real()) << ", " << textio::fmt17(f.hat[i].imag());
    out << "\n";
  }
  if (!out) fail(Err::Io, "write failed for '" + path + "'");
}

RadialFunction read_radial(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open '" + path + "'");
  std::map<std::string, std::string> hdr;
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::string s = textio::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      textio::parse_header_pairs(s.substr(1), hdr);
      continue;
    }
    rows.push_back(textio::split_nums(s));
  }
  if (!hdr.count("d") || hdr["kind"] != "radial-function" || !hdr.count("breaks"))
    fail(Err::Parse, path + ": not a radial-function file");
  RadialFunction f;
  f.d = std::stoi(hdr["d"]);
  int p = hdr.count("p") ? std::stoi(hdr["p"]) : 16;
  f.grid = RadialGrid::from_breaks(textio::split_nums(hdr["breaks"]), p);
  std::string pv = hdr["provenance"];
  f.provenance = pv == "table" ? Provenance::Table : (pv == "reconstructed" ? Provenance::Reconstructed : Provenance::Analytic);
  bool hat = hdr.count("hat") && hdr["hat"] == "1";
  if (rows.size() != f.grid->size()) fail(Err::Parse, path + ": row count does not match the panel grid");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != (hat ? 5u : 3u)) fail(Err::Parse, path + ": wrong number of columns");
    if (std::abs(r[0] - f.grid->r[i]) > 1e-12 * (1 + r[0])) fail(Err::Parse, path + ": radii do not match the panel grid");
    f.values.emplace_back(r[1], r[2]);
    if (hat) f.hat.emplace_back(r[3], r[4]);
  }
  return f;
}

}  // namespace fi::spaces
