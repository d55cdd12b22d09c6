#include "hup.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "textio.hpp"

namespace fi::hup {

namespace {

struct GL {
  std::vector<double> x, w;
  explicit GL(int n) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &x[i], &w[i], t);
    gsl_integration_glfixed_table_free(t);
  }
};
const GL& gl20() {
  static const GL g(20);
  return g;
}

// P_0..P_n at x
void legendre(int n, double x, double* P) {
  P[0] = 1.0;
  if (n >= 1) P[1] = x;
  for (int k = 1; k < n; ++k) P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1);
}

// sum of fn over [a,b] split into m equal sub-panels, 20-point Gauss each
template <class F>
cd integrate(F&& fn, double a, double b, long m) {
  const auto& g = gl20();
  double w = (b - a) / m;
  cd s = 0;
  for (long j = 0; j < m; ++j) {
    double c = a + (j + 0.5) * w;
    cd part = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) part += g.w[i] * fn(c + 0.5 * w * g.x[i]);
    s += 0.5 * w * part;
  }
  return s;
}

constexpr long kMaxSubpanels = 20000000 / 20;

void budget_check(long m, const char* what) {
  if (m > kMaxSubpanels) fail(Err::AccuracyNotReached, std::string(what) + ": oscillation exceeds the quadrature budget");
}

// int_{-L}^{L} s(tau) e^{i w tau} d tau on the panels of s, subdivided for the phase
cd line_osc(const PanelPoly& s, double omega) {
  long per = std::max(1L, static_cast<long>(std::ceil(std::abs(omega) * s.h / 3.0)));
  budget_check(per * s.panels, "line integral");
  cd tot = 0;
  for (int j = 0; j < s.panels; ++j) {
    double a = -s.L + j * s.h;
    tot += integrate([&](double x) { return s.eval(x) * std::exp(cd(0, omega * x)); }, a, a + s.h, per);
  }
  return tot;
}

// int_R h(tau) e^{-i a / tau} d tau for h vanishing to second order at 0: |tau| >= 1 directly, the rest
// through u = -1/tau; wm(u) = h(-1/u)/u^2 and wp(u) = h(1/u)/u^2
template <class H, class Wm, class Wp>
cd inverse_osc(H&& h, Wm&& wm, Wp&& wp, double a, double L, double hpan) {
  cd outer = 0;
  if (L > 1) {
    double width = std::min(hpan, a != 0 ? 3.0 / std::abs(a) : hpan);
    long m = std::max(1L, static_cast<long>(std::ceil((L - 1) / width)));
    budget_check(2 * m, "inverse-phase integral");
    auto f = [&](double x) { return h(x) * std::exp(cd(0, -a / x)); };
    outer = integrate(f, 1.0, L, m) + integrate(f, -L, -1.0, m);
  }
  // u in [1, U]; the neglected remainder is below 1e-12 of the integrand scale
  double U = a != 0 ? std::clamp(std::cbrt(2e12 / std::abs(a)), 100.0, 2e4) : 2e4;
  auto fu = [&](double u) { return wm(u) * std::exp(cd(0, a * u)) + wp(u) * std::exp(cd(0, -a * u)); };
  cd inner = 0;
  double u = 1.0;
  long count = 0;
  const auto& g = gl20();
  while (u < U) {
    double width = std::min({0.5 * hpan * u * u, 0.25 * u, a != 0 ? 3.0 / std::abs(a) : INFINITY});
    double b = std::min(U, u + width);
    cd part = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) part += g.w[i] * fu(0.5 * (u + b) + 0.5 * (b - u) * g.x[i]);
    inner += 0.5 * (b - u) * part;
    u = b;
    if (++count > kMaxSubpanels) fail(Err::AccuracyNotReached, "inverse-phase integral: too many sub-panels");
  }
  return outer + inner;
}

PanelPoly from_nodes(const LineGrid& g, const std::vector<double>& v) {
  PanelPoly P;
  P.L = g.L;
  P.h = g.h();
  P.panels = g.panels;
  P.deg = g.p - 1;
  P.c.assign(static_cast<std::size_t>(g.panels) * g.p, 0.0);
  GL ref(g.p);
  std::vector<double> Pk(g.p);
  for (int j = 0; j < g.panels; ++j)
    for (int i = 0; i < g.p; ++i) {
      legendre(g.p - 1, ref.x[i], Pk.data());
      for (int k = 0; k < g.p; ++k) P.c[j * g.p + k] += 0.5 * (2 * k + 1) * ref.w[i] * Pk[k] * v[j * g.p + i];
    }
  return P;
}

}  // namespace

LineGrid LineGrid::make(double L, int panels, int p) {
  if (!(L > 1) || panels < 2 || panels % 2 || p < 2)
    fail(Err::InvalidArgument, "line grid: need L > 1, an even panel count and p >= 2");
  LineGrid g;
  g.L = L;
  g.panels = panels;
  g.p = p;
  GL ref(p);
  double h = g.h();
  for (int j = 0; j < panels; ++j)
    for (int i = 0; i < p; ++i) {
      g.t.push_back(-L + (j + 0.5) * h + 0.5 * h * ref.x[i]);
      g.w.push_back(0.5 * h * ref.w[i]);
    }
  return g;
}

OddProfile OddProfile::sample(const std::function<double(double)>& f, const LineGrid& g) {
  OddProfile p;
  p.grid = g;
  for (double t : g.t) p.f.push_back(f(t));
  return p;
}

OddProfile synthetic_profile(double B, const LineGrid& g) {
  double I2 = 0, I4 = 0;
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    double t = g.t[i], base = t * t * std::sqrt(1 + t * t * t * t) * std::exp(-pi * t * t);
    I2 += g.w[i] * base;
    I4 += g.w[i] * base * t * t;
  }
  double A = -B * I4 / I2;
  return OddProfile::sample([=](double t) { return t * std::exp(-pi * t * t) * (A + B * t * t); }, g);
}

OddProfile read_odd_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open '" + path + "'");
  std::map<std::string, std::string> hdr;
  std::vector<double> t, f;
  std::string line;
  while (std::getline(in, line)) {
    auto s = textio::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      textio::parse_header_pairs(s.substr(1), hdr);
      continue;
    }
    auto v = textio::split_nums(s);
    if (v.size() != 2) fail(Err::Parse, path + ": expected 't, f' rows");
    t.push_back(v[0]);
    f.push_back(v[1]);
  }
  auto need = [&](const char* k) {
    if (!hdr.count(k)) fail(Err::Parse, path + ": header lacks " + std::string(k));
    return std::stod(hdr[k]);
  };
  OddProfile p;
  p.grid = LineGrid::make(need("L"), static_cast<int>(need("panels")), static_cast<int>(need("p")));
  if (hdr.count("s0")) p.s0 = std::stod(hdr["s0"]);
  if (t.size() != p.grid.t.size()) fail(Err::GridMismatch, path + ": row count does not match the declared grid");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - p.grid.t[i]) > 1e-12 * p.grid.L) fail(Err::GridMismatch, path + ": nodes differ from the grid");
  p.f = f;
  return p;
}

void write_odd_profile(const std::string& path, const OddProfile& p) {
  std::ofstream out(path);
  if (!out) fail(Err::Io, "cannot write '" + path + "'");
  out << "# kind=odd-profile L=" << textio::fmt17(p.grid.L) << " panels=" << p.grid.panels << " p=" << p.grid.p
      << " s0=" << textio::fmt17(p.s0) << "\n# t, f\n";
  for (std::size_t i = 0; i < p.f.size(); ++i) out << textio::fmt17(p.grid.t[i]) << ", " << textio::fmt17(p.f[i]) << "\n";
  if (!out) fail(Err::Io, "write failed for '" + path + "'");
}

double PanelPoly::eval(double x) const {
  if (!(x >= -L && x <= L) || panels == 0) return 0.0;
  int j = std::min(panels - 1, static_cast<int>((x + L) / h));
  double xi = 2.0 * (x - (-L + j * h)) / h - 1.0;
  const double* cc = &c[static_cast<std::size_t>(j) * (deg + 1)];
  double p0 = 1.0, p1 = xi, s = cc[0];
  if (deg >= 1) s += cc[1] * xi;
  for (int k = 1; k < deg; ++k) {
    double p2 = ((2 * k + 1) * xi * p1 - k * p0) / (k + 1);
    s += cc[k + 1] * p2;
    p0 = p1;
    p1 = p2;
  }
  return s;
}

GResult g_from_f(const OddProfile& p) {
  const auto& g = p.grid;
  const std::size_t n = g.t.size();
  if (p.f.size() != n) fail(Err::GridMismatch, "g_from_f: sample count does not match the grid");
  double fmax = 0, odd = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p.f[i])) fail(Err::InvalidArgument, "g_from_f: non-finite sample");
    fmax = std::max(fmax, std::abs(p.f[i]));
  }
  for (std::size_t i = 0; i < n; ++i) odd = std::max(odd, std::abs(p.f[i] + p.f[n - 1 - i]));
  GResult r;
  r.parity = fmax > 0 ? odd / fmax : 0.0;
  if (r.parity > 1e-9) {
    std::ostringstream os;
    os << "g_from_f: profile is not odd (relative defect " << r.parity << ")";
    fail(Err::ParityViolation, os.str());
  }
  std::vector<double> gv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = g.t[i], fo = 0.5 * (p.f[i] - p.f[n - 1 - i]);
    gv[i] = t * std::sqrt(1 + t * t * t * t) * fo;
  }
  r.g = from_nodes(g, gv);
  return r;
}

Antiderivative antiderivative_G(const PanelPoly& g, double tol) {
  Antiderivative A;
  PanelPoly G;
  G.L = g.L;
  G.h = g.h;
  G.panels = g.panels;
  G.deg = g.deg + 1;
  const int D = G.deg + 1;
  G.c.assign(static_cast<std::size_t>(g.panels) * D, 0.0);
  double prefix = 0;
  for (int j = 0; j < g.panels; ++j) {
    const double* c = &g.c[static_cast<std::size_t>(j) * (g.deg + 1)];
    double* e = &G.c[static_cast<std::size_t>(j) * D];
    // int_{-1}^{xi} P_k = (P_{k+1} - P_{k-1}) / (2k+1), and xi + 1 for k = 0
    e[0] += c[0];
    e[1] += c[0];
    for (int k = 1; k <= g.deg; ++k) {
      e[k + 1] += c[k] / (2 * k + 1);
      e[k - 1] -= c[k] / (2 * k + 1);
    }
    for (int k = 0; k < D; ++k) e[k] *= 0.5 * g.h;
    e[0] += prefix;
    prefix += g.h * c[0];
  }
  A.total = prefix;
  // the right-hand route -int_x^L g differs from the left one by the total exactly
  A.discrepancy = std::abs(A.total);
  A.edge = std::max(std::abs(g.eval(-g.L)), std::abs(g.eval(g.L)));
  if (std::abs(A.total) > tol) {
    std::ostringstream os;
    os << "antiderivative_G: integral of g is " << A.total << ", above " << tol;
    fail(Err::TotalIntegralNonzero, os.str());
  }
  // average of the two routes, then odd symmetrization (panel j mirrors panel P-1-j)
  for (int j = 0; j < g.panels; ++j) G.c[static_cast<std::size_t>(j) * D] -= 0.5 * A.total;
  PanelPoly S = G;
  for (int j = 0; j < g.panels; ++j)
    for (int k = 0; k < D; ++k) {
      double mirror = G.c[static_cast<std::size_t>(g.panels - 1 - j) * D + k] * (k % 2 ? -1.0 : 1.0);
      S.c[static_cast<std::size_t>(j) * D + k] = 0.5 * (G.c[static_cast<std::size_t>(j) * D + k] - mirror);
    }
  A.G = S;
  return A;
}

Pipeline build_pipeline(const OddProfile& p, double tol) {
  Pipeline P;
  P.gres = g_from_f(p);
  P.g = P.gres.g;
  P.anti = antiderivative_G(P.g, tol);
  P.G = P.anti.G;
  const int M = 16384;
  P.hu = 2 * P.G.L / M;
  P.G_uniform.resize(M);
  for (int j = 0; j < M; ++j) P.G_uniform[j] = P.G.eval(-P.G.L + j * P.hu);
  return P;
}

cd phi_eval(const Pipeline& P, double r, double* agreement) {
  if (!(r >= 0)) fail(Err::InvalidArgument, "phi_eval: r must be >= 0");
  cd v = line_osc(P.G, pi * r * r);
  if (agreement) *agreement = std::abs(v - phi_F1_route(P, r));
  return v;
}

cd phi_F1_route(const Pipeline& P, double r) {
  // F_1(G)(xi) = int G e^{-2 pi i tau xi}, at xi = -r^2/2; trapezoid on the uniform samples
  double xi = -0.5 * r * r;
  cd s = 0;
  for (std::size_t j = 0; j < P.G_uniform.size(); ++j) {
    double tau = -P.G.L + j * P.hu;
    s += P.G_uniform[j] * std::exp(cd(0, -2 * pi * tau * xi));
  }
  return s * P.hu;
}

cd phi_by_parts(const Pipeline& P, double r) {
  if (!(r > 0)) fail(Err::InvalidArgument, "phi_by_parts: r must be positive");
  return I / (pi * r * r) * line_osc(P.g, pi * r * r);
}

cd phi_hat_eval(const Pipeline& P, double rho) {
  if (!(rho >= 0)) fail(Err::InvalidArgument, "phi_hat_eval: rho must be >= 0");
  const auto& G = P.G;
  double a = pi * rho * rho;
  cd v = inverse_osc([&](double t) { return G.eval(t) / (t * t); }, [&](double u) { return G.eval(-1.0 / u); },
                     [&](double u) { return G.eval(1.0 / u); }, a, G.L, G.h);
  return -v;
}

namespace {
cd g_inverse(const Pipeline& P, double a) {
  const auto& g = P.g;
  return inverse_osc([&](double t) { return g.eval(t); }, [&](double u) { return g.eval(-1.0 / u) / (u * u); },
                     [&](double u) { return g.eval(1.0 / u) / (u * u); }, a, g.L, g.h);
}
}  // namespace

cd phi_hat_by_parts(const Pipeline& P, double rho) {
  if (!(rho > 0)) fail(Err::InvalidArgument, "phi_hat_by_parts: rho must be positive");
  return g_inverse(P, pi * rho * rho) / (pi * I * rho * rho);
}

cd mu_hat_axis(const Pipeline& P, Axis axis, double value) {
  if (!std::isfinite(value)) fail(Err::InvalidArgument, "mu_hat_axis: value must be finite");
  if (axis == Axis::X) return line_osc(P.g, pi * value);
  // int g e^{pi i v / tau} is the inverse-phase integral with a = -pi v
  return g_inverse(P, -pi * value);
}

// ---- cross data ----

void validate(const HyperbolaCrossData& d) {
  const auto& p = d.profile;
  if (p.d != 4) fail(Err::InvalidArgument, "cross data: profile must be for d = 4");
  if (d.mu_x.size() != d.mu_y.size() || d.mu_x.empty())
    fail(Err::InvalidArgument, "cross data: the two value arrays must have equal nonzero length");
  if (p.e(0) != 0 || p.eh(0) != 0) fail(Err::InvalidArgument, "cross data: no perturbation at the origin");
  if (!(p.delta >= 0)) fail(Err::InvalidArgument, "cross data: delta must be >= 0");
  for (std::size_t n = 1; n < std::max(p.eps.size(), p.eps_hat.size()); ++n) {
    double s = std::abs(p.e(n)) + std::abs(p.eh(n)), b = p.delta * std::pow(double(n), -7.0);
    if (s > b * (1 + 1e-12)) {
      std::ostringstream os;
      os << "cross data: |eps_" << n << "| + |eps_hat_" << n << "| = " << s << " exceeds delta n^-7 = " << b;
      fail(Err::InvalidArgument, os.str());
    }
    if (n + p.e(n) <= 0 || n + p.eh(n) <= 0) fail(Err::InvalidArgument, "cross data: perturbed node not positive");
  }
  for (auto* v : {&d.mu_x, &d.mu_y})
    for (auto& z : *v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(Err::InvalidArgument, "cross data: non-finite value");
}

interp::PerturbationProfile shaped_cross_profile(double delta, int n_max, unsigned seed) {
  if (!(delta >= 0) || n_max < 0) fail(Err::InvalidArgument, "shaped_cross_profile: need delta >= 0, n_max >= 0");
  interp::PerturbationProfile p;
  p.d = 4;
  p.s = 1;
  p.eta = 0.5;
  p.delta = delta;
  p.eps.assign(n_max + 1, 0.0);
  p.eps_hat.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    double b = delta * std::pow(double(n), -7.0), sn = std::sin(double(seed) * n), frac = 0.5 + 0.5 * sn * sn;
    p.eps[n] = (n % 2 ? 0.6 : -0.6) * frac * b;
    p.eps_hat[n] = (n % 3 ? -0.4 : 0.4) * frac * b;
  }
  return p;
}

HyperbolaCrossData cross_data_from(const Pipeline& P, const interp::PerturbationProfile& p, int n_max) {
  if (n_max < 0) fail(Err::InvalidArgument, "cross data: n_max must be >= 0");
  HyperbolaCrossData d;
  d.profile = p;
  d.mu_x.assign(n_max + 1, 0.0);
  d.mu_y.assign(n_max + 1, 0.0);
  parallel_for(static_cast<std::size_t>(n_max + 1), [&](std::size_t i) {
    int n = static_cast<int>(i);
    d.mu_x[n] = mu_hat_axis(P, Axis::X, n + p.e(n));
    d.mu_y[n] = mu_hat_axis(P, Axis::Y, n + p.eh(n));
  });
  return d;
}

HyperbolaCrossData read_cross_data(const std::string& path) {
  auto kv = textio::read_kv(path);
  HyperbolaCrossData d;
  auto& p = d.profile;
  p.d = 4;
  p.s = 1;
  p.eta = 0.5;
  p.delta = kv.num("delta");
  p.eps = kv.nums("eps");
  p.eps_hat = kv.nums("eps_hat");
  auto xr = kv.nums("mu_x_re"), xi = kv.nums("mu_x_im"), yr = kv.nums("mu_y_re"), yi = kv.nums("mu_y_im");
  if (xr.size() != xi.size() || yr.size() != yi.size()) fail(Err::Parse, path + ": real and imaginary arrays differ");
  for (std::size_t i = 0; i < xr.size(); ++i) d.mu_x.emplace_back(xr[i], xi[i]);
  for (std::size_t i = 0; i < yr.size(); ++i) d.mu_y.emplace_back(yr[i], yi[i]);
  validate(d);
  return d;
}

void write_cross_data(const std::string& path, const HyperbolaCrossData& d) {
  textio::KV kv;
  kv.set("delta", d.profile.delta);
  kv.set("eps", d.profile.eps);
  kv.set("eps_hat", d.profile.eps_hat);
  std::vector<double> xr, xi, yr, yi;
  for (auto z : d.mu_x) {
    xr.push_back(z.real());
    xi.push_back(z.imag());
  }
  for (auto z : d.mu_y) {
    yr.push_back(z.real());
    yi.push_back(z.imag());
  }
  kv.set("mu_x_re", xr);
  kv.set("mu_x_im", xi);
  kv.set("mu_y_re", yr);
  kv.set("mu_y_im", yi);
  textio::write_kv(path, kv, "hyperbola cross data: mu_x[n] at n+eps_n on the x axis, mu_y[n] at n+eps_hat_n on y");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Zero: return "zero";
    case Verdict::Reconstructed: return "reconstructed";
    case Verdict::Inconsistent: return "inconsistent";
  }
  return "?";
}

HupReport hup_check(const HyperbolaCrossData& data, const OddProfile& f, const interp::InterpTables& t, double tol,
                    double r_check) {
  validate(data);
  if (t.d != 4) fail(Err::InvalidArgument, "hup_check: tables must be for d = 4");
  const int N = std::min(data.n_max(), t.n_max);
  HupReport rep;
  // delta n^-7 <= 2^7 delta (1+n)^-7 for n >= 1, which is the shape the radial layer validates
  interp::PerturbationProfile p = data.profile;
  p.delta *= 128;
  rep.budget = interp::budget(p, t, {1, 4}).value;
  if (!(rep.budget < 1)) {
    std::ostringstream os;
    os << "hup_check: profile budget " << rep.budget << " is not below 1";
    fail(Err::BudgetExceeded, os.str());
  }
  Pipeline P = build_pipeline(f);
  rep.parity = P.gres.parity;
  rep.total_integral = P.anti.total;
  for (int n = 0; n <= N; ++n) rep.data_norm = std::max({rep.data_norm, std::abs(data.mu_x[n]), std::abs(data.mu_y[n])});

  // node values of Phi and its 4-d transform; the origin values vanish because G is odd
  std::vector<cd> fv(N + 1, 0.0), hv(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    fv[n] = I / (pi * (n + p.e(n))) * data.mu_x[n];
    hv[n] = data.mu_y[n] / (pi * I * (n + p.eh(n)));
  }
  auto run = [&](bool imag_part, std::vector<interp::IterLog>& log) {
    interp::NodeData nd;
    nd.d = 4;
    nd.n_max = N;
    for (int n = 0; n <= N; ++n) {
      nd.f_vals.push_back(imag_part ? fv[n].imag() : fv[n].real());
      nd.fhat_vals.push_back(imag_part ? hv[n].imag() : hv[n].real());
    }
    auto res = interp::reconstruct(nd, p, t, 60, 1e-13);
    log = res.log;
    return res.f;
  };
  auto re = run(false, rep.log_re), im = run(true, rep.log_im);
  rep.phi_rec = re;
  for (std::size_t i = 0; i < re.values.size(); ++i) {
    rep.phi_rec.values[i] = re.values[i] + I * im.values[i];
    rep.phi_rec.hat[i] = re.hat[i] + I * im.hat[i];
  }
  const auto& g = *t.grid;
  std::vector<double> dn(g.size(), 0.0), rn(g.size(), 0.0), df(g.size(), 0.0), ag(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t i) {
    if (g.r[i] > r_check) return;
    cd direct = phi_eval(P, g.r[i], &ag[i]);
    dn[i] = std::abs(direct);
    rn[i] = std::abs(rep.phi_rec.values[i]);
    df[i] = std::abs(direct - rep.phi_rec.values[i]);
  });
  for (std::size_t i = 0; i < g.size(); ++i) {
    rep.phi_direct_norm = std::max(rep.phi_direct_norm, dn[i]);
    rep.phi_rec_norm = std::max(rep.phi_rec_norm, rn[i]);
    rep.discrepancy = std::max(rep.discrepancy, df[i]);
    rep.route_agreement = std::max(rep.route_agreement, ag[i]);
  }
  if (rep.data_norm <= tol && rep.phi_rec_norm <= tol)
    rep.verdict = rep.phi_direct_norm <= tol ? Verdict::Zero : Verdict::Inconsistent;
  else
    rep.verdict = rep.discrepancy <= 1e-3 * std::max(1.0, rep.phi_direct_norm) ? Verdict::Reconstructed
                                                                                 : Verdict::Inconsistent;
  return rep;
}

}  // namespace fi::hup
