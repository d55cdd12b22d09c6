#include "interp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "textio.hpp"

namespace fi::interp {

using spaces::RadialFunction;

double profile_shape(const PerturbationProfile& p, int d, std::size_t n) {
  return p.delta * std::pow(1.0 + n, -d - 0.5 * p.s - 2 - p.eta);
}

void validate(const PerturbationProfile& p, int d) {
  if (d < 1) fail(Err::InvalidArgument, "profile: dimension must be positive");
  if (p.d != 0 && p.d != d) fail(Err::InvalidArgument, "profile: declared d does not match");
  if (!(p.s >= 1)) fail(Err::InvalidArgument, "profile: s must be >= 1");
  if (!(p.eta > 0)) fail(Err::InvalidArgument, "profile: eta must be positive");
  if (!(p.delta >= 0)) fail(Err::InvalidArgument, "profile: delta must be >= 0");
  std::size_t L = std::max(p.eps.size(), p.eps_hat.size());
  for (std::size_t n = 0; n < L; ++n) {
    double e = p.e(n), eh = p.eh(n);
    if (!std::isfinite(e) || !std::isfinite(eh)) fail(Err::InvalidArgument, "profile: non-finite entry");
    if (std::abs(e) + std::abs(eh) > profile_shape(p, d, n) * (1 + 1e-12)) {
      std::ostringstream os;
      os << "profile: |eps_" << n << "| + |eps_hat_" << n << "| = " << std::abs(e) + std::abs(eh)
         << " exceeds delta (1+n)^{-d-s/2-2-eta} = " << profile_shape(p, d, n);
      fail(Err::InvalidArgument, os.str());
    }
    if (n >= 1 && (n + e < 0 || n + eh < 0)) fail(Err::InvalidArgument, "profile: perturbed radius is not real");
  }
}

PerturbationProfile shaped_profile(int d, double s, double eta, double delta, std::size_t len, unsigned seed) {
  PerturbationProfile p;
  p.d = d;
  p.s = s;
  p.eta = eta;
  p.delta = delta;
  std::mt19937 g(seed);
  std::uniform_real_distribution<double> frac(0.5, 1.0), split(0.0, 1.0);
  for (std::size_t n = 0; n < len; ++n) {
    double m = profile_shape(p, d, n) * frac(g);
    double a = split(g);
    double se = (g() & 1) ? 1.0 : -1.0, sh = (g() & 1) ? 1.0 : -1.0;
    p.eps.push_back(se * a * m);
    p.eps_hat.push_back(sh * (1 - a) * m);
  }
  return p;
}

PerturbationProfile read_profile(const std::string& path) {
  auto kv = textio::read_kv(path);
  PerturbationProfile p;
  p.d = static_cast<int>(kv.integer("d"));
  p.s = kv.num("s");
  p.eta = kv.num("eta");
  p.delta = kv.num("delta");
  p.eps = kv.has("eps") ? kv.nums("eps") : std::vector<double>{};
  p.eps_hat = kv.has("eps_hat") ? kv.nums("eps_hat") : std::vector<double>{};
  validate(p, p.d);
  return p;
}

void write_profile(const std::string& path, const PerturbationProfile& p) {
  textio::KV kv;
  kv.set("d", double(p.d));
  kv.set("s", p.s);
  kv.set("eta", p.eta);
  kv.set("delta", p.delta);
  kv.set("eps", p.eps);
  kv.set("eps_hat", p.eps_hat);
  textio::write_kv(path, kv, "perturbation profile");
}

void validate(const NodeData& data) {
  if (data.d < 1) fail(Err::InvalidArgument, "node data: dimension must be positive");
  if (data.n_max < 0) fail(Err::InvalidArgument, "node data: n_max must be >= 0");
  if (static_cast<int>(data.f_vals.size()) != data.n_max + 1 ||
      static_cast<int>(data.fhat_vals.size()) != data.n_max + 1)
    fail(Err::InvalidArgument, "node data: value arrays must have n_max + 1 entries");
  for (double v : data.f_vals)
    if (!std::isfinite(v)) fail(Err::InvalidArgument, "node data: non-finite value");
  for (double v : data.fhat_vals)
    if (!std::isfinite(v)) fail(Err::InvalidArgument, "node data: non-finite value");
}

NodeData read_node_data(const std::string& path) {
  auto kv = textio::read_kv(path);
  NodeData d;
  d.d = static_cast<int>(kv.integer("d"));
  d.n_max = static_cast<int>(kv.integer("n_max"));
  d.f_vals = kv.nums("f_vals");
  d.fhat_vals = kv.nums("fhat_vals");
  validate(d);
  return d;
}

void write_node_data(const std::string& path, const NodeData& data) {
  textio::KV kv;
  kv.set("d", double(data.d));
  kv.set("n_max", double(data.n_max));
  kv.set("f_vals", data.f_vals);
  kv.set("fhat_vals", data.fhat_vals);
  textio::write_kv(path, kv, "node data");
}

namespace {
// radius of node n: |eps_0| at the origin, sqrt(n + eps_n) otherwise
double node(std::size_t n, double e) { return n == 0 ? std::abs(e) : std::sqrt(n + e); }
}  // namespace

NodeData node_data_from(int d, int n_max, const PerturbationProfile& p, const std::function<double(double)>& f,
                        const std::function<double(double)>& fhat) {
  NodeData out;
  out.d = d;
  out.n_max = n_max;
  for (int n = 0; n <= n_max; ++n) {
    out.f_vals.push_back(f(node(n, p.e(n))));
    out.fhat_vals.push_back(fhat(node(n, p.eh(n))));
  }
  return out;
}

InterpTables InterpTables::from_pair(int d, const basis::APair& ap, spaces::GridPtr grid) {
  if (ap.a.k.two_k != d) fail(Err::GridMismatch, "tables: k must equal d/2");
  if (ap.a.r != grid->r) fail(Err::GridMismatch, "tables: radial grid does not match the panel grid");
  InterpTables t;
  t.d = d;
  t.n_max = ap.a.n_max;
  t.grid = grid;
  t.a = ap.a.values;
  t.at = ap.atilde.values;
  t.meta_plus = ap.a.meta;
  t.meta_minus = ap.atilde.meta;
  return t;
}

InterpTables InterpTables::build(int d, int n_max, spaces::GridPtr grid, const basis::HeightPolicy& h,
                                 const basis::QuadConfig& q) {
  HalfInt k{d};
  auto plus = basis::coefficients(k, 1, grid->r, n_max, h, q);
  auto minus = basis::coefficients(k, -1, grid->r, n_max, h, q);
  auto t = from_pair(d, basis::assemble_a(plus, minus), grid);
  t.meta_plus = plus.meta;
  t.meta_minus = minus.meta;
  return t;
}

namespace {
double interp_row(const spaces::RadialGrid& g, const std::vector<double>& v, double r) {
  std::size_t pn;
  std::vector<double> w;
  g.interp_weights(r, pn, w);
  double s = 0;
  for (int j = 0; j < g.p; ++j) s += w[j] * v[pn * g.p + j];
  return s;
}
}  // namespace

double InterpTables::a_at(int n, double r) const {
  if (n < 0 || n > n_max) fail(Err::TableRange, "a_n requested beyond the table");
  return interp_row(*grid, a[n], r);
}
double InterpTables::at_at(int n, double r) const {
  if (n < 0 || n > n_max) fail(Err::TableRange, "atilde_n requested beyond the table");
  return interp_row(*grid, at[n], r);
}

std::vector<double> InterpTables::vs_norms(double s) const {
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    std::vector<cd> va(a[n].begin(), a[n].end()), vt(at[n].begin(), at[n].end());
    out[n] = spaces::weighted_l1(d, *grid, va, s).value + spaces::weighted_l1(d, *grid, vt, s).value;
  }
  return out;
}

RadialFunction synthesize(const InterpTables& t, const Coeffs& x) {
  RadialFunction f;
  f.d = t.d;
  f.grid = t.grid;
  f.provenance = spaces::Provenance::Reconstructed;
  const std::size_t N = t.grid->size();
  f.values.assign(N, 0.0);
  f.hat.assign(N, 0.0);
  const int top = std::min<int>(t.n_max, static_cast<int>(std::max(x.c.size(), x.ch.size())) - 1);
  for (std::size_t i = 0; i < N; ++i) {
    double v = 0, h = 0;
    for (int n = 0; n <= top; ++n) {
      double c = n < static_cast<int>(x.c.size()) ? x.c[n] : 0.0;
      double ch = n < static_cast<int>(x.ch.size()) ? x.ch[n] : 0.0;
      v += c * t.a[n][i] + ch * t.at[n][i];
      h += c * t.at[n][i] + ch * t.a[n][i];
    }
    f.values[i] = v;
    f.hat[i] = h;
  }
  return f;
}

double coeff_vs_norm(const InterpTables& t, const Coeffs& x, double s) {
  auto f = synthesize(t, x);
  return spaces::weighted_l1(t.d, *t.grid, f.values, s).value + spaces::weighted_l1(t.d, *t.grid, f.hat, s).value;
}

InterpResult interpolate(const NodeData& data, const InterpTables& t) {
  validate(data);
  if (data.d != t.d) fail(Err::InvalidArgument, "interpolate: dimension mismatch");
  if (data.n_max > t.n_max) fail(Err::TableRange, "interpolate: data extends beyond the tables");
  InterpResult r;
  r.f = synthesize(t, {data.f_vals, data.fhat_vals});
  // tail: geometric extrapolation of the data against the envelope of sup|a_n|
  const int N = data.n_max;
  double C = 0;
  for (int n = std::max(0, N / 2); n <= N; ++n) {
    double m = 0;
    for (std::size_t i = 0; i < t.grid->size(); ++i) m = std::max({m, std::abs(t.a[n][i]), std::abs(t.at[n][i])});
    C = std::max(C, m / std::pow(1.0 + n, 0.5 * t.d + 1));
  }
  int lo = std::max(1, N - 8);
  double first = std::abs(data.f_vals[lo]) + std::abs(data.fhat_vals[lo]);
  double last = std::abs(data.f_vals[N]) + std::abs(data.fhat_vals[N]);
  if (last == 0.0) {
    r.tail = 0.0;
  } else if (first <= last || N - lo < 1) {
    r.tail = INFINITY;
  } else {
    double q = std::pow(last / first, 1.0 / (N - lo));
    double s = 0, term = last;
    for (int n = N + 1; n < N + 100000; ++n) {
      term *= q;
      double add = term * C * std::pow(1.0 + n, 0.5 * t.d + 1);
      s += add;
      if (add < 1e-30 * s) break;
    }
    r.tail = s;
  }
  return r;
}

namespace {

struct TMatrix {
  // rows n (perturbed node), columns m (basis index)
  std::vector<std::vector<double>> A, At, Ah, Ath;
};

TMatrix t_matrix(const PerturbationProfile& p, const InterpTables& t) {
  const int N = t.n_max;
  TMatrix M;
  M.A.assign(N + 1, std::vector<double>(N + 1));
  M.At = M.Ah = M.Ath = M.A;
  for (int n = 0; n <= N; ++n) {
    double r = node(n, p.e(n)), rh = node(n, p.eh(n));
    if (r > t.grid->r_max() || rh > t.grid->r_max())
      fail(Err::GridCoverage, "apply_T: perturbed radius beyond the table grid");
    for (int m = 0; m <= N; ++m) {
      M.A[n][m] = t.a_at(m, r);
      M.At[n][m] = t.at_at(m, r);
      M.Ah[n][m] = t.a_at(m, rh);
      M.Ath[n][m] = t.at_at(m, rh);
    }
  }
  return M;
}

Coeffs apply(const TMatrix& M, const Coeffs& x) {
  const std::size_t N = M.A.size();
  Coeffs y;
  y.c.assign(N, 0.0);
  y.ch.assign(N, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    double s = 0, sh = 0;
    for (std::size_t m = 0; m < N; ++m) {
      double c = m < x.c.size() ? x.c[m] : 0.0, ch = m < x.ch.size() ? x.ch[m] : 0.0;
      // x(r) = sum c a + ch at and xhat(r) = sum c at + ch a
      s += c * M.A[n][m] + ch * M.At[n][m];
      sh += c * M.Ath[n][m] + ch * M.Ah[n][m];
    }
    y.c[n] = s;
    y.ch[n] = sh;
  }
  return y;
}

}  // namespace

Coeffs apply_T(const Coeffs& x, const PerturbationProfile& p, const InterpTables& t) {
  return apply(t_matrix(p, t), x);
}

RadialFunction apply_T(const RadialFunction& f, const PerturbationProfile& p, const InterpTables& t) {
  if (!f.has_hat()) fail(Err::InvalidArgument, "apply_T: the function must carry its transform");
  if (f.d != t.d) fail(Err::InvalidArgument, "apply_T: dimension mismatch");
  Coeffs c;
  for (int n = 0; n <= t.n_max; ++n) {
    double r = node(n, p.e(n)), rh = node(n, p.eh(n));
    if (r > f.grid->r_max() || rh > f.grid->r_max()) fail(Err::GridCoverage, "apply_T: perturbed radius beyond f's grid");
    c.c.push_back(f.eval(r).real());
    c.ch.push_back(f.eval_hat(rh).real());
  }
  return synthesize(t, c);
}

BudgetReport budget(const PerturbationProfile& p, const InterpTables& t, const spaces::VsParams& vp) {
  spaces::validate(vp);
  BudgetReport b;
  b.norms = t.vs_norms(vp.s);
  const int N = t.n_max;
  auto w = [&](std::size_t n, double e, double eh) {
    double a = std::abs(e) + std::abs(eh);
    return n == 0 ? a : a / std::sqrt(double(n));
  };
  double sum = 0;
  for (int n = 0; n <= N; ++n) sum += w(n, p.e(n), p.eh(n)) * b.norms[n];
  // one constant in front of (1+n)^{d+s/2+3/2}, fitted on the upper half of the table
  const double ex = t.d + 0.5 * vp.s + 1.5;
  for (int n = std::max(1, N / 2); n <= N; ++n) b.fitted_C = std::max(b.fitted_C, b.norms[n] / std::pow(1.0 + n, ex));
  double tail = 0;
  const std::size_t L = std::max(p.eps.size(), p.eps_hat.size());
  std::size_t n = N + 1;
  const std::size_t cap = 1000000;
  for (; n < cap; ++n) {
    double wn = n < L ? w(n, p.e(n), p.eh(n)) : profile_shape(p, t.d, n) / std::sqrt(double(n));
    tail += wn * b.fitted_C * std::pow(1.0 + n, ex);
    if (n >= L && n > 4 * std::size_t(N)) break;
  }
  // remainder of the shape series from n on, as an integral
  {
    double ge = -t.d - 0.5 * p.s - 2 - p.eta - 0.5 + ex;  // exponent of the summand
    if (ge < -1) tail += p.delta * b.fitted_C * std::pow(1.0 + n, ge + 1) / -(ge + 1);
    else tail = INFINITY;
  }
  b.tail = 2 * pi * tail;
  b.value = 2 * pi * sum + b.tail;
  return b;
}

double delta_star(const std::vector<double>& unit_eps, const std::vector<double>& unit_eps_hat,
                  const PerturbationProfile& base, const InterpTables& t, const spaces::VsParams& vp, double target) {
  auto at = [&](double delta) {
    PerturbationProfile p = base;
    p.delta = delta;
    p.eps = unit_eps;
    p.eps_hat = unit_eps_hat;
    for (auto& v : p.eps) v *= delta;
    for (auto& v : p.eps_hat) v *= delta;
    return budget(p, t, vp).value;
  };
  double lo = 0, hi = 1e-6;
  while (at(hi) < target) {
    lo = hi;
    hi *= 2;
    if (hi > 1e6) fail(Err::NonConvergence, "delta_star: budget never reaches the target");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (at(mid) < target ? lo : hi) = mid;
  }
  return lo;
}

namespace {

ReconstructResult neumann(const Coeffs& D, const PerturbationProfile& p, const InterpTables& t, int j_max, double tol) {
  validate(p, t.d);
  if (j_max < 1) fail(Err::InvalidArgument, "reconstruct: j_max must be >= 1");
  ReconstructResult res;
  res.budget = budget(p, t, {p.s, t.d}).value;
  if (!(res.budget < 1)) {
    std::ostringstream os;
    os << "reconstruct: contraction budget " << res.budget << " is not below 1";
    fail(Err::NotContracting, os.str());
  }
  TMatrix M = t_matrix(p, t);
  const std::size_t N = t.n_max + 1;
  Coeffs x{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
  double prev = 0;
  for (int j = 1; j <= j_max; ++j) {
    Coeffs Tx = apply(M, x), nx = x, dx = x;
    for (std::size_t n = 0; n < N; ++n) {
      double dc = n < D.c.size() ? D.c[n] : 0.0, dh = n < D.ch.size() ? D.ch[n] : 0.0;
      nx.c[n] = dc + x.c[n] - Tx.c[n];
      nx.ch[n] = dh + x.ch[n] - Tx.ch[n];
      dx.c[n] = nx.c[n] - x.c[n];
      dx.ch[n] = nx.ch[n] - x.ch[n];
    }
    x = nx;
    IterLog lg;
    lg.j = j;
    lg.diff = coeff_vs_norm(t, dx, p.s);
    lg.ratio = (j >= 2 && prev > 0) ? lg.diff / prev : 0.0;
    res.log.push_back(lg);
    double xn = coeff_vs_norm(t, x, p.s);
    // zero budget means T = I: the first step is already exact
    if (lg.diff <= tol * std::max(xn, 1e-300) || xn == 0.0 || res.budget == 0.0) {
      res.converged = true;
      break;
    }
    if (j >= 2 && lg.ratio > res.budget + 0.05) {
      std::ostringstream os;
      os << "reconstruct: Neumann ratio " << lg.ratio << " at step " << j << " exceeds the budget " << res.budget;
      fail(Err::Stagnation, os.str());
    }
    prev = lg.diff;
  }
  res.x = x;
  res.f = synthesize(t, x);
  return res;
}

}  // namespace

ReconstructResult reconstruct(const NodeData& data, const PerturbationProfile& p, const InterpTables& t, int j_max,
                              double tol) {
  validate(data);
  if (data.d != t.d) fail(Err::InvalidArgument, "reconstruct: dimension mismatch");
  if (data.n_max > t.n_max) fail(Err::TableRange, "reconstruct: data extends beyond the tables");
  return neumann({data.f_vals, data.fhat_vals}, p, t, j_max, tol);
}

ReconstructResult basis_h(const InterpTables& t, const PerturbationProfile& p, int n, bool tilde, int j_max,
                          double tol) {
  if (n < 0 || n > t.n_max) fail(Err::TableRange, "basis_h: index beyond the tables");
  Coeffs e{std::vector<double>(t.n_max + 1, 0.0), std::vector<double>(t.n_max + 1, 0.0)};
  if (n >= basis::nu_of(HalfInt{t.d}, -1)) (tilde ? e.ch : e.c)[n] = 1.0;
  return neumann(e, p, t, j_max, tol);
}

}  // namespace fi::interp
