#include "nonradial.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "textio.hpp"

namespace fi::nonradial {

using spaces::RadialFunction;

namespace {

void check_d(int d) {
  if (d != 2 && d != 3) fail(Err::InvalidArgument, "nonradial: dimension must be 2 or 3");
}

double norm3(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

void gl_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &x[i], &w[i], t);
  gsl_integration_glfixed_table_free(t);
}

cd ipow(int m) {
  static const cd v[4] = {1.0, I, -1.0, -I};
  return v[((m % 4) + 4) % 4];
}

// C_m(t)/C_m(1), the zonal shape without the dimension factor
double zonal_ratio(int d, int m, double t) {
  if (m == 0) return 1.0;
  if (d == 2) return std::cos(m * std::acos(std::clamp(t, -1.0, 1.0)));
  double lam = 0.5 * (d - 2);
  return gegenbauer(m, lam, t) / gegenbauer(m, lam, 1.0);
}

bool row_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

double gegenbauer(int m, double lam, double t) {
  if (m < 0) fail(Err::InvalidArgument, "gegenbauer: negative degree");
  if (!(lam > -0.5)) fail(Err::InvalidArgument, "gegenbauer: lambda must exceed -1/2");
  if (m == 0) return 1.0;
  if (lam == 0.0) return 2.0 / m * std::cos(m * std::acos(std::clamp(t, -1.0, 1.0)));
  double c0 = 1.0, c1 = 2.0 * lam * t;
  for (int n = 1; n < m; ++n) {
    double c2 = (2.0 * t * (n + lam) * c1 - (n + 2.0 * lam - 1.0) * c0) / (n + 1);
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

long dim_harmonic(int d, int m) {
  if (d < 2 || m < 0) fail(Err::InvalidArgument, "dim_harmonic: need d >= 2, m >= 0");
  auto binom = [](long n, long k) -> long {
    if (k < 0 || n < k) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  return binom(d + m - 1, d - 1) - (m >= 2 ? binom(d + m - 3, d - 1) : 0);
}

double zonal_Z(int d, int m, const Point& x, const Point& zeta) {
  if (m == 0) return 1.0;
  double r = norm3(x);
  if (r == 0.0) return 0.0;
  double t = (x[0] * zeta[0] + x[1] * zeta[1] + x[2] * zeta[2]) / r;
  return std::pow(r, m) * static_cast<double>(dim_harmonic(d, m)) * zonal_ratio(d, m, t);
}

int harmonic_count(int d, int M) {
  check_d(d);
  return d == 2 ? 2 * M + 1 : (M + 1) * (M + 1);
}

int degree_of(int d, int h) {
  if (d == 2) return (h + 1) / 2;
  return static_cast<int>(std::sqrt(static_cast<double>(h) + 0.5));
}

void harmonics(int d, int M, const Point& omega, double* out) {
  check_d(d);
  if (d == 2) {
    double ph = std::atan2(omega[1], omega[0]);
    out[0] = 1.0;
    for (int m = 1; m <= M; ++m) {
      out[2 * m - 1] = std::sqrt(2.0) * std::cos(m * ph);
      out[2 * m] = std::sqrt(2.0) * std::sin(m * ph);
    }
    return;
  }
  double th = std::acos(std::clamp(omega[2], -1.0, 1.0));
  double ph = std::atan2(omega[1], omega[0]);
  const double s4pi = std::sqrt(4.0 * pi), r2 = std::sqrt(2.0);
  for (int m = 0; m <= M; ++m) {
    double* o = out + m * m;
    o[0] = s4pi * boost::math::spherical_harmonic_r<double>(m, 0, th, ph);
    for (int j = 1; j <= m; ++j) {
      o[2 * j - 1] = s4pi * r2 * boost::math::spherical_harmonic_r<double>(m, j, th, ph);
      o[2 * j] = s4pi * r2 * boost::math::spherical_harmonic_i<double>(m, j, th, ph);
    }
  }
}

SphereRule SphereRule::make(int d, int degree) {
  check_d(d);
  if (degree < 0) fail(Err::InvalidArgument, "sphere rule: negative degree");
  SphereRule s;
  s.d = d;
  s.degree = degree;
  if (d == 2) {
    int q = degree + 1;
    for (int i = 0; i < q; ++i) {
      double a = 2.0 * pi * i / q;
      s.nodes.push_back({std::cos(a), std::sin(a), 0.0});
      s.w.push_back(1.0 / q);
    }
    return s;
  }
  int p = degree / 2 + 1, q = degree + 1;
  std::vector<double> x, w;
  gl_nodes(p, x, w);
  for (int i = 0; i < p; ++i) {
    double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    for (int j = 0; j < q; ++j) {
      double a = 2.0 * pi * j / q;
      s.nodes.push_back({st * std::cos(a), st * std::sin(a), x[i]});
      s.w.push_back(0.5 * w[i] / q);
    }
  }
  return s;
}

SphereTables SphereTables::build(int d, int M_max, int N_max, spaces::GridPtr grid, const basis::HeightPolicy& h,
                                 const basis::QuadConfig& q) {
  check_d(d);
  if (M_max < 0 || N_max < 0) fail(Err::InvalidArgument, "sphere tables: negative truncation");
  SphereTables t;
  t.d = d;
  t.M_max = M_max;
  t.N_max = N_max;
  t.grid = grid;
  for (int m = 0; m <= M_max; ++m) t.per_m.push_back(interp::InterpTables::build(d + 2 * m, N_max, grid, h, q));
  return t;
}

cd HarmonicExpansion::eval(const Point& x) const {
  const int H = harmonic_count(d, M_max);
  double r = norm3(x);
  Point om = r > 0 ? Point{x[0] / r, x[1] / r, x[2] / r} : Point{0, 0, 1};
  std::vector<double> Y(H);
  harmonics(d, M_max, om, Y.data());
  cd s = 0;
  for (int h = 0; h < H; ++h) s += comp[h].eval(r) * Y[h];
  return s;
}

cd HarmonicExpansion::eval_hat(const Point& xi) const {
  const int H = harmonic_count(d, M_max);
  double r = norm3(xi);
  Point om = r > 0 ? Point{xi[0] / r, xi[1] / r, xi[2] / r} : Point{0, 0, 1};
  std::vector<double> Y(H);
  harmonics(d, M_max, om, Y.data());
  cd s = 0;
  for (int h = 0; h < H; ++h) s += comp[h].eval_hat(r) * Y[h];
  return s;
}

HarmonicExpansion project(int d, int M_max, spaces::GridPtr grid, const PointFn& f, const PointFn& fhat,
                          const SphereRule& rule) {
  check_d(d);
  if (rule.d != d) fail(Err::InvalidArgument, "project: rule dimension mismatch");
  if (rule.degree < 2 * M_max) fail(Err::QuadratureDegree, "project: sphere rule degree below 2 M_max");
  const int H = harmonic_count(d, M_max);
  const std::size_t Q = rule.nodes.size(), G = grid->size();
  std::vector<double> Y(Q * H);
  for (std::size_t q = 0; q < Q; ++q) harmonics(d, M_max, rule.nodes[q], &Y[q * H]);
  HarmonicExpansion e;
  e.d = d;
  e.M_max = M_max;
  e.comp.resize(H);
  for (auto& c : e.comp) {
    c.d = d;
    c.grid = grid;
    c.values.assign(G, 0.0);
    if (fhat) c.hat.assign(G, 0.0);
  }
  parallel_for(G, [&](std::size_t i) {
    double r = grid->r[i];
    for (std::size_t q = 0; q < Q; ++q) {
      const Point& z = rule.nodes[q];
      Point x{r * z[0], r * z[1], r * z[2]};
      cd v = f(x) * rule.w[q];
      cd vh = fhat ? fhat(x) * rule.w[q] : cd(0);
      for (int h = 0; h < H; ++h) {
        e.comp[h].values[i] += v * Y[q * H + h];
        if (fhat) e.comp[h].hat[i] += vh * Y[q * H + h];
      }
    }
  });
  return e;
}

std::pair<cd, cd> kernel_Kn(int d, int n, const Point& x, const Point& zeta, const SphereTables& t,
                            bool allow_truncation) {
  if (n < 1) fail(Err::InvalidArgument, "kernel_Kn: n must be >= 1");
  if (n < (d + 4) / 8) return {0.0, 0.0};
  check_d(d);
  if (t.d != d) fail(Err::InvalidArgument, "kernel_Kn: table dimension mismatch");
  if (n > t.N_max) fail(Err::TableRange, "kernel_Kn: n beyond the tables");
  int m_top = 4 * n + 1;
  if (m_top > t.M_max) {
    if (!allow_truncation) fail(Err::TableRange, "kernel_Kn: tables stop below degree 4n+1");
    m_top = t.M_max;
  }
  double r = norm3(x);
  cd K = 0, Kt = 0;
  for (int m = 0; m <= m_top; ++m) {
    double z = zonal_Z(d, m, x, zeta);
    if (z == 0.0) continue;
    double sc = std::pow(static_cast<double>(n), -0.5 * m) * z;
    K += t.per_m[m].a_at(n, r) * sc;
    Kt += ipow(m) * t.per_m[m].at_at(n, r) * sc;
  }
  return {K, Kt};
}

SeriesValue double_series_eval(const PointFn& f, const PointFn& fhat, const Point& x, const SphereTables& t,
                               const SphereRule& rule, int M_max, int N_max, double trunc_tol) {
  if (M_max > t.M_max || N_max > t.N_max) fail(Err::TableRange, "double series: truncation beyond the tables");
  if (rule.d != t.d) fail(Err::InvalidArgument, "double series: rule dimension mismatch");
  if (rule.degree < 2 * M_max) fail(Err::QuadratureDegree, "double series: sphere rule degree below 2 M_max");
  const int d = t.d;
  const double r = norm3(x);
  const std::size_t Q = rule.nodes.size();
  // samples of f and f^ on the sphere of radius sqrt(n), then per-degree zonal sums
  std::vector<std::vector<cd>> term(M_max + 1, std::vector<cd>(N_max + 1, 0.0));
  parallel_for(static_cast<std::size_t>(N_max), [&](std::size_t i) {
    int n = static_cast<int>(i) + 1;
    double rn = std::sqrt(static_cast<double>(n));
    std::vector<cd> fs(Q), hs(Q);
    for (std::size_t q = 0; q < Q; ++q) {
      const Point& z = rule.nodes[q];
      Point y{rn * z[0], rn * z[1], rn * z[2]};
      fs[q] = f(y);
      hs[q] = fhat(y);
    }
    for (int m = 0; m <= M_max; ++m) {
      cd sf = 0, sh = 0;
      for (std::size_t q = 0; q < Q; ++q) {
        double z = zonal_Z(d, m, x, rule.nodes[q]) * rule.w[q];
        sf += fs[q] * z;
        sh += hs[q] * z;
      }
      double sc = std::pow(static_cast<double>(n), -0.5 * m);
      term[m][n] = t.per_m[m].a_at(n, r) * sc * sf + ipow(m) * t.per_m[m].at_at(n, r) * sc * sh;
    }
  });
  Point o{0, 0, 0};
  term[0][0] = t.per_m[0].a_at(0, r) * f(o) + t.per_m[0].at_at(0, r) * fhat(o);
  for (int m = 1; m <= M_max; ++m)
    if (!row_zero(t.per_m[m].a[0]) || !row_zero(t.per_m[m].at[0]))
      fail(Err::InvalidArgument, "double series: n = 0 term of positive degree needs Taylor data");
  SeriesValue out;
  for (int m = 0; m <= M_max; ++m) {
    cd s = 0;
    for (int n = 0; n <= N_max; ++n) s += term[m][n];
    out.value += s;
  }
  for (int m = 0; m <= M_max; ++m) out.tail = std::max(out.tail, std::abs(term[m][N_max]));
  if (out.tail > trunc_tol * std::max(1.0, std::abs(out.value))) {
    std::ostringstream os;
    os << "double series: last shell contributes " << out.tail;
    fail(Err::TruncationBudget, os.str());
  }
  return out;
}

// ---- perturbations ----

double SpherePerturbation::radius(int n, const Point& zeta, bool hat) const {
  const auto& all = hat ? eps_hat : eps;
  double e = 0;
  if (n < static_cast<int>(all.size()) && !all[n].empty()) {
    const int H = harmonic_count(d, kPerturbationDegree);
    std::vector<double> Y(H);
    harmonics(d, kPerturbationDegree, zeta, Y.data());
    for (int h = 0; h < H && h < static_cast<int>(all[n].size()); ++h) e += all[n][h] * Y[h];
  }
  return std::sqrt(static_cast<double>(n)) + e;
}

namespace {
double sup_on_sphere(int d, const std::vector<double>& coef) {
  if (coef.empty()) return 0.0;
  static const SphereRule fine3 = SphereRule::make(3, 60), fine2 = SphereRule::make(2, 255);
  const SphereRule& r = d == 2 ? fine2 : fine3;
  const int H = harmonic_count(d, kPerturbationDegree);
  std::vector<double> Y(H);
  double s = 0;
  for (auto& z : r.nodes) {
    harmonics(d, kPerturbationDegree, z, Y.data());
    double e = 0;
    for (int h = 0; h < H && h < static_cast<int>(coef.size()); ++h) e += coef[h] * Y[h];
    s = std::max(s, std::abs(e));
  }
  return s;
}
double vnorm(const Point& p) { return norm3(p); }
}  // namespace

void SpherePerturbation::refresh_sigma() {
  std::size_t N = std::max(eps.size(), eps_hat.size());
  sigma.assign(std::max<std::size_t>(N, 1), 0.0);
  sigma[0] = vnorm(eps0) + vnorm(eps0_hat);
  for (std::size_t n = 1; n < N; ++n)
    sigma[n] = sup_on_sphere(d, n < eps.size() ? eps[n] : std::vector<double>{}) +
               sup_on_sphere(d, n < eps_hat.size() ? eps_hat[n] : std::vector<double>{});
}

double sphere_shape(const SpherePerturbation& p, int n) {
  return p.delta * std::pow(1.0 + n, -10.0 * n - 2.5 * p.d - p.c5 - 1.1);
}

void validate(const SpherePerturbation& p) {
  check_d(p.d);
  if (!(p.delta >= 0) || !std::isfinite(p.delta)) fail(Err::InvalidArgument, "sphere perturbation: bad delta");
  if (!std::isfinite(p.c5)) fail(Err::InvalidArgument, "sphere perturbation: bad c5");
  const std::size_t H = harmonic_count(p.d, kPerturbationDegree);
  for (auto* v : {&p.eps, &p.eps_hat})
    for (auto& c : *v)
      if (c.size() > H) fail(Err::InvalidArgument, "sphere perturbation: harmonic degree above 4");
  if (p.d == 2 && (p.eps0[2] != 0 || p.eps0_hat[2] != 0))
    fail(Err::InvalidArgument, "sphere perturbation: origin vectors must lie in the plane for d = 2");
  for (std::size_t n = 0; n < p.sigma.size(); ++n) {
    double b = sphere_shape(p, static_cast<int>(n));
    if (p.sigma[n] > b * (1 + 1e-12)) {
      std::ostringstream os;
      os << "sphere perturbation: sigma_" << n << " = " << p.sigma[n] << " exceeds the shape bound " << b;
      fail(Err::InvalidArgument, os.str());
    }
    if (n >= 1 && p.sigma[n] >= std::sqrt(static_cast<double>(n)))
      fail(Err::InvalidArgument, "sphere perturbation: perturbed radius can turn negative");
  }
}

SpherePerturbation shaped_sphere_perturbation(int d, double delta, double c5, int N, unsigned seed) {
  check_d(d);
  SpherePerturbation p;
  p.d = d;
  p.delta = delta;
  p.c5 = c5;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0), F(0.5, 1.0), S(0.0, 1.0);
  const int H = harmonic_count(d, kPerturbationDegree);
  // a little headroom because sigma is a sampled sup
  const double safety = 0.98;
  auto rand_vec = [&](double len) {
    Point v{U(rng), U(rng), d == 3 ? U(rng) : 0.0};
    double nv = norm3(v);
    for (auto& c : v) c *= len / nv;
    return v;
  };
  {
    double tgt = safety * F(rng) * sphere_shape(p, 0), sp = S(rng);
    p.eps0 = rand_vec(sp * tgt);
    p.eps0_hat = rand_vec((1 - sp) * tgt);
  }
  p.eps.assign(N + 1, {});
  p.eps_hat.assign(N + 1, {});
  for (int n = 1; n <= N; ++n) {
    double tgt = safety * F(rng) * sphere_shape(p, n), sp = S(rng);
    for (int side = 0; side < 2; ++side) {
      std::vector<double> c(H);
      for (auto& x : c) x = U(rng);
      double s = sup_on_sphere(d, c), want = (side == 0 ? sp : 1 - sp) * tgt;
      for (auto& x : c) x *= want / s;
      (side == 0 ? p.eps : p.eps_hat)[n] = c;
    }
  }
  p.refresh_sigma();
  return p;
}

SpherePerturbation read_sphere_perturbation(const std::string& path) {
  auto kv = textio::read_kv(path);
  SpherePerturbation p;
  p.d = static_cast<int>(kv.integer("d"));
  check_d(p.d);
  p.delta = kv.num("delta");
  p.c5 = kv.has("c5") ? kv.num("c5") : 0.0;
  int N = static_cast<int>(kv.integer("n_max"));
  if (N < 0) fail(Err::Parse, "sphere perturbation: negative n_max");
  auto vec = [&](const std::string& k, Point& out) {
    if (!kv.has(k)) return;
    auto v = kv.nums(k);
    if (static_cast<int>(v.size()) != p.d) fail(Err::Parse, "sphere perturbation: '" + k + "' needs d entries");
    for (int i = 0; i < p.d; ++i) out[i] = v[i];
  };
  vec("eps0", p.eps0);
  vec("eps0_hat", p.eps0_hat);
  p.eps.assign(N + 1, {});
  p.eps_hat.assign(N + 1, {});
  for (int n = 1; n <= N; ++n) {
    std::string a = "eps_" + std::to_string(n), b = "eps_hat_" + std::to_string(n);
    if (kv.has(a)) p.eps[n] = kv.nums(a);
    if (kv.has(b)) p.eps_hat[n] = kv.nums(b);
  }
  p.refresh_sigma();
  validate(p);
  return p;
}

void write_sphere_perturbation(const std::string& path, const SpherePerturbation& p) {
  textio::KV kv;
  kv.set("d", p.d);
  kv.set("delta", p.delta);
  kv.set("c5", p.c5);
  int N = static_cast<int>(std::max(p.eps.size(), p.eps_hat.size())) - 1;
  kv.set("n_max", std::max(N, 0));
  kv.set("eps0", std::vector<double>(p.eps0.begin(), p.eps0.begin() + p.d));
  kv.set("eps0_hat", std::vector<double>(p.eps0_hat.begin(), p.eps0_hat.begin() + p.d));
  for (int n = 1; n <= N; ++n) {
    if (n < static_cast<int>(p.eps.size()) && !p.eps[n].empty()) kv.set("eps_" + std::to_string(n), p.eps[n]);
    if (n < static_cast<int>(p.eps_hat.size()) && !p.eps_hat[n].empty())
      kv.set("eps_hat_" + std::to_string(n), p.eps_hat[n]);
  }
  textio::write_kv(path, kv, "sphere perturbation: harmonic coefficients of eps_n, eps_hat_n (degree <= 4)");
}

// ---- series coefficients ----

namespace {

struct Layout {
  int d, M, N, H;
  std::vector<int> deg;
  explicit Layout(const SphereTables& t) : d(t.d), M(t.M_max), N(t.N_max), H(harmonic_count(t.d, t.M_max)) {
    for (int h = 0; h < H; ++h) deg.push_back(degree_of(d, h));
  }
  SphereCoeffs zeros() const {
    return {std::vector<std::vector<cd>>(H, std::vector<cd>(N + 1, 0.0)),
            std::vector<std::vector<cd>>(H, std::vector<cd>(N + 1, 0.0))};
  }
};

// entries whose basis row vanishes carry no information; keep them at zero
void mask(const SphereTables& t, const Layout& L, SphereCoeffs& x) {
  for (int h = 0; h < L.H; ++h) {
    int m = L.deg[h];
    for (int n = 0; n <= L.N; ++n) {
      bool dead = (n == 0 && m > 0);
      if (dead || row_zero(t.per_m[m].a[n])) x.c[h][n] = 0.0;
      if (dead || row_zero(t.per_m[m].at[n])) x.ch[h][n] = 0.0;
    }
  }
}

// basis values at arbitrary radii: B[m][n] for a and atilde
struct RadialSample {
  std::vector<double> a, at;  // [(m)*(N+1) + n]
};
RadialSample radial_sample(const SphereTables& t, double rho) {
  const auto& g = *t.grid;
  std::size_t pn;
  std::vector<double> wts;
  g.interp_weights(rho, pn, wts);
  RadialSample s;
  const int N1 = t.N_max + 1;
  s.a.assign((t.M_max + 1) * N1, 0.0);
  s.at.assign((t.M_max + 1) * N1, 0.0);
  for (int m = 0; m <= t.M_max; ++m)
    for (int n = 0; n < N1; ++n) {
      double va = 0, vt = 0;
      for (int j = 0; j < g.p; ++j) {
        va += wts[j] * t.per_m[m].a[n][pn * g.p + j];
        vt += wts[j] * t.per_m[m].at[n][pn * g.p + j];
      }
      s.a[m * N1 + n] = va;
      s.at[m * N1 + n] = vt;
    }
  return s;
}

// value of the synthesized function (hat = false) or its transform at rho * omega
cd point_value(const Layout& L, const SphereCoeffs& x, const RadialSample& s, double rho, const double* Y, bool hat) {
  const int N1 = L.N + 1;
  cd v = 0;
  for (int h = 0; h < L.H; ++h) {
    int m = L.deg[h];
    if (m > 0 && rho == 0.0) continue;
    cd acc = 0;
    const double* A = &s.a[m * N1];
    const double* At = &s.at[m * N1];
    for (int n = 0; n < N1; ++n)
      acc += hat ? x.c[h][n] * At[n] + x.ch[h][n] * A[n] : x.c[h][n] * A[n] + x.ch[h][n] * At[n];
    cd f = acc * std::pow(rho, m) * Y[h];
    v += hat ? ipow(-m) * f : f;
  }
  return v;
}

// coefficients from point values on the perturbed spheres: f_at(n, q) and fh_at(n, q), plus origin values
template <class Fn, class Fh>
SphereCoeffs coeffs_from_samples(const SphereTables& t, const SphereRule& rule, const Layout& L, cd f0, cd fh0,
                                 Fn&& f_at, Fh&& fh_at) {
  SphereCoeffs out = L.zeros();
  const std::size_t Q = rule.nodes.size();
  std::vector<double> Y(Q * L.H);
  for (std::size_t q = 0; q < Q; ++q) harmonics(L.d, L.M, rule.nodes[q], &Y[q * L.H]);
  parallel_for(static_cast<std::size_t>(L.N), [&](std::size_t i) {
    int n = static_cast<int>(i) + 1;
    std::vector<cd> fs(Q), hs(Q);
    for (std::size_t q = 0; q < Q; ++q) {
      fs[q] = f_at(n, q) * rule.w[q];
      hs[q] = fh_at(n, q) * rule.w[q];
    }
    for (int h = 0; h < L.H; ++h) {
      int m = L.deg[h];
      cd sf = 0, sh = 0;
      for (std::size_t q = 0; q < Q; ++q) {
        sf += fs[q] * Y[q * L.H + h];
        sh += hs[q] * Y[q * L.H + h];
      }
      double sc = std::pow(static_cast<double>(n), -0.5 * m);
      out.c[h][n] = sc * sf;
      out.ch[h][n] = ipow(m) * sc * sh;
    }
  });
  out.c[0][0] = f0;
  out.ch[0][0] = fh0;
  mask(t, L, out);
  return out;
}

void check_rule(const SphereTables& t, const SphereRule& rule) {
  if (rule.d != t.d) fail(Err::InvalidArgument, "sphere operator: rule dimension mismatch");
  int need = 2 * t.M_max + kPerturbationDegree;
  if (rule.degree < need) {
    std::ostringstream os;
    os << "sphere operator: rule degree " << rule.degree << " below the required " << need;
    fail(Err::QuadratureDegree, os.str());
  }
}

Point scaled(const Point& z, double r) { return {r * z[0], r * z[1], r * z[2]}; }

// the perturbed radii, precomputed per (n, node)
struct Radii {
  std::vector<std::vector<double>> r, rh;
};
Radii perturbed_radii(const SpherePerturbation& p, const SphereRule& rule, int N) {
  Radii R;
  R.r.assign(N + 1, {});
  R.rh.assign(N + 1, {});
  for (int n = 1; n <= N; ++n)
    for (auto& z : rule.nodes) {
      R.r[n].push_back(p.radius(n, z, false));
      R.rh[n].push_back(p.radius(n, z, true));
    }
  return R;
}

// T in coefficient space with basis values cached at all perturbed points
struct SpherePlan {
  Layout L;
  std::size_t Q;
  std::vector<double> Y;                      // [q*H + h]
  std::vector<std::vector<RadialSample>> s, sh;  // [n][q]
  std::vector<std::vector<double>> r, rh;
  RadialSample s0, sh0;
  double r0, rh0;
  std::vector<double> Y0, Yh0;
  const SphereRule* rule;
  const SphereTables* t;

  SpherePlan(const SpherePerturbation& p, const SphereTables& tt, const SphereRule& rr) : L(tt) {
    t = &tt;
    rule = &rr;
    Q = rr.nodes.size();
    Y.resize(Q * L.H);
    for (std::size_t q = 0; q < Q; ++q) harmonics(L.d, L.M, rr.nodes[q], &Y[q * L.H]);
    Radii R = perturbed_radii(p, rr, L.N);
    r = R.r;
    rh = R.rh;
    s.assign(L.N + 1, {});
    sh.assign(L.N + 1, {});
    parallel_for(static_cast<std::size_t>(L.N), [&](std::size_t i) {
      int n = static_cast<int>(i) + 1;
      for (std::size_t q = 0; q < Q; ++q) {
        s[n].push_back(radial_sample(tt, r[n][q]));
        sh[n].push_back(radial_sample(tt, rh[n][q]));
      }
    });
    r0 = norm3(p.eps0);
    rh0 = norm3(p.eps0_hat);
    s0 = radial_sample(tt, r0);
    sh0 = radial_sample(tt, rh0);
    Y0.resize(L.H);
    Yh0.resize(L.H);
    harmonics(L.d, L.M, r0 > 0 ? scaled(p.eps0, 1 / r0) : Point{0, 0, 1}, Y0.data());
    harmonics(L.d, L.M, rh0 > 0 ? scaled(p.eps0_hat, 1 / rh0) : Point{0, 0, 1}, Yh0.data());
  }

  SphereCoeffs apply(const SphereCoeffs& x) const {
    cd f0 = point_value(L, x, s0, r0, Y0.data(), false);
    cd fh0 = point_value(L, x, sh0, rh0, Yh0.data(), true);
    return coeffs_from_samples(
        *t, *rule, L, f0, fh0,
        [&](int n, std::size_t q) { return point_value(L, x, s[n][q], r[n][q], &Y[q * L.H], false); },
        [&](int n, std::size_t q) { return point_value(L, x, sh[n][q], rh[n][q], &Y[q * L.H], true); });
  }
};

}  // namespace

HarmonicExpansion synthesize(const SphereTables& t, const SphereCoeffs& x) {
  Layout L(t);
  HarmonicExpansion e;
  e.d = t.d;
  e.M_max = t.M_max;
  const std::size_t G = t.grid->size();
  e.comp.resize(L.H);
  for (int h = 0; h < L.H; ++h) {
    int m = L.deg[h];
    auto& c = e.comp[h];
    c.d = t.d;
    c.grid = t.grid;
    c.provenance = spaces::Provenance::Reconstructed;
    c.values.assign(G, 0.0);
    c.hat.assign(G, 0.0);
    const auto& T = t.per_m[m];
    for (std::size_t i = 0; i < G; ++i) {
      cd v = 0, w = 0;
      for (int n = 0; n <= L.N; ++n) {
        v += x.c[h][n] * T.a[n][i] + x.ch[h][n] * T.at[n][i];
        w += x.c[h][n] * T.at[n][i] + x.ch[h][n] * T.a[n][i];
      }
      double rm = std::pow(t.grid->r[i], m);
      c.values[i] = v * rm;
      c.hat[i] = ipow(-m) * w * rm;
    }
  }
  return e;
}

double surrogate_v1(const HarmonicExpansion& e, const SphereRule& rule) {
  const int H = static_cast<int>(e.comp.size());
  const auto& g = *e.comp[0].grid;
  const std::size_t Q = rule.nodes.size(), G = g.size();
  std::vector<double> Y(Q * H);
  for (std::size_t q = 0; q < Q; ++q) harmonics(e.d, e.M_max, rule.nodes[q], &Y[q * H]);
  std::vector<double> part(G, 0.0);
  const double area = spaces::sphere_area(e.d);
  parallel_for(G, [&](std::size_t i) {
    double r = g.r[i], sf = 0, sh = 0;
    for (std::size_t q = 0; q < Q; ++q) {
      cd v = 0, w = 0;
      for (int h = 0; h < H; ++h) {
        v += e.comp[h].values[i] * Y[q * H + h];
        if (e.comp[h].has_hat()) w += e.comp[h].hat[i] * Y[q * H + h];
      }
      sf += rule.w[q] * std::abs(v);
      sh += rule.w[q] * std::abs(w);
    }
    part[i] = g.w[i] * area * std::pow(r, e.d - 1) * (1 + r) * (sf + sh);
  });
  double s = 0;
  for (double v : part) s += v;
  return s;
}

double surrogate_v1(const SphereTables& t, const SphereCoeffs& x, const SphereRule& rule) {
  return surrogate_v1(synthesize(t, x), rule);
}

SphereCoeffs sample_coeffs(const PointFn& f, const PointFn& fhat, const SpherePerturbation& p, const SphereTables& t,
                           const SphereRule& rule) {
  check_rule(t, rule);
  if (p.d != t.d) fail(Err::InvalidArgument, "sphere data: perturbation dimension mismatch");
  Layout L(t);
  Radii R = perturbed_radii(p, rule, L.N);
  return coeffs_from_samples(
      t, rule, L, f(p.eps0), fhat(p.eps0_hat),
      [&](int n, std::size_t q) { return f(scaled(rule.nodes[q], R.r[n][q])); },
      [&](int n, std::size_t q) { return fhat(scaled(rule.nodes[q], R.rh[n][q])); });
}

HarmonicExpansion apply_T_sphere(const HarmonicExpansion& f, const SpherePerturbation& p, const SphereTables& t,
                                 const SphereRule& rule) {
  auto fv = [&](const Point& x) { return f.eval(x); };
  auto fh = [&](const Point& x) { return f.eval_hat(x); };
  return synthesize(t, sample_coeffs(fv, fh, p, t, rule));
}

// ---- budget ----

std::vector<double> kernel_norms(const SphereTables& t, int zonal_nodes) {
  const int d = t.d, N = t.N_max;
  std::vector<double> tz, wz;
  if (d == 3) {
    gl_nodes(zonal_nodes, tz, wz);
    for (auto& w : wz) w *= 0.5;
  } else {
    for (int j = 0; j < zonal_nodes; ++j) {
      tz.push_back(std::cos(pi * (j + 0.5) / zonal_nodes));
      wz.push_back(1.0 / zonal_nodes);
    }
  }
  const std::size_t Z = tz.size();
  std::vector<std::vector<double>> zr(t.M_max + 1, std::vector<double>(Z));
  for (int m = 0; m <= t.M_max; ++m)
    for (std::size_t j = 0; j < Z; ++j) zr[m][j] = dim_harmonic(d, m) * zonal_ratio(d, m, tz[j]);
  const auto& g = *t.grid;
  const double area = spaces::sphere_area(d);
  std::vector<double> out(N + 1, 0.0);
  parallel_for(static_cast<std::size_t>(N + 1), [&](std::size_t nn) {
    int n = static_cast<int>(nn);
    int m_top = n == 0 ? 0 : std::min(t.M_max, 4 * n + 1);
    double s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double r = g.r[i], zk = 0, zh = 0;
      std::vector<double> ca(m_top + 1), ct(m_top + 1);
      for (int m = 0; m <= m_top; ++m) {
        double sc = (m == 0 ? 1.0 : std::pow(static_cast<double>(n), -0.5 * m)) * std::pow(r, m);
        ca[m] = t.per_m[m].a[n][i] * sc;
        ct[m] = t.per_m[m].at[n][i] * sc;
      }
      for (std::size_t j = 0; j < Z; ++j) {
        double k = 0;
        cd kh = 0;
        for (int m = 0; m <= m_top; ++m) {
          k += ca[m] * zr[m][j];
          kh += ipow(-m) * ct[m] * zr[m][j];
        }
        zk += wz[j] * std::abs(k);
        zh += wz[j] * std::abs(kh);
      }
      s += g.w[i] * area * std::pow(r, d - 1) * (1 + r) * (zk + zh);
    }
    out[n] = s;
  });
  return out;
}

SphereBudget budget_sphere(const SpherePerturbation& p, const SphereTables& t) {
  if (p.d != t.d) fail(Err::InvalidArgument, "budget: perturbation dimension mismatch");
  SphereBudget b;
  b.kernel_norms = kernel_norms(t);
  b.norm_a0 = b.kernel_norms[0];
  const int N = t.N_max;
  auto expo = [&](int n) { return 10.0 * n + 2.5 * p.d + p.c5; };
  for (int n = 1; n <= std::min(4, N); ++n)
    b.fitted_C = std::max(b.fitted_C, b.kernel_norms[n] / std::pow(static_cast<double>(n), expo(n)));
  auto sig = [&](int n) { return n < static_cast<int>(p.sigma.size()) ? p.sigma[n] : 0.0; };
  double meas = sig(0) * b.norm_a0, ana = sig(0) * b.norm_a0;
  for (int n = 1; n <= N; ++n) {
    meas += sig(n) * b.kernel_norms[n];
    ana += sig(n) * b.fitted_C * std::pow(static_cast<double>(n), expo(n));
  }
  b.measured = 2 * pi * meas;
  b.analytic = 2 * pi * ana;
  return b;
}

HarnessReport uniqueness_harness(const PointFn& f, const PointFn& fhat, const SpherePerturbation& p,
                                 const SphereTables& t, const SphereRule& rule, int j_max, double tol,
                                 double r_check) {
  if (j_max < 1) fail(Err::InvalidArgument, "harness: j_max must be >= 1");
  check_rule(t, rule);
  HarnessReport rep;
  rep.budget = budget_sphere(p, t).measured;
  if (!(rep.budget < 1)) {
    std::ostringstream os;
    os << "harness: contraction budget " << rep.budget << " is not below 1";
    fail(Err::NotContracting, os.str());
  }
  Layout L(t);
  SpherePlan plan(p, t, rule);
  auto run = [&](const SphereCoeffs& D, std::vector<interp::IterLog>* log, bool* conv) {
    SphereCoeffs x = L.zeros();
    double prev = 0;
    for (int j = 1; j <= j_max; ++j) {
      SphereCoeffs Tx = plan.apply(x), dx = L.zeros();
      for (int h = 0; h < L.H; ++h)
        for (int n = 0; n <= L.N; ++n) {
          cd nc = D.c[h][n] + x.c[h][n] - Tx.c[h][n], nh = D.ch[h][n] + x.ch[h][n] - Tx.ch[h][n];
          dx.c[h][n] = nc - x.c[h][n];
          dx.ch[h][n] = nh - x.ch[h][n];
          x.c[h][n] = nc;
          x.ch[h][n] = nh;
        }
      interp::IterLog lg;
      lg.j = j;
      lg.diff = surrogate_v1(t, dx, rule);
      lg.ratio = (j >= 2 && prev > 0) ? lg.diff / prev : 0.0;
      if (log) log->push_back(lg);
      double xn = surrogate_v1(t, x, rule);
      if (lg.diff <= tol * std::max(xn, 1e-300) || xn == 0.0) {
        if (conv) *conv = true;
        break;
      }
      if (j >= 2 && lg.ratio > rep.budget + 0.05) {
        std::ostringstream os;
        os << "harness: Neumann ratio " << lg.ratio << " at step " << j << " exceeds the budget " << rep.budget;
        fail(Err::Stagnation, os.str());
      }
      prev = lg.diff;
    }
    return x;
  };
  SphereCoeffs D = sample_coeffs(f, fhat, p, t, rule);
  rep.x = run(D, &rep.log, &rep.converged);
  rep.zero_norm = surrogate_v1(t, run(L.zeros(), nullptr, nullptr), rule);

  HarmonicExpansion e = synthesize(t, rep.x);
  const auto& g = *t.grid;
  std::vector<double> errs(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t i) {
    double r = g.r[i];
    if (r > r_check) return;
    for (auto& z : rule.nodes) {
      Point x = scaled(z, r);
      errs[i] = std::max(errs[i], std::abs(e.eval(x) - f(x)));
    }
  });
  for (double v : errs) rep.error = std::max(rep.error, v);
  return rep;
}

}  // namespace fi::nonradial
