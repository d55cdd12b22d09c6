#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "basis.hpp"
#include "hup.hpp"
#include "interp.hpp"
#include "nonradial.hpp"
#include "spaces.hpp"

namespace fi::verify {

namespace {

using Clock = std::chrono::steady_clock;
using fi::HalfInt;

const std::vector<SuiteInfo> kSuites = {
    {"functional-equation", 1, "F(tau) - eps (tau/i)^-k F(-1/tau) against the two exponentials"},
    {"periodicity", 2, "F(tau + 2) = F(tau); coefficients independent of the extraction height"},
    {"kronecker", 3, "a_n(sqrt m) against delta_nm; one nonzero node value per b_n"},
    {"eigenfunction", 4, "radial transform of b^eps is eps b^eps"},
    {"interpolation", 5, "Gaussians rebuilt from their values at square roots"},
    {"realness", 6, "imaginary residue and rows below the start index"},
    {"decay", 7, "weighted sup dominated by the shape bound; positive exponential rate"},
    {"perturbed", 8, "Neumann reconstruction from perturbed nodes, d = 4"},
    {"nonradial", 9, "zonal reproducing identity, double series, perturbed spheres"},
    {"hup", 10, "hyperbola pipeline from perturbed cross data"},
    {"tables", 0, "saved coefficient tables: realness, start index, nodes"},
};

struct Ctx {
  const Options& o;
  std::vector<Check>& out;
  std::string suite;
  Clock::time_point last = Clock::now();

  double lap() {
    auto now = Clock::now();
    double s = std::chrono::duration<double>(now - last).count();
    last = now;
    return s;
  }
  void add(const std::string& name, double residual, double tol, const std::string& detail = "") {
    Check c;
    c.suite = suite;
    c.name = name;
    c.residual = residual;
    c.tol = tol * o.tol_scale;
    c.pass = std::isfinite(residual) && residual <= c.tol;
    c.detail = detail;
    c.seconds = lap();
    out.push_back(std::move(c));
  }
  // pass when residual > tol; used for rates that only need to be positive
  void add_lower(const std::string& name, double value, double bound, const std::string& detail = "") {
    Check c;
    c.suite = suite;
    c.name = name;
    c.residual = value;
    c.tol = bound;
    c.lower = true;
    c.pass = std::isfinite(value) && value > bound;
    c.detail = detail;
    c.seconds = lap();
    out.push_back(std::move(c));
  }
  void errored(const std::string& name, const std::string& msg) {
    Check c;
    c.suite = suite;
    c.name = name;
    c.errored = true;
    c.residual = NAN;
    c.detail = msg;
    c.seconds = lap();
    out.push_back(std::move(c));
  }
  bool full() const { return o.level == Level::Full; }
};

std::string describe(const std::exception& e) {
  if (auto* fe = dynamic_cast<const Error*>(&e)) return std::string(err_name(fe->code)) + ": " + fe->what();
  return e.what();
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::string kstr(HalfInt k) { return "k=" + k.str(); }

std::vector<double> linspace(double lo, double hi, double h) {
  std::vector<double> r;
  for (int i = 0; lo + i * h <= hi + 1e-12; ++i) r.push_back(lo + i * h);
  return r;
}

const std::vector<cd> kTaus = {{0.1, 1.3},  {-0.4, 1.05}, {0.3, 2.5},  {0.7, 0.9}, {-0.8, 0.75},
                               {0.5, 1.5},  {-0.2, 3.0},  {0.95, 0.5}, {-0.6, 1.2}, {0.15, 1.1}};

// ---- 1

void functional_equation(Ctx& c) {
  const std::vector<double> r = {0.0, 0.7, 1.0, std::sqrt(2.0), 2.3};
  for (int two_k = 1; two_k <= 5; ++two_k)
    for (int eps : {1, -1}) {
      HalfInt k{two_k};
      double worst = 0;
      for (cd tau : kTaus) {
        auto f = basis::F_semicircle(k, eps, tau, r);
        cd s = -1.0 / tau;
        auto g = basis::F_continued(k, eps, s, r);
        cd fac = double(eps) * std::exp(-k.value() * std::log(tau / I));
        for (std::size_t i = 0; i < r.size(); ++i) {
          double pr2 = pi * r[i] * r[i];
          cd want = std::exp(I * tau * pr2) - fac * std::exp(I * s * pr2);
          worst = std::max(worst, std::abs(f[i] - fac * g[i] - want) / (1 + std::abs(f[i])));
        }
      }
      c.add(kstr(k) + " eps=" + std::to_string(eps), worst, 1e-8, "5 radii x 10 points, relative to 1+|F|");
    }
}

// ---- 2

void periodicity(Ctx& c) {
  const std::vector<double> r = {0.0, 0.6, 1.3, 2.1};
  for (int two_k : {1, 2, 3, 4, 5}) {
    HalfInt k{two_k};
    double worst = 0;
    for (int eps : {1, -1})
      for (cd tau : kTaus) {
        auto f = basis::F_any(k, eps, tau, r);
        for (double shift : {2.0, -2.0}) {
          auto g = basis::F_any(k, eps, tau + shift, r);
          for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(f[i] - g[i]));
        }
      }
    c.add("shift by 2, " + kstr(k), worst, 1e-9);
  }
  // roundoff grows like e^{pi n y}, so only the first rows compare at two heights
  const int n_max = 2;
  auto rr = linspace(0, c.full() ? 4 : 2, 0.5);
  std::vector<int> ks = c.full() ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{1, 4};
  for (int two_k : ks)
    for (int eps : {1, -1}) {
      basis::HeightPolicy lo, hi;
      lo.kind = hi.kind = basis::HeightPolicy::Kind::Fixed;
      lo.y = 1.5;
      hi.y = 2.5;
      lo.oversample = hi.oversample = 64;
      auto a = basis::coefficients(HalfInt{two_k}, eps, rr, n_max, lo);
      auto b = basis::coefficients(HalfInt{two_k}, eps, rr, n_max, hi);
      double worst = 0;
      for (int n = 0; n <= n_max; ++n)
        for (std::size_t i = 0; i < rr.size(); ++i) worst = std::max(worst, std::abs(a.values[n][i] - b.values[n][i]));
      c.add("height 1.5 vs 2.5, " + kstr(HalfInt{two_k}) + " eps=" + std::to_string(eps), worst, 1e-8,
            "n <= 2");
    }
}

// ---- 3

basis::APair a_pair(HalfInt k, const std::vector<double>& r, int n_max) {
  return basis::assemble_a(basis::coefficients(k, 1, r, n_max), basis::coefficients(k, -1, r, n_max));
}

std::vector<double> sqrt_nodes(int m_max) {
  std::vector<double> r;
  for (int m = 0; m <= m_max; ++m) r.push_back(std::sqrt(double(m)));
  return r;
}

void kronecker(Ctx& c) {
  {
    const int N = 8;
    auto ap = a_pair(HalfInt{1}, sqrt_nodes(N), N);
    double all = 0, pos = 0, tilde = 0;
    int wn = 0, wm = 0;
    for (int n = 0; n <= N; ++n)
      for (int m = 0; m <= N; ++m) {
        double dev = std::abs(ap.a.values[n][m] - (n == m ? 1.0 : 0.0));
        if (dev > all) {
          all = dev;
          wn = n;
          wm = m;
        }
        if (m >= 1) {
          pos = std::max(pos, dev);
          tilde = std::max(tilde, std::abs(ap.atilde.values[n][m]));
        }
      }
    std::ostringstream d;
    d << "worst at n=" << wn << " m=" << wm;
    c.add("d=1 a_n(sqrt m), 0 <= n,m <= 8", all, 1e-6, d.str());
    c.add("d=1 a_n(sqrt m), m >= 1", pos, 1e-6);
    c.add("d=1 atilde_n(sqrt m), m >= 1", tilde, 1e-6);
  }
  // the b^eps rows: every value at the nodes vanishes except one
  const int n_max = 6, m_max = 12;
  for (int two_k : {2, 4})
    for (int sign : {1, -1}) {
      HalfInt k{two_k};
      auto t = basis::coefficients(k, sign, sqrt_nodes(m_max), n_max);
      for (int m_lo : {0, 1}) {
        double second = 0;
        std::string where;
        for (int n = 0; n <= n_max; ++n) {
          std::vector<std::pair<double, int>> v;
          for (int m = m_lo; m <= m_max; ++m) v.push_back({std::abs(t.values[n][m]), m});
          std::sort(v.begin(), v.end(), std::greater<>());
          if (v[1].first > second) {
            second = v[1].first;
            where = "second largest at n=" + std::to_string(n) + " m=" + std::to_string(v[1].second);
          }
        }
        std::string range = m_lo == 0 ? "0 <= m <= 12" : "1 <= m <= 12";
        c.add(kstr(k) + " eps=" + std::to_string(sign) + " b_n one nonzero node, n <= 6, " + range, second, 1e-6,
              where);
      }
    }
}

// ---- 4

void eigenfunction(Ctx& c) {
  std::vector<int> ds = c.full() ? std::vector<int>{1, 2, 4} : std::vector<int>{1, 4};
  const int n_max = 6;
  auto g = spaces::RadialGrid::panels(14);
  std::vector<double> rho;
  for (double x : g->r)
    if (x <= 6) rho.push_back(x);
  for (int d : ds)
    for (int eps : {1, -1}) {
      auto t = basis::coefficients(HalfInt{d}, eps, g->r, n_max);
      double worst = 0;
      for (int n = 0; n <= n_max; ++n) {
        std::vector<cd> v(t.values[n].begin(), t.values[n].end());
        auto h = spaces::hankel(d, *g, v, rho);
        for (std::size_t i = 0; i < rho.size(); ++i) worst = std::max(worst, std::abs(h[i] - double(eps) * v[i]));
      }
      c.add("d=" + std::to_string(d) + " eps=" + std::to_string(eps), worst, 1e-5, "n <= 6, r in [0, 6]");
    }
}

// ---- 5

void interpolation(Ctx& c) {
  const int n_max = c.full() ? 150 : 40;
  auto r = linspace(0, 3, c.full() ? 0.05 : 0.25);
  for (int d = 1; d <= 4; ++d) {
    auto ap = a_pair(HalfInt{d}, r, n_max);
    for (double t : {1.0, 1.3}) {
      double worst = 0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        double s = 0;
        for (int n = 0; n <= n_max; ++n)
          s += ap.a.values[n][i] * std::exp(-pi * t * n) +
               ap.atilde.values[n][i] * std::pow(t, -d / 2.0) * std::exp(-pi * n / t);
        worst = std::max(worst, std::abs(s - std::exp(-pi * t * r[i] * r[i])));
      }
      std::ostringstream nm;
      nm << "d=" << d << " t=" << t;
      c.add(nm.str(), worst, 1e-5, "n_max=" + std::to_string(n_max));
    }
  }
}

// ---- 6

void realness_of(Ctx& c, const basis::BasisTable& t, const std::string& label) {
  double im = t.meta.max_imag;
  for (auto& row : t.imag)
    for (double v : row) im = std::max(im, std::abs(v));
  c.add(label + " imaginary residue", im, 1e-9);
  if (t.kind == basis::TableKind::B) {
    int nu = basis::nu_of(t.k, -t.sign);  // b with label sign expand F^{-sign}
    double below = 0;
    for (int n = 0; n < nu && n <= t.n_max; ++n)
      for (double v : t.values[n]) below = std::max(below, std::abs(v));
    c.add(label + " rows n < " + std::to_string(nu), below, 1e-9);
  }
}

void realness(Ctx& c) {
  const int n_max = c.full() ? 30 : 10;
  auto r = linspace(0, 8, c.full() ? 0.1 : 0.25);
  std::vector<int> ks = c.full() ? std::vector<int>{1, 2, 3, 4, 5, 6, 8} : std::vector<int>{1, 2, 3, 4, 5};
  for (int two_k : ks)
    for (int eps : {1, -1}) {
      auto t = basis::coefficients(HalfInt{two_k}, eps, r, n_max);
      realness_of(c, t, kstr(HalfInt{two_k}) + " eps=" + std::to_string(eps));
    }
}

// ---- 7

void decay(Ctx& c) {
  const int n_max = c.full() ? 10 : 6;
  auto r = linspace(0, c.full() ? 40 : 12, c.full() ? 0.2 : 0.1);
  for (int two_k : {1, 2, 4}) {
    HalfInt k{two_k};
    auto p = basis::coefficients(k, 1, r, n_max), m = basis::coefficients(k, -1, r, n_max);
    for (double beta : {two_k + 2.0, two_k + 4.0}) {
      auto rep = basis::bound_report(k, beta, p, m);
      double ratio = 0;
      for (auto& row : rep.rows) ratio = std::max(ratio, row.sup_measured / (rep.fitted_constant * row.shape));
      std::ostringstream nm, det;
      nm << kstr(k) << " beta=" << beta;
      det << "C=" << rep.fitted_constant << " calibrated at n=" << rep.calibration_n;
      c.add(nm.str() + " dominated", ratio, 1.0, det.str());
      c.add_lower(nm.str() + " exponential rate", rep.min_rate, 0.0, "smallest fitted c over n");
    }
  }
}

// ---- shared d = 4 tables

const interp::InterpTables& tables4(int N) {
  static std::map<int, interp::InterpTables> cache;
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  auto g = spaces::RadialGrid::panels(std::sqrt(double(N)) + 6, 0.5, 1.0, 16, std::sqrt(double(N)) + 2);
  return cache.emplace(N, interp::InterpTables::build(4, N, g)).first->second;
}

double gauss(double r) { return std::exp(-pi * r * r); }

// ---- 8

void perturbed(Ctx& c) {
  const int N = c.full() ? 48 : 12;
  const auto& t = tables4(N);
  spaces::VsParams vp{1, 4};
  auto unit = interp::shaped_profile(4, 1, 0.5, 1.0, N + 1, 7);
  double ds = interp::delta_star(unit.eps, unit.eps_hat, unit, t, vp);
  auto p = unit;
  for (auto& v : p.eps) v *= ds / 2;
  for (auto& v : p.eps_hat) v *= ds / 2;
  p.delta = ds / 2;
  auto res = interp::reconstruct(interp::node_data_from(4, N, p, gauss, gauss), p, t, 60, 1e-13);
  c.add("budget at half the threshold", res.budget, 0.5, "delta*=" + num(ds));
  double excess = -res.budget;
  for (auto& l : res.log)
    if (l.j >= 2) excess = std::max(excess, l.ratio - res.budget);
  c.add("Neumann ratios over budget", excess, 0.05, std::to_string(res.log.size()) + " iterations");
  c.add("converged", res.converged ? 0.0 : 1.0, 0.0);
  double err = 0;
  for (std::size_t i = 0; i < t.grid->size(); ++i)
    if (t.grid->r[i] <= 3) err = std::max(err, std::abs(res.f.values[i] - gauss(t.grid->r[i])));
  c.add("Gaussian sup error on [0, 3]", err, 1e-4, "n_max=" + std::to_string(N));
}

// ---- 9

void nonradial_suite(Ctx& c) {
  using namespace nonradial;
  {
    const int d = 3, top = 6;
    auto rule = SphereRule::make(d, 2 * top);
    auto unit = [](double a, double b, double e) {
      double n = std::sqrt(a * a + b * b + e * e);
      return Point{a / n, b / n, e / n};
    };
    double worst = 0;
    for (auto [a, b] : {std::pair{unit(0.3, 0.4, -0.2), unit(-0.7, 0.1, 0.5)},
                        std::pair{unit(1, 0, 0), unit(0.2, 0.9, 0.1)}})
      for (int m = 0; m <= top; ++m)
        for (int mp = 0; mp <= top; ++mp) {
          double s = 0;
          for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            s += rule.w[q] * zonal_Z(d, m, a, rule.nodes[q]) * zonal_Z(d, mp, rule.nodes[q], b);
          worst = std::max(worst, std::abs(s - (m == mp ? zonal_Z(d, m, a, b) : 0.0)));
        }
    c.add("reproducing identity d=3, m <= 6", worst, 1e-8);
  }
  const int M = c.full() ? 6 : 2, N = c.full() ? 6 : 4;
  auto g = spaces::RadialGrid::panels(std::sqrt(double(N)) + 7, 0.5, 1.0, 16, std::sqrt(double(N)) + 2);
  auto T = SphereTables::build(3, M, N, g);
  auto rule = SphereRule::make(3, 3 * M + 8);
  auto r2 = [](const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; };
  // Gaussian times solid harmonics of degree 0, 1, 2; the transform multiplies by (-i)^m
  struct Target {
    const char* name;
    PointFn f, fh;
  };
  std::vector<Target> targets = {
      {"degree 0", [=](const Point& x) { return cd(std::exp(-pi * r2(x))); },
       [=](const Point& x) { return cd(std::exp(-pi * r2(x))); }},
      {"degree 1", [=](const Point& x) { return cd(std::exp(-pi * r2(x)) * x[2]); },
       [=](const Point& x) { return -I * std::exp(-pi * r2(x)) * x[2]; }},
      {"degree 2", [=](const Point& x) { return cd(std::exp(-pi * r2(x)) * x[0] * x[1]); },
       [=](const Point& x) { return cd(-std::exp(-pi * r2(x)) * x[0] * x[1]); }},
      {"degree 2 zonal", [=](const Point& x) { return cd(std::exp(-pi * r2(x)) * (2 * x[2] * x[2] - x[0] * x[0] - x[1] * x[1])); },
       [=](const Point& x) { return cd(-std::exp(-pi * r2(x)) * (2 * x[2] * x[2] - x[0] * x[0] - x[1] * x[1])); }},
  };
  for (auto& tg : targets) {
    double worst = 0;
    for (double r : {0.0, 0.4, 1.1, 2.0})
      for (Point dir : {Point{0.48, 0.6, 0.64}, Point{0.0, -0.6, 0.8}}) {
        Point x{dir[0] * r, dir[1] * r, dir[2] * r};
        auto s = double_series_eval(tg.f, tg.fh, x, T, rule, M, N, 1e-3);
        worst = std::max(worst, std::abs(s.value - tg.f(x)));
      }
    c.add(std::string("double series, Gaussian x ") + tg.name, worst, 1e-4);
  }
  auto unit_p = shaped_sphere_perturbation(3, 1.0, 0.0, N, 3);
  double b = budget_sphere(unit_p, T).measured;
  auto p = shaped_sphere_perturbation(3, 0.25 / b, 0.0, N, 3);
  auto rep = uniqueness_harness(targets[1].f, targets[1].fh, p, T, rule, 60, 1e-12, 3.0);
  c.add("perturbed sphere budget", rep.budget, 0.5);
  c.add("perturbed sphere reconstruction error", rep.error, 1e-3, rep.converged ? "converged" : "not converged");
  auto zero = [](const Point&) { return cd(0); };
  auto z = uniqueness_harness(zero, zero, p, T, rule, 60, 1e-12, 3.0);
  c.add("zero data reconstructs zero", std::max(z.error, z.zero_norm), 1e-12);
}

// ---- 10

void hup_suite(Ctx& c) {
  using namespace hup;
  const int N = c.full() ? 24 : 12;
  auto f = synthetic_profile(1.0);
  auto P = build_pipeline(f);
  double ag = 0;
  for (double r = 0; r <= 4.0 + 1e-12; r += 0.25) {
    double a = 0;
    phi_eval(P, r, &a);
    ag = std::max(ag, a);
  }
  c.add("Phi: two routes agree, r in [0, 4]", ag, 1e-7);
  {
    auto g = spaces::RadialGrid::panels(7, 0.5, 1, 16);
    std::vector<cd> vals;
    for (double r : g->r) vals.push_back(phi_eval(P, r));
    std::vector<double> rho;
    for (double x = 0.5; x <= 3.0 + 1e-12; x += 0.25) rho.push_back(x);
    auto H = spaces::hankel(4, *g, vals, rho);
    double worst = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) worst = std::max(worst, std::abs(H[i] - phi_hat_eval(P, rho[i])));
    c.add("transform of Phi against the 4-d radial transform", worst, 1e-5);
  }
  const auto& t = tables4(N);
  auto prof = shaped_cross_profile(1e-3, N);
  auto honest = hup_check(cross_data_from(P, prof, N), f, t);
  c.add("reconstruction from perturbed cross data", honest.discrepancy, 1e-3,
        std::string("verdict ") + verdict_name(honest.verdict));
  c.add("contraction budget", honest.budget, 1.0);
  auto zf = OddProfile::sample([](double) { return 0.0; });
  auto Z = build_pipeline(zf);
  auto rz = hup_check(cross_data_from(Z, prof, N), zf, t);
  c.add("zero data gives the zero function",
        std::max({rz.phi_rec_norm, rz.phi_direct_norm, rz.verdict == Verdict::Zero ? 0.0 : 1.0}), 1e-8,
        std::string("verdict ") + verdict_name(rz.verdict));
  auto forced = cross_data_from(P, prof, N);
  for (auto& v : forced.mu_x) v = 0;
  for (auto& v : forced.mu_y) v = 0;
  auto rf = hup_check(forced, f, t);
  c.add("zeroed data for a nonzero profile is flagged", rf.verdict == Verdict::Inconsistent ? 0.0 : 1.0, 0.0,
        std::string("verdict ") + verdict_name(rf.verdict));
}

// ---- saved tables

void tables_suite(Ctx& c) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (auto& e : fs::directory_iterator(c.o.table_dir))
    if (e.is_regular_file() && e.path().extension() != ".meta") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    c.errored("no tables", "no table files in '" + c.o.table_dir + "'");
    return;
  }
  for (auto& path : files) {
    std::string label = path.filename().string();
    try {
      auto t = basis::read_table(path.string());
      double bad = 0;
      for (auto& row : t.values)
        for (double v : row)
          if (!std::isfinite(v)) bad = INFINITY;
      c.add(label + " finite", bad, 0.0);
      realness_of(c, t, label);
      // radii that are square roots of positive integers are nodes
      double dev = 0;
      int nodes = 0;
      int lo = t.kind == basis::TableKind::B ? basis::nu_of(t.k, -t.sign) : 0;
      for (std::size_t i = 0; i < t.r.size(); ++i) {
        double m = std::round(t.r[i] * t.r[i]);
        if (m < 1 || std::abs(t.r[i] - std::sqrt(m)) > 1e-12) continue;
        ++nodes;
        for (int n = lo; n <= t.n_max; ++n) {
          double want = t.kind == basis::TableKind::ATilde ? 0.0 : (n == int(m) ? 1.0 : 0.0);
          dev = std::max(dev, std::abs(t.values[n][i] - want));
        }
      }
      if (nodes > 0) c.add(label + " values at " + std::to_string(nodes) + " nodes", dev, 1e-6);
    } catch (const std::exception& e) {
      c.errored(label, describe(e));
    }
  }
}

void run_suite(const std::string& name, Ctx& c) {
  if (name == "functional-equation") return functional_equation(c);
  if (name == "periodicity") return periodicity(c);
  if (name == "kronecker") return kronecker(c);
  if (name == "eigenfunction") return eigenfunction(c);
  if (name == "interpolation") return interpolation(c);
  if (name == "realness") return realness(c);
  if (name == "decay") return decay(c);
  if (name == "perturbed") return perturbed(c);
  if (name == "nonradial") return nonradial_suite(c);
  if (name == "hup") return hup_suite(c);
  if (name == "tables") return tables_suite(c);
}

}  // namespace

const std::vector<SuiteInfo>& suites() { return kSuites; }

std::vector<std::string> select(const Options& o) {
  if (!(o.tol_scale > 0) || !std::isfinite(o.tol_scale)) fail(Err::InvalidArgument, "tol_scale must be positive");
  std::vector<std::string> out;
  if (o.filter.empty()) {
    for (auto& s : kSuites)
      if (std::string(s.name) != "tables" || !o.table_dir.empty()) out.push_back(s.name);
  } else {
    std::stringstream ss(o.filter);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      auto it = std::find_if(kSuites.begin(), kSuites.end(), [&](const SuiteInfo& s) { return item == s.name; });
      if (it == kSuites.end()) fail(Err::InvalidArgument, "unknown suite '" + item + "'");
      if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
    }
    if (out.empty()) fail(Err::InvalidArgument, "empty suite list");
  }
  bool wants_tables = std::find(out.begin(), out.end(), "tables") != out.end();
  if (wants_tables) {
    if (o.table_dir.empty()) fail(Err::InvalidArgument, "suite 'tables' needs a table directory");
    if (!std::filesystem::is_directory(o.table_dir))
      fail(Err::InvalidArgument, "'" + o.table_dir + "' is not a directory");
  }
  return out;
}

std::vector<Check> run(const Options& o) {
  auto names = select(o);
  std::vector<Check> out;
  for (auto& name : names) {
    Ctx c{o, out, name};
    try {
      run_suite(name, c);
    } catch (const std::exception& e) {
      c.errored("suite aborted", describe(e));
    }
  }
  return out;
}

}  // namespace fi::verify
