#include "quad.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <limits>
#include <queue>

namespace fi::quad {

const GK21& GK21::get() {
  static const GK21 rule = [] {
    using K = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const auto& ax = K::abscissa();
    const auto& kw = K::weights();
    const auto& gw = G::weights();
    GK21 r;
    // index 0 is the centre; odd indices are shared with the Gauss rule
    r.x[10] = 0.0;
    r.wk[10] = kw[0];
    r.wg[10] = 0.0;
    for (std::size_t i = 1; i < ax.size(); ++i) {
      double g = (i % 2 == 1) ? gw[i / 2] : 0.0;
      r.x[10 + i] = ax[i];
      r.x[10 - i] = -ax[i];
      r.wk[10 + i] = r.wk[10 - i] = kw[i];
      r.wg[10 + i] = r.wg[10 - i] = g;
    }
    return r;
  }();
  return rule;
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> g(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  if (n < 1) fail(Err::InvalidArgument, "gauss_legendre: n must be positive");
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  auto r = std::make_unique<GaussRule>();
  r->x.resize(n);
  r->w.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &r->x[i], &r->w[i], t);
  gsl_integration_glfixed_table_free(t);
  // ascending order
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return r->x[a] < r->x[b]; });
  GaussRule s;
  for (int i : idx) {
    s.x.push_back(r->x[i]);
    s.w.push_back(r->w[i]);
  }
  *r = s;
  auto& ref = *r;
  cache[n] = std::move(r);
  return ref;
}

namespace {

struct Piece {
  double a, b, err;
  std::vector<cd> val;
  double mass = 0;  // max over components of the integral of |f|
};

void eval_piece(const VecIntegrand& f, std::size_t dim, Piece& p, std::vector<cd>& buf, long& evals) {
  const GK21& r = GK21::get();
  double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
  std::vector<cd> g(dim, 0.0);
  std::vector<double> m(dim, 0.0);
  p.val.assign(dim, 0.0);
  for (int i = 0; i < 21; ++i) {
    f(c + h * r.x[i], buf.data());
    ++evals;
    for (std::size_t d = 0; d < dim; ++d) {
      p.val[d] += r.wk[i] * buf[d];
      m[d] += r.wk[i] * std::abs(buf[d]);
      if (r.wg[i] != 0.0) g[d] += r.wg[i] * buf[d];
    }
  }
  double e = 0;
  for (std::size_t d = 0; d < dim; ++d) {
    p.val[d] *= h;
    g[d] *= h;
    e = std::max(e, std::abs(p.val[d] - g[d]));
    p.mass = std::max(p.mass, h * m[d]);
  }
  p.err = e;
}

}  // namespace

VecResult adaptive(const VecIntegrand& f, const std::vector<double>& breaks, std::size_t dim,
                   double abs_tol, double rel_tol, int max_intervals) {
  if (breaks.size() < 2) fail(Err::InvalidArgument, "adaptive: need at least one interval");
  std::vector<cd> buf(dim);
  std::vector<Piece> pieces;
  VecResult res;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Piece p{breaks[i], breaks[i + 1], 0, {}, 0};
    eval_piece(f, dim, p, buf, res.evals);
    pieces.push_back(std::move(p));
  }
  auto cmp = [&](std::size_t x, std::size_t y) { return pieces[x].err < pieces[y].err; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i < pieces.size(); ++i) heap.push(i);

  std::vector<cd> sum(dim, 0.0);
  double err = 0, mass = 0;
  for (auto& p : pieces) {
    err += p.err;
    mass += p.mass;
    for (std::size_t d = 0; d < dim; ++d) sum[d] += p.val[d];
  }
  auto scale_of = [&] {
    double s = 0;
    for (auto& v : sum) s = std::max(s, std::abs(v));
    return s;
  };
  // cancellation: nothing below a few ulps of the integral of |f| is attainable
  constexpr double roundoff = 64 * std::numeric_limits<double>::epsilon();
  auto tol = [&](double sc) { return std::max({abs_tol, rel_tol * sc, roundoff * mass}); };
  double scale = scale_of();
  while (err > tol(scale)) {
    if (static_cast<int>(pieces.size()) >= max_intervals) break;
    std::size_t w = heap.top();
    heap.pop();
    double m = 0.5 * (pieces[w].a + pieces[w].b);
    if (!(m > pieces[w].a && m < pieces[w].b)) break;  // interval exhausted in double
    err -= pieces[w].err;
    mass -= pieces[w].mass;
    for (std::size_t d = 0; d < dim; ++d) sum[d] -= pieces[w].val[d];
    Piece right{m, pieces[w].b, 0, {}, 0};
    pieces[w].b = m;
    eval_piece(f, dim, pieces[w], buf, res.evals);
    eval_piece(f, dim, right, buf, res.evals);
    err += pieces[w].err + right.err;
    mass += pieces[w].mass + right.mass;
    for (std::size_t d = 0; d < dim; ++d) sum[d] += pieces[w].val[d] + right.val[d];
    pieces.push_back(std::move(right));
    heap.push(w);
    heap.push(pieces.size() - 1);
    if (err < 0) err = 0;
    scale = scale_of();
  }
  // sum in left-endpoint order for reproducibility
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  res.value.assign(dim, 0.0);
  err = 0;
  mass = 0;
  for (auto& p : pieces) {
    err += p.err;
    mass += p.mass;
    for (std::size_t d = 0; d < dim; ++d) res.value[d] += p.val[d];
  }
  scale = 0;
  for (auto& v : res.value) scale = std::max(scale, std::abs(v));
  res.err = err;
  res.intervals = static_cast<int>(pieces.size());
  res.converged = err <= tol(scale);
  return res;
}

}  // namespace fi::quad
