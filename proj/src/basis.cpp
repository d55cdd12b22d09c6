#include "basis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "quad.hpp"
#include "textio.hpp"

namespace fi::basis {

using modular::HalfPlanePoint;
using modular::KernelLogs;

NuMu nu_mu(HalfInt k) {
  if (k.two_k < 1) fail(Err::InvalidArgument, "nu_mu: k must be a positive half-integer");
  NuMu r;
  r.k = k;
  // (k+2)/4 = (2k+4)/8 and (k+4)/4 = (2k+8)/8
  r.nu_minus = (k.two_k + 4) / 8;
  r.mu_minus = -double((k.two_k + 4) % 8) / 8.0;
  r.nu_plus = (k.two_k + 8) / 8;
  r.mu_plus = -double((k.two_k + 8) % 8) / 8.0;
  return r;
}

int nu_of(HalfInt k, int eps) {
  NuMu m = nu_mu(k);
  return eps > 0 ? m.nu_plus : m.nu_minus;
}

cd kernel_from_logs(HalfInt k, int eps, const KernelLogs& t, const KernelLogs& z) {
  const int nu = nu_of(k, eps);
  const double tk = k.two_k;
  // log(J(z) - J(tau)), factoring out the larger of the two so deep cusps do not overflow
  const cd dl = z.lJ - t.lJ;
  const bool z_big = dl.real() > 0;
  cd em = z_big ? -modular::expm1c(-dl) : modular::expm1c(dl);
  if (std::abs(em) < 1e-12) fail(Err::PoleProximity, "kernel: J(z) and J(tau) coincide to 1e-12");
  cd ldiff = (z_big ? z.lJ : t.lJ) + std::log(em);
  cd lg = double(nu) * z.lJ + (4.0 - tk) * z.l3 + tk * t.l3 + double(1 - nu) * t.lJ - ldiff;
  lg += eps > 0 ? z.lJm : t.lJm;
  return -std::exp(lg);
}

cd kernel_K(HalfInt k, int eps, const HalfPlanePoint& tau, const HalfPlanePoint& z) {
  return kernel_from_logs(k, eps, modular::kernel_logs(tau.z()), modular::kernel_logs(z.z()));
}

ContourDistances contour_distances(cd tau) {
  double x = tau.real(), y = tau.imag();
  if (std::abs(x) <= 0.5 || y >= 0.8) return {std::abs(tau) - 1.0, 1.0 - std::abs(x)};
  // near a cusp: w = -1/(tau -+ 1) maps D to a vertical strip of width 1/2,
  // the circle to |Re w| = 1/2 and the line Re z = +-1 to Re w = 0
  double s = x > 0 ? 1.0 : -1.0;
  cd w = -1.0 / (tau - s);
  return {0.5 - std::abs(w.real()), std::abs(w.real())};
}

namespace {

// out[c] = base * exp(i z pr2[c]), pr2 = pi r^2; terms below 1e-30 |base| are dropped
// without evaluating them, which is most of the work at large r
inline void add_phi(cd base, cd z, const std::vector<double>& pr2, cd* out) {
  if (base == 0.0) {
    std::fill(out, out + pr2.size(), cd(0.0));
    return;
  }
  const double x = z.real(), y = z.imag();
  const double cut = y > 0 ? 69.0 / y : INFINITY;
  for (std::size_t c = 0; c < pr2.size(); ++c) {
    double a = pr2[c];
    if (a > cut) {
      out[c] = 0.0;
      continue;
    }
    double m = std::exp(-y * a);
    out[c] = base * cd(m * std::cos(x * a), m * std::sin(x * a));
  }
}

std::vector<double> pi_r2(const std::vector<double>& r) {
  std::vector<double> p(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] >= 0) || !std::isfinite(r[i])) fail(Err::InvalidArgument, "radius must be finite and >= 0");
    p[i] = pi * r[i] * r[i];
  }
  return p;
}

// sin(pi r^2) with the integer part of r^2 removed first
double sin_pi_r2(double r) {
  double s = r * r;
  double n = std::round(s);
  double v = std::sin(pi * (s - n));
  return std::fmod(n, 2.0) != 0.0 ? -v : v;
}

void finish(const quad::VecResult& res, const QuadConfig& q, QuadInfo* info, const char* rep) {
  if (info) {
    info->err = res.err;
    info->intervals = res.intervals;
    info->evals = res.evals;
    info->converged = res.converged;
    info->rep = rep;
  }
  if (!res.converged && res.err > q.target) {
    std::ostringstream os;
    os << rep << " quadrature: error estimate " << res.err << " above target " << q.target;
    fail(Err::AccuracyNotReached, os.str());
  }
}

// geometric breakpoints around a near-pole at parameter c, distance dist off the contour;
// without them the adaptive rule can step over the spike and still report a tiny error
void cluster(std::vector<double>& br, double c, double dist, double lo, double hi) {
  double h = std::max(dist, 1e-14);
  for (double s = h; s < hi - lo; s *= 2)
    for (double v : {c - s, c + s})
      if (v > lo && v < hi) br.push_back(v);
  if (c > lo && c < hi) br.push_back(c);
}

void sort_unique(std::vector<double>& br) {
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
}

// -1/2 int_0^pi K(tau, e^{ia}) phi_r(e^{ia}) i e^{ia} da
quad::VecResult semicircle_integral(HalfInt k, int eps, cd tau, const std::vector<double>& pr2,
                                    const QuadConfig& q) {
  KernelLogs tl = modular::kernel_logs(tau);
  auto f = [&](double a, cd* out) {
    cd z(std::cos(a), std::sin(a));
    cd K = kernel_from_logs(k, eps, tl, modular::kernel_logs(z));
    add_phi(-0.5 * K * I * z, z, pr2, out);
  };
  std::vector<double> br;
  for (int i = 0; i <= 16; ++i) br.push_back(pi * i / 16.0);
  // poles sit near tau/|tau| and its mirror -conj(tau)/|tau| on the circle
  double a0 = std::arg(tau), dist = std::abs(std::abs(tau) - 1.0);
  if (dist < 0.5) {
    cluster(br, a0, dist, 0.0, pi);
    cluster(br, pi - a0, dist, 0.0, pi);
    sort_unique(br);
  }
  return quad::adaptive(f, br, pr2.size(), q.abs_tol, q.rel_tol, q.max_intervals);
}

}  // namespace

std::vector<cd> F_semicircle(HalfInt k, int eps, cd tau, const std::vector<double>& r, const QuadConfig& q,
                             QuadInfo* info) {
  if (eps != 1 && eps != -1) fail(Err::InvalidArgument, "eps must be +1 or -1");
  if (!(tau.imag() > 0)) fail(Err::InvalidArgument, "tau must lie in the upper half-plane");
  if (std::norm(tau) < 1.0 - 1e-12 || std::abs(tau.real()) > 1.0 + 1e-12)
    fail(Err::InvalidArgument, "F_semicircle: tau must lie in the closed fundamental domain");
  ContourDistances d = contour_distances(tau);
  if (d.to_circle < q.standoff) fail(Err::PoleProximity, "F_semicircle: tau too close to the semicircle");
  auto pr2 = pi_r2(r);
  auto res = semicircle_integral(k, eps, tau, pr2, q);
  finish(res, q, info, "semicircle");
  return res.value;
}

std::vector<cd> F_continued(HalfInt k, int eps, cd sigma, const std::vector<double>& r, const QuadConfig& q,
                            QuadInfo* info) {
  if (eps != 1 && eps != -1) fail(Err::InvalidArgument, "eps must be +1 or -1");
  if (!(sigma.imag() > 0) || std::norm(sigma) >= 1.0)
    fail(Err::InvalidArgument, "F_continued: sigma must lie inside the unit half-disk");
  if (contour_distances(-1.0 / sigma).to_circle < q.standoff)
    fail(Err::PoleProximity, "F_continued: sigma too close to the semicircle");
  auto pr2 = pi_r2(r);
  auto res = semicircle_integral(k, eps, sigma, pr2, q);
  finish(res, q, info, "continued");
  cd fac = double(eps) * std::exp(-k.value() * std::log(sigma / I));
  cd w = -1.0 / sigma;
  std::vector<cd> out = res.value;
  for (std::size_t c = 0; c < r.size(); ++c)
    out[c] += std::exp(I * sigma * pr2[c]) - fac * std::exp(I * w * pr2[c]);
  return out;
}

std::vector<cd> F_shifted(HalfInt k, int eps, cd tau, const std::vector<double>& r, double y, const QuadConfig& q,
                          QuadInfo* info) {
  if (eps != 1 && eps != -1) fail(Err::InvalidArgument, "eps must be +1 or -1");
  if (!(tau.imag() > 0)) fail(Err::InvalidArgument, "tau must lie in the upper half-plane");
  if (std::norm(tau) < 1.0 - 1e-12 || std::abs(tau.real()) > 1.0 + 1e-12)
    fail(Err::InvalidArgument, "F_shifted: tau must lie in the closed fundamental domain");
  if (!(y > std::max(tau.imag(), 1.0))) fail(Err::InvalidArgument, "F_shifted: need y > max(Im tau, 1)");
  ContourDistances d = contour_distances(tau);
  if (d.to_lines < q.standoff || y - tau.imag() < q.standoff)
    fail(Err::PoleProximity, "F_shifted: tau too close to the shifted contour");
  auto pr2 = pi_r2(r);
  std::vector<double> sn(r.size());
  for (std::size_t c = 0; c < r.size(); ++c) sn[c] = sin_pi_r2(r[c]);
  KernelLogs tl = modular::kernel_logs(tau);
  const std::size_t nr = r.size();
  auto f = [&](double u, cd* out) {
    if (u < y) {
      cd z(1.0, u);
      cd K = kernel_from_logs(k, eps, tl, modular::kernel_logs(z));
      if (K == 0.0) {
        std::fill(out, out + nr, cd(0.0));
        return;
      }
      for (std::size_t c = 0; c < nr; ++c) out[c] = K * (sn[c] * std::exp(-u * pr2[c]));
    } else {
      cd z(u - y - 1.0, y);
      cd K = kernel_from_logs(k, eps, tl, modular::kernel_logs(z));
      add_phi(0.5 * K, z, pr2, out);
    }
  };
  std::vector<double> br = {0.0, y / 16, y / 8, y / 4, y / 2, y, y + 0.25, y + 0.5, y + 1.0, y + 1.5, y + 1.75, y + 2.0};
  // pole near the vertical lines at height Im tau
  double dist = 1.0 - std::abs(tau.real());
  if (dist < 0.5) {
    cluster(br, tau.imag(), dist, 0.0, y);
    sort_unique(br);
  }
  auto res = quad::adaptive(f, br, nr, q.abs_tol, q.rel_tol, q.max_intervals);
  finish(res, q, info, "shifted");
  std::vector<cd> out = res.value;
  for (std::size_t c = 0; c < nr; ++c) out[c] += std::exp(I * tau * pr2[c]);
  return out;
}

std::vector<cd> F_any(HalfInt k, int eps, cd tau, const std::vector<double>& r, const QuadConfig& q,
                      QuadInfo* info) {
  if (eps != 1 && eps != -1) fail(Err::InvalidArgument, "eps must be +1 or -1");
  modular::ReductionResult red = modular::reduce_to_fd(HalfPlanePoint(tau));
  auto pr2 = pi_r2(r);
  std::vector<cd> acc(r.size(), 0.0);
  cd fac = 1.0;
  cd cur = tau;
  // F(t) = phi(t) - eps (t/i)^{-k} phi(-1/t) + eps (t/i)^{-k} F(-1/t)
  for (modular::Letter l : red.word) {
    if (l == modular::Letter::T2) {
      cur += 2.0;
    } else if (l == modular::Letter::Tm2) {
      cur -= 2.0;
    } else {
      cd f = double(eps) * std::exp(-k.value() * std::log(cur / I));
      cd w = -1.0 / cur;
      for (std::size_t c = 0; c < r.size(); ++c)
        acc[c] += fac * (std::exp(I * cur * pr2[c]) - f * std::exp(I * w * pr2[c]));
      fac *= f;
      cur = w;
    }
  }
  ContourDistances d = contour_distances(cur);
  std::vector<cd> base;
  if (d.to_circle >= d.to_lines)
    base = F_semicircle(k, eps, cur, r, q, info);
  else
    base = F_shifted(k, eps, cur, r, std::max(cur.imag(), 1.0) + 0.5, q, info);
  for (std::size_t c = 0; c < r.size(); ++c) acc[c] += fac * base[c];
  return acc;
}

cd F_eval(HalfInt k, int eps, const HalfPlanePoint& tau, double r, const QuadConfig& q, QuadInfo* info) {
  return F_semicircle(k, eps, tau.z(), {r}, q, info)[0];
}

cd F_eval_shifted(HalfInt k, int eps, const HalfPlanePoint& tau, double r, double y, const QuadConfig& q,
                  QuadInfo* info) {
  return F_shifted(k, eps, tau.z(), {r}, y, q, info)[0];
}

double BasisTable::y_header() const { return meta.blocks.empty() ? 0.0 : meta.blocks.back().y; }

namespace {

std::mutex fftw_mu;

std::vector<Block> plan_blocks(int n_max, const HeightPolicy& h) {
  std::vector<Block> out;
  auto M_for = [&](int top) {
    int M = h.oversample * (top + 1);
    if (M % 2) ++M;
    return std::max(M, 16);
  };
  if (h.kind == HeightPolicy::Kind::Fixed) {
    if (!(h.y > 0)) fail(Err::InvalidArgument, "fixed height must be positive");
    out.push_back({0, n_max, h.y, M_for(n_max)});
    return out;
  }
  // one height per doubling block keeps the amplification e^{pi n y} below e^pi
  int lo = 0, top = std::min(n_max, 4);
  for (;;) {
    out.push_back({lo, top, 1.0 / std::max(top, 2), M_for(top)});
    if (top >= n_max) break;
    lo = top + 1;
    top = std::min(n_max, 2 * top);
  }
  return out;
}

BasisTable coefficients_once(HalfInt k, int sign, const std::vector<double>& r, int n_max, const HeightPolicy& h,
                             const QuadConfig& q) {
  if (sign != 1 && sign != -1) fail(Err::InvalidArgument, "coefficients: sign must be +1 or -1");
  if (n_max < 0) fail(Err::InvalidArgument, "coefficients: n_max must be >= 0");
  if (r.empty()) fail(Err::InvalidArgument, "coefficients: empty radial grid");
  if (h.oversample < 8) fail(Err::InvalidArgument, "coefficients: oversample must be >= 8");
  pi_r2(r);  // validates radii
  BasisTable t;
  t.k = k;
  t.sign = sign;
  t.kind = TableKind::B;
  t.n_max = n_max;
  t.r = r;
  t.values.assign(n_max + 1, std::vector<double>(r.size(), 0.0));
  t.imag.assign(n_max + 1, std::vector<double>(r.size(), 0.0));
  t.meta.blocks = plan_blocks(n_max, h);
  t.meta.rel_tol = q.rel_tol;
  t.meta.oversample = h.oversample;
  t.meta.policy = h.kind == HeightPolicy::Kind::Auto ? "auto" : "fixed";
  const int eps = -sign;  // the b with label sign are the coefficients of F^{-sign}
  const std::size_t nr = r.size();
  double top_ratio = 0;
  std::vector<double> alias;
  for (const Block& b : t.meta.blocks) {
    const int M = b.M;
    std::vector<cd> F(static_cast<std::size_t>(M) * nr);
    std::vector<double> errs(M, 0.0);
    std::vector<long> evals(M, 0);
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t j) {
      double x = -1.0 + 2.0 * double(j) / M;
      QuadInfo info;
      auto v = F_any(k, eps, cd(x, b.y), r, q, &info);
      std::copy(v.begin(), v.end(), F.begin() + j * nr);
      errs[j] = info.err;
      evals[j] = info.evals;
    });
    for (int j = 0; j < M; ++j) {
      t.meta.max_quad_err = std::max(t.meta.max_quad_err, errs[j]);
      t.meta.F_evals += evals[j];
    }
    std::vector<cd> out(F.size());
    {
      std::lock_guard<std::mutex> g(fftw_mu);
      int n = M;
      fftw_plan p = fftw_plan_many_dft(1, &n, static_cast<int>(nr), reinterpret_cast<fftw_complex*>(F.data()),
                                       nullptr, static_cast<int>(nr), 1, reinterpret_cast<fftw_complex*>(out.data()),
                                       nullptr, static_cast<int>(nr), 1, FFTW_FORWARD, FFTW_ESTIMATE);
      fftw_execute(p);
      fftw_destroy_plan(p);
    }
    // c_n = e^{pi n y} (-1)^n (1/M) sum_j F_j e^{-2 pi i n j / M}
    for (int n = b.n_lo; n <= b.n_hi; ++n) {
      double s = std::exp(pi * n * b.y) / M * (n % 2 ? -1.0 : 1.0);
      for (std::size_t c = 0; c < nr; ++c) {
        cd v = s * out[static_cast<std::size_t>(n) * nr + c];
        t.values[n][c] = v.real();
        t.imag[n][c] = v.imag();
        t.meta.max_imag = std::max(t.meta.max_imag, std::abs(v.imag()));
      }
    }
    // aliasing probe: top-quarter bins, amplified to the highest index this block keeps;
    // judged against the scale of the whole table once all blocks are in
    double top = 0;
    for (int n = 3 * M / 8; n <= M / 2; ++n)
      for (std::size_t c = 0; c < nr; ++c) top = std::max(top, std::abs(out[static_cast<std::size_t>(n) * nr + c]));
    alias.push_back(top * std::exp(pi * b.n_hi * b.y) / M);
  }
  double scale = 0;
  for (int n = 0; n <= n_max; ++n)
    for (std::size_t c = 0; c < nr; ++c) scale = std::max(scale, std::abs(t.values[n][c]));
  for (std::size_t i = 0; i < alias.size(); ++i) {
    double ratio = scale > 0 ? alias[i] / scale : 0.0;
    top_ratio = std::max(top_ratio, ratio);
    if (ratio > 1e-5) {
      const Block& b = t.meta.blocks[i];
      std::ostringstream os;
      os << "coefficients: top-quarter transform magnitude ratio " << ratio << " at y = " << b.y << " (block "
         << b.n_lo << ".." << b.n_hi << ")";
      fail(Err::AliasingSuspected, os.str());
    }
  }
  t.meta.alias_ratio = top_ratio;
  return t;
}

}  // namespace

BasisTable coefficients(HalfInt k, int sign, const std::vector<double>& r, int n_max, const HeightPolicy& h,
                        const QuadConfig& q) {
  if (h.kind == HeightPolicy::Kind::Fixed) return coefficients_once(k, sign, r, n_max, h, q);
  // larger k needs finer sampling on the line; the automatic policy doubles until the probe is quiet
  HeightPolicy cur = h;
  for (;;) {
    try {
      return coefficients_once(k, sign, r, n_max, cur, q);
    } catch (const Error& e) {
      if (e.code != Err::AliasingSuspected || cur.oversample >= kMaxOversample) throw;
      cur.oversample *= 2;
    }
  }
}

APair assemble_a(const BasisTable& plus, const BasisTable& minus) {
  if (plus.kind != TableKind::B || minus.kind != TableKind::B || plus.sign != 1 || minus.sign != -1)
    fail(Err::InvalidArgument, "assemble_a: need a b+ table and a b- table");
  if (plus.k.two_k != minus.k.two_k || plus.n_max != minus.n_max || plus.r != minus.r)
    fail(Err::GridMismatch, "assemble_a: tables differ in k, n_max or radial grid");
  APair p;
  p.a = plus;
  p.atilde = plus;
  p.a.kind = TableKind::A;
  p.atilde.kind = TableKind::ATilde;
  // below nu_-(k) both combinations vanish identically; the extraction leaves roundoff there
  const int lo = nu_of(plus.k, -1);
  for (int n = 0; n <= plus.n_max; ++n)
    for (std::size_t c = 0; c < plus.r.size(); ++c) {
      bool dead = n < lo;
      p.a.values[n][c] = dead ? 0.0 : 0.5 * (plus.values[n][c] + minus.values[n][c]);
      p.atilde.values[n][c] = dead ? 0.0 : 0.5 * (plus.values[n][c] - minus.values[n][c]);
      p.a.imag[n][c] = p.atilde.imag[n][c] = 0.0;
    }
  p.a.meta.max_imag = p.atilde.meta.max_imag = std::max(plus.meta.max_imag, minus.meta.max_imag);
  return p;
}

std::vector<double> default_r_grid(int points, double rmax) {
  if (points < 2 || !(rmax > 0)) fail(Err::InvalidArgument, "default_r_grid: need >= 2 points and rmax > 0");
  std::vector<double> r(points);
  for (int i = 0; i < points; ++i) {
    double s = double(i) / (points - 1);
    r[i] = rmax * s * s;
  }
  return r;
}

double g_tilde(double beta) { return std::max(1.0, std::pow(beta / (2 * pi * std::exp(1.0)), beta / 2)); }

double bound_shape(HalfInt k, double beta, int n) {
  return std::pow(1.0 + n, beta / 2 + k.value() + 1) * std::tgamma(beta / 2 - k.value() + 1) * g_tilde(beta);
}

namespace {

// least-squares slope of log(envelope) against r / sqrt(n+1) beyond the peak
double fit_rate(const std::vector<double>& r, const std::vector<double>& b, int n) {
  std::size_t N = r.size();
  double peak = 0;
  std::size_t ip = 0;
  for (std::size_t i = 0; i < N; ++i)
    if (std::abs(b[i]) > peak) {
      peak = std::abs(b[i]);
      ip = i;
    }
  if (peak == 0) return NAN;
  std::vector<double> env(N);
  double m = 0;
  for (std::size_t i = N; i-- > 0;) {
    m = std::max(m, std::abs(b[i]));
    env[i] = m;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  double s = std::sqrt(n + 1.0);
  for (std::size_t i = ip; i < N; ++i) {
    if (r[i] < r[ip] + 1.0 || env[i] < 1e-12 * peak) continue;
    double x = r[i] / s, y = std::log(env[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 5) return NAN;
  double den = cnt * sxx - sx * sx;
  if (den <= 0) return NAN;
  return -(cnt * sxy - sx * sy) / den;
}

}  // namespace

BoundReport bound_report(HalfInt k, double beta, const BasisTable& plus, const BasisTable& minus) {
  if (beta < 2 * k.value() + 2) fail(Err::InvalidArgument, "bound_report: need beta >= 2k+2");
  if (plus.r != minus.r || plus.n_max != minus.n_max || plus.k.two_k != k.two_k || minus.k.two_k != k.two_k)
    fail(Err::GridMismatch, "bound_report: tables do not match");
  BoundReport rep;
  rep.k = k;
  rep.beta = beta;
  rep.g_tilde = g_tilde(beta);
  const auto& r = plus.r;
  rep.min_rate = INFINITY;
  for (int n = 0; n <= plus.n_max; ++n) {
    BoundRow row;
    row.n = n;
    row.shape = bound_shape(k, beta, n);
    std::size_t arg = 0;
    double last = 0;
    for (std::size_t c = 0; c < r.size(); ++c) {
      double v = (1 + std::pow(r[c], beta)) * std::max(std::abs(plus.values[n][c]), std::abs(minus.values[n][c]));
      if (v > row.sup_measured) {
        row.sup_measured = v;
        arg = c;
      }
      last = v;
    }
    if (row.sup_measured > 0 && arg + 1 == r.size() && last > 1e-3 * row.sup_measured)
      fail(Err::GridTooShort, "bound_report: (1+r^beta)|b| peaks at the end of the grid for n = " + std::to_string(n));
    // rows below the start index are zero up to roundoff; a rate fitted to that noise means nothing
    auto rate_of = [&](const BasisTable& t) {
      double peak = 0;
      for (double v : t.values[n]) peak = std::max(peak, std::abs(v));
      return peak > 1e-9 ? fit_rate(r, t.values[n], n) : NAN;
    };
    double rp = rate_of(plus), rm = rate_of(minus);
    row.rate = std::isnan(rp) ? rm : (std::isnan(rm) ? rp : std::min(rp, rm));
    if (!std::isnan(row.rate)) rep.min_rate = std::min(rep.min_rate, row.rate);
    rep.rows.push_back(row);
  }
  // one constant per (k, beta), calibrated on the lower half of the index range
  rep.calibration_n = plus.n_max / 2;
  for (auto& row : rep.rows)
    if (row.n <= rep.calibration_n && row.sup_measured > 0)
      rep.fitted_constant = std::max(rep.fitted_constant, row.sup_measured / row.shape);
  for (auto& row : rep.rows) {
    row.dominated = row.sup_measured <= rep.fitted_constant * row.shape * (1 + 1e-12);
    rep.all_dominated = rep.all_dominated && row.dominated;
  }
  if (!std::isfinite(rep.min_rate)) rep.min_rate = NAN;
  return rep;
}

namespace {
const char* kind_name(TableKind k) {
  switch (k) {
    case TableKind::B: return "b";
    case TableKind::A: return "a";
    case TableKind::ATilde: return "atilde";
  }
  return "b";
}
}  // namespace

void write_table(const std::string& path, const BasisTable& t) {
  std::ofstream out(path);
  if (!out) fail(Err::Io, "cannot write '" + path + "'");
  out << "# k=" << textio::fmt17(t.k.value()) << " eps=" << (t.sign > 0 ? "+1" : "-1") << " n_max=" << t.n_max
      << " y=" << textio::fmt17(t.y_header()) << "\n";
  out << "# kind=" << kind_name(t.kind) << "\n";
  for (std::size_t c = 0; c < t.r.size(); ++c) {
    out << textio::fmt17(t.r[c]);
    for (int n = 0; n <= t.n_max; ++n) out << ", " << textio::fmt17(t.values[n][c]);
    out << "\n";
  }
  if (!out) fail(Err::Io, "write failed for '" + path + "'");
  textio::KV kv;
  kv.set("k", t.k.value());
  kv.set("eps", double(t.sign));
  kv.set("kind", kind_name(t.kind));
  kv.set("n_max", double(t.n_max));
  kv.set("policy", t.meta.policy.empty() ? "auto" : t.meta.policy);
  std::vector<double> lo, hi, y, M;
  for (auto& b : t.meta.blocks) {
    lo.push_back(b.n_lo);
    hi.push_back(b.n_hi);
    y.push_back(b.y);
    M.push_back(b.M);
  }
  kv.set("block_n_lo", lo);
  kv.set("block_n_hi", hi);
  kv.set("block_y", y);
  kv.set("block_M", M);
  kv.set("max_imag_residue", t.meta.max_imag);
  kv.set("max_quad_error", t.meta.max_quad_err);
  kv.set("alias_ratio", t.meta.alias_ratio);
  kv.set("kernel_evaluations", double(t.meta.F_evals));
  kv.set("quad_rel_tol", t.meta.rel_tol);
  kv.set("oversample", double(t.meta.oversample));
  textio::write_kv(path + ".meta", kv, "basis table metadata");
}

BasisTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open '" + path + "'");
  BasisTable t;
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
  for (const char* key : {"k", "eps", "n_max", "y"})
    if (!hdr.count(key)) fail(Err::Parse, path + ": header lacks '" + key + "'");
  t.k = HalfInt::parse(hdr["k"]);
  t.sign = std::stoi(hdr["eps"]) > 0 ? 1 : -1;
  t.n_max = std::stoi(hdr["n_max"]);
  std::string kind = hdr.count("kind") ? hdr["kind"] : "b";
  t.kind = kind == "a" ? TableKind::A : (kind == "atilde" ? TableKind::ATilde : TableKind::B);
  t.values.assign(t.n_max + 1, {});
  t.imag.assign(t.n_max + 1, {});
  for (auto& row : rows) {
    if (static_cast<int>(row.size()) != t.n_max + 2) fail(Err::Parse, path + ": row width does not match n_max");
    t.r.push_back(row[0]);
    for (int n = 0; n <= t.n_max; ++n) {
      t.values[n].push_back(row[n + 1]);
      t.imag[n].push_back(0.0);
    }
  }
  double y = textio::split_nums(hdr["y"]).at(0);
  std::ifstream side(path + ".meta");
  if (side) {
    textio::KV kv = textio::read_kv(path + ".meta");
    auto lo = kv.nums("block_n_lo"), hi = kv.nums("block_n_hi"), ys = kv.nums("block_y"), M = kv.nums("block_M");
    for (std::size_t i = 0; i < lo.size() && i < hi.size() && i < ys.size() && i < M.size(); ++i)
      t.meta.blocks.push_back({int(lo[i]), int(hi[i]), ys[i], int(M[i])});
    t.meta.max_imag = kv.num("max_imag_residue");
    t.meta.max_quad_err = kv.num("max_quad_error");
    t.meta.alias_ratio = kv.num("alias_ratio");
    t.meta.F_evals = kv.integer("kernel_evaluations");
    t.meta.rel_tol = kv.num("quad_rel_tol");
    t.meta.oversample = int(kv.integer("oversample"));
    t.meta.policy = kv.str("policy");
  }
  if (t.meta.blocks.empty()) t.meta.blocks.push_back({0, t.n_max, y, 0});
  return t;
}

}  // namespace fi::basis
