#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "basis.hpp"
#include "fourier_interp.h"
#include "hup.hpp"
#include "interp.hpp"
#include "verify.hpp"

using namespace fi;

struct fi_table {
  basis::BasisTable t;
};
struct fi_bounds {
  basis::BoundReport r;
};
struct fi_interp_tables {
  interp::InterpTables t;
};
struct fi_profile {
  interp::PerturbationProfile p;
};
struct fi_node_data {
  interp::NodeData d;
};
struct fi_recon {
  interp::ReconstructResult r;
};
struct fi_odd_profile {
  hup::OddProfile f;
};
struct fi_hup {
  hup::Pipeline P;
  hup::HyperbolaCrossData data;
  hup::HupReport rep;
  double tol = 0, r_check = 0;
};
struct fi_verify_report {
  std::vector<verify::Check> checks;
};

namespace {

thread_local std::string g_error;

template <class F>
int guard(F&& f) {
  try {
    f();
    return FI_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return static_cast<int>(e.code);
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return FI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return FI_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(Err::InvalidArgument, std::string(what) + " is null");
}

template <class H, class V>
void emit(H** out, V&& v) {
  need(out, "output handle");
  *out = new H{std::forward<V>(v)};
}

void log_entry(const std::vector<interp::IterLog>& log, int i, int* j, double* diff, double* ratio) {
  if (i < 0 || i >= static_cast<int>(log.size())) fail(Err::InvalidArgument, "log index out of range");
  if (j) *j = log[i].j;
  if (diff) *diff = log[i].diff;
  if (ratio) *ratio = log[i].ratio;
}

}  // namespace

extern "C" {

const char* fi_status_name(int status) {
  if (status == FI_ERR_INTERNAL) return "Internal";
  if (status < 0 || status > FI_ERR_PARSE) return "Unknown";
  return err_name(static_cast<Err>(status));
}

const char* fi_last_error(void) { return g_error.c_str(); }

int fi_status_is_config(int status) {
  return status == FI_ERR_INVALID_ARGUMENT || status == FI_ERR_IO || status == FI_ERR_PARSE ||
         status == FI_ERR_GRID_MISMATCH || status == FI_ERR_TABLE_RANGE || status == FI_ERR_PARITY_VIOLATION ||
         status == FI_ERR_TOTAL_INTEGRAL_NONZERO;
}

int fi_parse_half_integer(const char* text, int* two_k) {
  return guard([&] {
    need(text, "text");
    need(two_k, "two_k");
    *two_k = HalfInt::parse(text).two_k;
  });
}

int fi_start_index(int two_k, int sign, int* nu) {
  return guard([&] {
    need(nu, "nu");
    if (sign != 1 && sign != -1) fail(Err::InvalidArgument, "sign must be +1 or -1");
    *nu = basis::nu_of(HalfInt{two_k}, -sign);
  });
}

// ---- tables

int fi_table_compute(int two_k, int sign, const double* r, size_t nr, int n_max, int oversample, fi_table** out) {
  return guard([&] {
    need(r, "radii");
    if (nr == 0) fail(Err::InvalidArgument, "empty radial grid");
    basis::HeightPolicy h;
    if (oversample > 0) h.oversample = oversample;
    emit(out, fi_table{basis::coefficients(HalfInt{two_k}, sign, std::vector<double>(r, r + nr), n_max, h)});
  });
}

int fi_table_pair(const fi_table* plus, const fi_table* minus, fi_table** a, fi_table** atilde) {
  return guard([&] {
    need(plus, "plus");
    need(minus, "minus");
    need(a, "a");
    need(atilde, "atilde");
    auto p = basis::assemble_a(plus->t, minus->t);
    auto ha = std::make_unique<fi_table>(fi_table{std::move(p.a)});
    *atilde = new fi_table{std::move(p.atilde)};
    *a = ha.release();
  });
}

int fi_table_read(const char* path, fi_table** out) {
  return guard([&] {
    need(path, "path");
    emit(out, fi_table{basis::read_table(path)});
  });
}

int fi_table_write(const fi_table* t, const char* path) {
  return guard([&] {
    need(t, "table");
    need(path, "path");
    basis::write_table(path, t->t);
  });
}

int fi_table_info_get(const fi_table* t, fi_table_info* info) {
  return guard([&] {
    need(t, "table");
    need(info, "info");
    const auto& b = t->t;
    info->two_k = b.k.two_k;
    info->sign = b.sign;
    info->kind = static_cast<int>(b.kind);
    info->n_max = b.n_max;
    info->radii = b.r.size();
    info->max_imag = b.meta.max_imag;
    info->max_quad_err = b.meta.max_quad_err;
    info->alias_ratio = b.meta.alias_ratio;
    info->oversample = b.meta.oversample;
    info->kernel_evaluations = b.meta.F_evals;
  });
}

int fi_table_radii(const fi_table* t, double* out) {
  return guard([&] {
    need(t, "table");
    need(out, "out");
    std::copy(t->t.r.begin(), t->t.r.end(), out);
  });
}

int fi_table_row(const fi_table* t, int n, double* out) {
  return guard([&] {
    need(t, "table");
    need(out, "out");
    if (n < 0 || n > t->t.n_max) fail(Err::TableRange, "row index outside the table");
    std::copy(t->t.values[n].begin(), t->t.values[n].end(), out);
  });
}

void fi_table_free(fi_table* t) { delete t; }

// ---- bounds

int fi_bounds_compute(double beta, const fi_table* plus, const fi_table* minus, fi_bounds** out) {
  return guard([&] {
    need(plus, "plus");
    need(minus, "minus");
    emit(out, fi_bounds{basis::bound_report(plus->t.k, beta, plus->t, minus->t)});
  });
}

int fi_bounds_info_get(const fi_bounds* b, fi_bounds_info* info) {
  return guard([&] {
    need(b, "bounds");
    need(info, "info");
    info->g_tilde = b->r.g_tilde;
    info->fitted_constant = b->r.fitted_constant;
    info->min_rate = b->r.min_rate;
    info->calibration_n = b->r.calibration_n;
    info->all_dominated = b->r.all_dominated;
    info->rows = static_cast<int>(b->r.rows.size());
  });
}

int fi_bounds_row_get(const fi_bounds* b, int i, fi_bounds_row* row) {
  return guard([&] {
    need(b, "bounds");
    need(row, "row");
    if (i < 0 || i >= static_cast<int>(b->r.rows.size())) fail(Err::InvalidArgument, "row index out of range");
    const auto& x = b->r.rows[i];
    row->n = x.n;
    row->dominated = x.dominated;
    row->sup_measured = x.sup_measured;
    row->shape = x.shape;
    row->rate = x.rate;
  });
}

void fi_bounds_free(fi_bounds* b) { delete b; }

// ---- interpolation

int fi_interp_tables_build(int d, int n_max, fi_interp_tables** out) {
  return guard([&] {
    if (d < 1) fail(Err::InvalidArgument, "d must be >= 1");
    if (n_max < 1) fail(Err::InvalidArgument, "n_max must be >= 1");
    double s = std::sqrt(double(n_max));
    auto g = spaces::RadialGrid::panels(s + 6, 0.5, 1.0, 16, s + 2);
    emit(out, fi_interp_tables{interp::InterpTables::build(d, n_max, g)});
  });
}

int fi_interp_tables_shape(const fi_interp_tables* t, int* d, int* n_max, double* r_max) {
  return guard([&] {
    need(t, "tables");
    if (d) *d = t->t.d;
    if (n_max) *n_max = t->t.n_max;
    if (r_max) *r_max = t->t.grid->r_max();
  });
}

void fi_interp_tables_free(fi_interp_tables* t) { delete t; }

int fi_profile_read(const char* path, fi_profile** out) {
  return guard([&] {
    need(path, "path");
    emit(out, fi_profile{interp::read_profile(path)});
  });
}

int fi_profile_write(const fi_profile* p, const char* path) {
  return guard([&] {
    need(p, "profile");
    need(path, "path");
    interp::write_profile(path, p->p);
  });
}

int fi_profile_zero(int d, fi_profile** out) {
  return guard([&] {
    if (d < 1) fail(Err::InvalidArgument, "d must be >= 1");
    interp::PerturbationProfile p;
    p.d = d;
    emit(out, fi_profile{p});
  });
}

int fi_profile_threshold_fraction(const fi_interp_tables* t, double s, double eta, double fraction, unsigned seed,
                                  fi_profile** out, double* delta_star) {
  return guard([&] {
    need(t, "tables");
    if (!(fraction > 0 && fraction < 1)) fail(Err::InvalidArgument, "fraction must lie in (0, 1)");
    const int d = t->t.d, N = t->t.n_max;
    auto unit = interp::shaped_profile(d, s, eta, 1.0, N + 1, seed);
    double ds = interp::delta_star(unit.eps, unit.eps_hat, unit, t->t, {s, d});
    auto p = unit;
    for (auto& v : p.eps) v *= ds * fraction;
    for (auto& v : p.eps_hat) v *= ds * fraction;
    p.delta = ds * fraction;
    if (delta_star) *delta_star = ds;
    emit(out, fi_profile{p});
  });
}

int fi_profile_budget(const fi_profile* p, const fi_interp_tables* t, double* budget) {
  return guard([&] {
    need(p, "profile");
    need(t, "tables");
    need(budget, "budget");
    interp::validate(p->p, t->t.d);
    *budget = interp::budget(p->p, t->t, {p->p.s, t->t.d}).value;
  });
}

void fi_profile_free(fi_profile* p) { delete p; }

int fi_node_data_read(const char* path, fi_node_data** out) {
  return guard([&] {
    need(path, "path");
    emit(out, fi_node_data{interp::read_node_data(path)});
  });
}

int fi_node_data_write(const fi_node_data* data, const char* path) {
  return guard([&] {
    need(data, "data");
    need(path, "path");
    interp::write_node_data(path, data->d);
  });
}

int fi_node_data_gaussian(int d, int n_max, const fi_profile* p, double t, fi_node_data** out) {
  return guard([&] {
    need(p, "profile");
    if (!(t > 0)) fail(Err::InvalidArgument, "Gaussian width t must be positive");
    auto f = [t](double r) { return std::exp(-pi * t * r * r); };
    auto fh = [t, d](double r) { return std::pow(t, -0.5 * d) * std::exp(-pi * r * r / t); };
    emit(out, fi_node_data{interp::node_data_from(d, n_max, p->p, f, fh)});
  });
}

void fi_node_data_free(fi_node_data* data) { delete data; }

int fi_reconstruct(const fi_node_data* data, const fi_profile* p, const fi_interp_tables* t, int j_max, double tol,
                   fi_recon** out) {
  return guard([&] {
    need(data, "data");
    need(p, "profile");
    need(t, "tables");
    emit(out, fi_recon{interp::reconstruct(data->d, p->p, t->t, j_max, tol)});
  });
}

int fi_recon_info_get(const fi_recon* r, fi_recon_info* info) {
  return guard([&] {
    need(r, "reconstruction");
    need(info, "info");
    info->budget = r->r.budget;
    info->converged = r->r.converged;
    info->iterations = static_cast<int>(r->r.log.size());
    info->samples = r->r.f.grid ? r->r.f.grid->size() : 0;
  });
}

int fi_recon_log(const fi_recon* r, int i, int* j, double* diff, double* ratio) {
  return guard([&] {
    need(r, "reconstruction");
    log_entry(r->r.log, i, j, diff, ratio);
  });
}

int fi_recon_samples(const fi_recon* r, double* radius, double* re, double* im) {
  return guard([&] {
    need(r, "reconstruction");
    const auto& f = r->r.f;
    for (std::size_t i = 0; i < f.grid->size(); ++i) {
      if (radius) radius[i] = f.grid->r[i];
      if (re) re[i] = f.values[i].real();
      if (im) im[i] = f.values[i].imag();
    }
  });
}

int fi_recon_eval(const fi_recon* r, double radius, double* re, double* im) {
  return guard([&] {
    need(r, "reconstruction");
    cd v = r->r.f.eval(radius);
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

void fi_recon_free(fi_recon* r) { delete r; }

// ---- hyperbola pipeline

int fi_odd_profile_read(const char* path, fi_odd_profile** out) {
  return guard([&] {
    need(path, "path");
    emit(out, fi_odd_profile{hup::read_odd_profile(path)});
  });
}

int fi_odd_profile_write(const fi_odd_profile* f, const char* path) {
  return guard([&] {
    need(f, "profile");
    need(path, "path");
    hup::write_odd_profile(path, f->f);
  });
}

int fi_odd_profile_synthetic(double B, fi_odd_profile** out) {
  return guard([&] {
    if (!std::isfinite(B)) fail(Err::InvalidArgument, "B must be finite");
    emit(out, fi_odd_profile{hup::synthetic_profile(B)});
  });
}

int fi_odd_profile_zero(fi_odd_profile** out) {
  return guard([&] { emit(out, fi_odd_profile{hup::OddProfile::sample([](double) { return 0.0; })}); });
}

void fi_odd_profile_free(fi_odd_profile* f) { delete f; }

int fi_hup_run(const fi_odd_profile* f, const char* cross_data_path, double delta, const fi_interp_tables* t,
               double tol, fi_hup** out) {
  return guard([&] {
    need(f, "profile");
    need(t, "tables");
    need(out, "output handle");
    if (!(tol > 0)) fail(Err::InvalidArgument, "tol must be positive");
    auto h = std::make_unique<fi_hup>();
    h->P = hup::build_pipeline(f->f);
    if (cross_data_path) {
      h->data = hup::read_cross_data(cross_data_path);
    } else {
      if (!(delta > 0)) fail(Err::InvalidArgument, "delta must be positive");
      h->data = hup::cross_data_from(h->P, hup::shaped_cross_profile(delta, t->t.n_max), t->t.n_max);
    }
    h->tol = tol;
    h->r_check = 3.0;
    h->rep = hup::hup_check(h->data, f->f, t->t, tol, h->r_check);
    *out = h.release();
  });
}

int fi_hup_info_get(const fi_hup* h, fi_hup_info* info) {
  return guard([&] {
    need(h, "hup");
    need(info, "info");
    const auto& r = h->rep;
    info->verdict = static_cast<int>(r.verdict);
    info->n_max = h->data.n_max();
    info->iterations_re = static_cast<int>(r.log_re.size());
    info->iterations_im = static_cast<int>(r.log_im.size());
    info->budget = r.budget;
    info->data_norm = r.data_norm;
    info->phi_direct_norm = r.phi_direct_norm;
    info->phi_rec_norm = r.phi_rec_norm;
    info->discrepancy = r.discrepancy;
    info->parity = r.parity;
    info->total_integral = r.total_integral;
    info->route_agreement = r.route_agreement;
    info->r_check = h->r_check;
    info->tol = h->tol;
  });
}

const char* fi_verdict_name(int verdict) {
  if (verdict < 0 || verdict > 2) return "unknown";
  return hup::verdict_name(static_cast<hup::Verdict>(verdict));
}

int fi_hup_phi(const fi_hup* h, double r, double* direct_re, double* direct_im, double* rec_re, double* rec_im) {
  return guard([&] {
    need(h, "hup");
    if (!(r >= 0)) fail(Err::InvalidArgument, "radius must be >= 0");
    cd d = hup::phi_eval(h->P, r);
    cd e = h->rep.phi_rec.grid ? h->rep.phi_rec.eval(r) : cd(0);
    if (direct_re) *direct_re = d.real();
    if (direct_im) *direct_im = d.imag();
    if (rec_re) *rec_re = e.real();
    if (rec_im) *rec_im = e.imag();
  });
}

int fi_hup_log(const fi_hup* h, int imag_part, int i, int* j, double* diff, double* ratio) {
  return guard([&] {
    need(h, "hup");
    log_entry(imag_part ? h->rep.log_im : h->rep.log_re, i, j, diff, ratio);
  });
}

int fi_hup_write_cross_data(const fi_hup* h, const char* path) {
  return guard([&] {
    need(h, "hup");
    need(path, "path");
    hup::write_cross_data(path, h->data);
  });
}

void fi_hup_free(fi_hup* h) { delete h; }

// ---- verification

int fi_verify_suite_count(void) { return static_cast<int>(verify::suites().size()); }

int fi_verify_suite(int i, const char** name, int* criterion, const char** summary) {
  return guard([&] {
    const auto& s = verify::suites();
    if (i < 0 || i >= static_cast<int>(s.size())) fail(Err::InvalidArgument, "suite index out of range");
    if (name) *name = s[i].name;
    if (criterion) *criterion = s[i].criterion;
    if (summary) *summary = s[i].summary;
  });
}

namespace {
verify::Options options(const char* filter, double tol_scale, int level, const char* table_dir) {
  verify::Options o;
  o.filter = filter ? filter : "";
  o.tol_scale = tol_scale;
  o.level = level ? verify::Level::Full : verify::Level::Quick;
  o.table_dir = table_dir ? table_dir : "";
  return o;
}
}  // namespace

int fi_verify_validate(const char* filter, double tol_scale, const char* table_dir) {
  return guard([&] { verify::select(options(filter, tol_scale, 0, table_dir)); });
}

int fi_verify_run(const char* filter, double tol_scale, int level, const char* table_dir, fi_verify_report** out) {
  return guard([&] { emit(out, fi_verify_report{verify::run(options(filter, tol_scale, level, table_dir))}); });
}

size_t fi_verify_count(const fi_verify_report* r) { return r ? r->checks.size() : 0; }

int fi_verify_check(const fi_verify_report* r, size_t i, fi_check* out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    if (i >= r->checks.size()) fail(Err::InvalidArgument, "check index out of range");
    const auto& c = r->checks[i];
    out->suite = c.suite.c_str();
    out->name = c.name.c_str();
    out->detail = c.detail.c_str();
    out->residual = c.residual;
    out->tol = c.tol;
    out->seconds = c.seconds;
    out->pass = c.pass;
    out->errored = c.errored;
    out->lower = c.lower;
  });
}

void fi_verify_free(fi_verify_report* r) { delete r; }

}  // extern "C"
