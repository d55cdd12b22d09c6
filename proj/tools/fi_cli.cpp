// command-line front end; talks to the library only through the C API
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fourier_interp.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kNumeric = 3 };

struct Abort {
  int code;
};

// machine-readable record on stderr, then unwind to main
[[noreturn]] void die(int status, const std::string& context) {
  std::fprintf(stderr, "error status=%s code=%d context=\"%s\" message=\"%s\"\n", fi_status_name(status), status,
               context.c_str(), fi_last_error());
  throw Abort{fi_status_is_config(status) ? kConfig : kNumeric};
}

[[noreturn]] void config_error(const std::string& msg) {
  std::fprintf(stderr, "error status=InvalidArgument code=1 message=\"%s\"\n", msg.c_str());
  throw Abort{kConfig};
}

void check(int status, const std::string& context) {
  if (status != FI_OK) die(status, context);
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Table = Handle<fi_table, fi_table_free>;
using Bounds = Handle<fi_bounds, fi_bounds_free>;
using ITables = Handle<fi_interp_tables, fi_interp_tables_free>;
using Profile = Handle<fi_profile, fi_profile_free>;
using Nodes = Handle<fi_node_data, fi_node_data_free>;
using Recon = Handle<fi_recon, fi_recon_free>;
using Odd = Handle<fi_odd_profile, fi_odd_profile_free>;
using Hup = Handle<fi_hup, fi_hup_free>;
using Report = Handle<fi_verify_report, fi_verify_free>;

std::string g17(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}
std::string e6(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.6e", v);
  return b;
}

// "a:b:h" inclusive linear, "sqrt:M" for sqrt(0..M), or a plain radius; comma separated, merged and sorted
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> r;
  std::stringstream ss(text);
  std::string item;
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      config_error("grid: '" + s + "' is not a number");
    }
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream is(item);
    std::string p;
    while (std::getline(is, p, ':')) parts.push_back(p);
    if (parts.size() == 2 && parts[0] == "sqrt") {
      double M = num(parts[1]);
      if (M < 0 || M > 1e6 || M != std::floor(M)) config_error("grid: sqrt:M needs an integer 0 <= M <= 1e6");
      for (int m = 0; m <= int(M); ++m) r.push_back(std::sqrt(double(m)));
    } else if (parts.size() == 3) {
      double a = num(parts[0]), b = num(parts[1]), h = num(parts[2]);
      if (!(h > 0) || b < a || (b - a) / h > 1e6) config_error("grid: '" + item + "' needs a <= b, h > 0, <= 1e6 points");
      for (long i = 0; a + i * h <= b + 1e-12 * std::max(1.0, std::abs(b)); ++i) r.push_back(a + i * h);
    } else if (parts.size() == 1) {
      r.push_back(num(parts[0]));
    } else {
      config_error("grid: cannot parse '" + item + "'");
    }
  }
  if (r.empty()) config_error("grid: no radii");
  for (double x : r)
    if (x < 0) config_error("grid: radii must be >= 0");
  std::sort(r.begin(), r.end());
  std::vector<double> u;
  for (double x : r)
    if (u.empty() || x - u.back() > 1e-13 * std::max(1.0, x)) u.push_back(x);
  return u;
}

std::vector<int> parse_ks(const std::string& ks, const std::string& ds) {
  std::vector<int> out;
  if (!ks.empty() && !ds.empty()) config_error("give either --k or --d");
  std::stringstream ss(ks.empty() ? ds : ks);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int two_k = 0;
    if (!ks.empty()) {
      if (fi_parse_half_integer(item.c_str(), &two_k) != FI_OK) config_error("--k: " + std::string(fi_last_error()));
    } else {
      try {
        std::size_t used = 0;
        two_k = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        config_error("--d: '" + item + "' is not an integer");
      }
      if (two_k < 1) config_error("--d: dimension must be >= 1");
    }
    out.push_back(two_k);
  }
  if (out.empty()) config_error("no k given");
  return out;
}

std::string k_label(int two_k) { return two_k % 2 == 0 ? std::to_string(two_k / 2) : std::to_string(two_k) + "/2"; }
std::string k_file(int two_k) { return two_k % 2 == 0 ? std::to_string(two_k / 2) : std::to_string(two_k) + "_2"; }

std::vector<int> parse_signs(const std::string& s) {
  if (s == "both") return {1, -1};
  if (s == "+1" || s == "1" || s == "+") return {1};
  if (s == "-1" || s == "-") return {-1};
  config_error("--eps-sign must be +1, -1 or both");
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) config_error("cannot create output directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream o(path);
  if (!o) config_error("cannot write '" + path + "'");
  return o;
}

double tol_scale_ok(double s) {
  if (!(s > 0) || !std::isfinite(s)) config_error("--tol-scale must be positive");
  return s;
}

// ---- basis

struct BasisArgs {
  std::string k, d, eps = "both", grid, out = "fi_out";
  int n_max = 8, oversample = 0;
};

int cmd_basis(const BasisArgs& a) {
  auto ks = parse_ks(a.k.empty() && a.d.empty() ? "1/2" : a.k, a.d);
  auto signs = parse_signs(a.eps);
  if (a.n_max < 0) {
    std::fprintf(stderr, "warning: empty index range (n_max = %d); nothing written\n", a.n_max);
    return kPass;
  }
  std::string grid = a.grid.empty() ? "sqrt:36,0:6:0.05" : a.grid;
  auto r = parse_grid(grid);
  if (a.oversample < 0) config_error("--oversample must be >= 0");
  make_dir(a.out);
  std::printf("# basis tables\n# grid=%s radii=%zu n_max=%d\n", grid.c_str(), r.size(), a.n_max);
  std::printf("# kind\tk\teps\tmax_imag\tquad_err\talias_ratio\toversample\tfile\n");
  auto line = [&](const char* kind, int two_k, const char* eps, const fi_table* t, const std::string& file) {
    fi_table_info info{};
    check(fi_table_info_get(t, &info), "table info");
    check(fi_table_write(t, file.c_str()), "write " + file);
    std::printf("%s\t%s\t%s\t%s\t%s\t%s\t%d\t%s\n", kind, k_label(two_k).c_str(), eps, e6(info.max_imag).c_str(),
                e6(info.max_quad_err).c_str(), e6(info.alias_ratio).c_str(), info.oversample, file.c_str());
  };
  for (int two_k : ks) {
    Table plus, minus;
    for (int s : signs) {
      Table& t = s > 0 ? plus : minus;
      check(fi_table_compute(two_k, s, r.data(), r.size(), a.n_max, a.oversample, t.out()),
            "basis k=" + k_label(two_k));
      std::string name = "b_k" + k_file(two_k) + (s > 0 ? "_plus.csv" : "_minus.csv");
      line("b", two_k, s > 0 ? "+1" : "-1", t.get(), join(a.out, name));
    }
    if (signs.size() == 2) {
      Table at, att;
      check(fi_table_pair(plus.get(), minus.get(), at.out(), att.out()), "a pair");
      line("a", two_k, "0", at.get(), join(a.out, "a_k" + k_file(two_k) + ".csv"));
      line("atilde", two_k, "0", att.get(), join(a.out, "atilde_k" + k_file(two_k) + ".csv"));
    }
  }
  return kPass;
}

// ---- verify

struct VerifyArgs {
  std::string suite, in;
  double tol_scale = 1;
  bool full = false, timings = false, list = false;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.list) {
    std::printf("# suite\tcriterion\tsummary\n");
    for (int i = 0; i < fi_verify_suite_count(); ++i) {
      const char *name, *summary;
      int crit;
      fi_verify_suite(i, &name, &crit, &summary);
      std::printf("%s\t%d\t%s\n", name, crit, summary);
    }
    return kPass;
  }
  tol_scale_ok(a.tol_scale);
  // with saved tables and no filter, check the tables only
  std::string filter = a.suite.empty() && !a.in.empty() ? "tables" : a.suite;
  const char* dir = a.in.empty() ? nullptr : a.in.c_str();
  check(fi_verify_validate(filter.empty() ? nullptr : filter.c_str(), a.tol_scale, dir), "verify options");
  Report rep;
  check(fi_verify_run(filter.empty() ? nullptr : filter.c_str(), a.tol_scale, a.full ? 1 : 0, dir, rep.out()),
        "verify");
  std::printf("# verification report level=%s tol_scale=%s\n", a.full ? "full" : "quick", g17(a.tol_scale).c_str());
  std::printf("# suite\tstatus\tresidual\tbound\tcheck\tdetail\n");
  std::size_t n = fi_verify_count(rep.get()), fails = 0, errors = 0;
  std::vector<std::pair<std::string, double>> times;
  for (std::size_t i = 0; i < n; ++i) {
    fi_check c{};
    check(fi_verify_check(rep.get(), i, &c), "report");
    const char* st = c.errored ? "ERROR" : (c.pass ? "PASS" : "FAIL");
    fails += !c.pass && !c.errored;
    errors += c.errored;
    std::string bound = std::string(c.lower ? ">" : "<=") + e6(c.tol);
    std::printf("%s\t%s\t%s\t%s\t%s\t%s\n", c.suite, st, c.errored ? "nan" : e6(c.residual).c_str(),
                c.errored ? "-" : bound.c_str(), c.name, c.detail);
    if (times.empty() || times.back().first != c.suite) times.push_back({c.suite, 0});
    times.back().second += c.seconds;
  }
  std::printf("# checks=%zu passed=%zu failed=%zu errored=%zu\n", n, n - fails - errors, fails, errors);
  if (a.timings)
    for (auto& [s, t] : times) std::printf("# time %s %.1f s\n", s.c_str(), t);
  if (fails) return kFail;
  return errors ? kNumeric : kPass;
}

// ---- reconstruct

struct ReconArgs {
  int d = 4, n_max = 12, j_max = 60;
  std::string profile = "half", data, out = "fi_out";
  double tol_scale = 1, t = 1;
};

int cmd_reconstruct(const ReconArgs& a) {
  if (a.d < 1) config_error("--d must be >= 1");
  if (a.n_max < 1) config_error("--n-max must be >= 1");
  if (a.j_max < 1) config_error("--j-max must be >= 1");
  if (!(a.t > 0)) config_error("--t must be positive");
  tol_scale_ok(a.tol_scale);
  Profile prof;
  Nodes nodes;
  bool file_profile = a.profile != "half" && a.profile != "zero";
  if (file_profile) check(fi_profile_read(a.profile.c_str(), prof.out()), "profile " + a.profile);
  if (!a.data.empty()) check(fi_node_data_read(a.data.c_str(), nodes.out()), "data " + a.data);
  make_dir(a.out);

  ITables tabs;
  check(fi_interp_tables_build(a.d, a.n_max, tabs.out()), "tables");
  double ds = NAN;
  if (a.profile == "zero") check(fi_profile_zero(a.d, prof.out()), "zero profile");
  if (a.profile == "half")
    check(fi_profile_threshold_fraction(tabs.get(), 1.0, 0.5, 0.5, 7, prof.out(), &ds), "threshold profile");
  if (a.data.empty()) check(fi_node_data_gaussian(a.d, a.n_max, prof.get(), a.t, nodes.out()), "Gaussian data");
  Recon rec;
  check(fi_reconstruct(nodes.get(), prof.get(), tabs.get(), a.j_max, 1e-13, rec.out()), "reconstruct");
  fi_recon_info info{};
  check(fi_recon_info_get(rec.get(), &info), "info");
  check(fi_profile_write(prof.get(), join(a.out, "profile.txt").c_str()), "write profile");
  check(fi_node_data_write(nodes.get(), join(a.out, "node_data.txt").c_str()), "write data");

  auto log = open_out(join(a.out, "reconstruct_log.txt"));
  log << "# j\tdiff\tratio\n";
  for (int i = 0; i < info.iterations; ++i) {
    int j;
    double diff, ratio;
    check(fi_recon_log(rec.get(), i, &j, &diff, &ratio), "log");
    log << j << '\t' << g17(diff) << '\t' << g17(ratio) << '\n';
  }
  std::vector<double> r(info.samples), re(info.samples), im(info.samples);
  check(fi_recon_samples(rec.get(), r.data(), re.data(), im.data()), "samples");
  bool gaussian = a.data.empty();
  double err = 0;
  auto fo = open_out(join(a.out, "reconstruct_f.txt"));
  fo << (gaussian ? "# r\tre\tim\ttarget\terror\n" : "# r\tre\tim\n");
  for (std::size_t i = 0; i < r.size(); ++i) {
    fo << g17(r[i]) << '\t' << g17(re[i]) << '\t' << g17(im[i]);
    if (gaussian) {
      double want = std::exp(-M_PI * a.t * r[i] * r[i]);
      double e = std::hypot(re[i] - want, im[i]);
      if (r[i] <= 3) err = std::max(err, e);
      fo << '\t' << g17(want) << '\t' << g17(e);
    }
    fo << '\n';
  }
  std::printf("# reconstruction d=%d n_max=%d profile=%s\n", a.d, a.n_max, a.profile.c_str());
  if (std::isfinite(ds)) std::printf("delta_star\t%s\n", e6(ds).c_str());
  std::printf("budget\t%s\niterations\t%d\nconverged\t%s\n", e6(info.budget).c_str(), info.iterations,
              info.converged ? "yes" : "no");
  bool ok = info.converged;
  if (gaussian) {
    double tol = 1e-4 * a.tol_scale;
    std::printf("sup_error_r_le_3\t%s\ntolerance\t%s\n", e6(err).c_str(), e6(tol).c_str());
    ok = ok && err <= tol;
  }
  return ok ? kPass : kFail;
}

// ---- hup

struct HupArgs {
  int n_max = 12;
  std::string profile = "synthetic", data, out = "fi_out";
  double delta = 1e-3, tol_scale = 1;
};

int cmd_hup(const HupArgs& a) {
  if (a.n_max < 1) config_error("--n-max must be >= 1");
  if (!(a.delta > 0)) config_error("--delta must be positive");
  tol_scale_ok(a.tol_scale);
  Odd f;
  if (a.profile == "synthetic")
    check(fi_odd_profile_synthetic(1.0, f.out()), "synthetic profile");
  else if (a.profile == "zero")
    check(fi_odd_profile_zero(f.out()), "zero profile");
  else
    check(fi_odd_profile_read(a.profile.c_str(), f.out()), "profile " + a.profile);
  if (!a.data.empty() && !fs::is_regular_file(a.data)) config_error("cannot read '" + a.data + "'");
  make_dir(a.out);

  ITables tabs;
  check(fi_interp_tables_build(4, a.n_max, tabs.out()), "tables");
  Hup h;
  double tol = 1e-8 * a.tol_scale;
  check(fi_hup_run(f.get(), a.data.empty() ? nullptr : a.data.c_str(), a.delta, tabs.get(), tol, h.out()), "hup");
  fi_hup_info info{};
  check(fi_hup_info_get(h.get(), &info), "info");
  check(fi_hup_write_cross_data(h.get(), join(a.out, "cross_data.txt").c_str()), "write data");

  auto ph = open_out(join(a.out, "hup_phi.txt"));
  ph << "# r\tdirect_re\tdirect_im\trec_re\trec_im\n";
  for (int i = 0; i <= 60; ++i) {
    double r = 0.05 * i, dr, di, rr, ri;
    check(fi_hup_phi(h.get(), r, &dr, &di, &rr, &ri), "phi");
    ph << g17(r) << '\t' << g17(dr) << '\t' << g17(di) << '\t' << g17(rr) << '\t' << g17(ri) << '\n';
  }
  auto lg = open_out(join(a.out, "hup_log.txt"));
  lg << "# part\tj\tdiff\tratio\n";
  for (int part : {0, 1}) {
    int cnt = part ? info.iterations_im : info.iterations_re;
    for (int i = 0; i < cnt; ++i) {
      int j;
      double diff, ratio;
      check(fi_hup_log(h.get(), part, i, &j, &diff, &ratio), "log");
      lg << (part ? "im" : "re") << '\t' << j << '\t' << g17(diff) << '\t' << g17(ratio) << '\n';
    }
  }
  std::ostringstream rep;
  rep << "verdict=" << fi_verdict_name(info.verdict) << "\n"
      << "n_max=" << info.n_max << "\n"
      << "budget=" << e6(info.budget) << "\n"
      << "data_norm=" << e6(info.data_norm) << "\n"
      << "phi_direct_norm=" << e6(info.phi_direct_norm) << "\n"
      << "phi_rec_norm=" << e6(info.phi_rec_norm) << "\n"
      << "discrepancy=" << e6(info.discrepancy) << "\n"
      << "route_agreement=" << e6(info.route_agreement) << "\n"
      << "parity=" << e6(info.parity) << "\n"
      << "total_integral=" << e6(info.total_integral) << "\n"
      << "r_check=" << g17(info.r_check) << "\n"
      << "zero_tol=" << e6(info.tol) << "\n";
  auto ro = open_out(join(a.out, "hup_report.txt"));
  ro << rep.str();
  std::printf("# hup check profile=%s\n%s", a.profile.c_str(), rep.str().c_str());
  return info.verdict == FI_VERDICT_INCONSISTENT ? kFail : kPass;
}

// ---- bounds

struct BoundsArgs {
  std::string k, d, grid = "0:20:0.1", out = "fi_out";
  int n_max = 10;
  double beta = NAN;
};

int cmd_bounds(const BoundsArgs& a) {
  auto ks = parse_ks(a.k.empty() && a.d.empty() ? "1/2" : a.k, a.d);
  if (ks.size() != 1) config_error("bounds takes a single k");
  int two_k = ks[0];
  double beta = std::isnan(a.beta) ? two_k + 2.0 : a.beta;
  if (!(beta > two_k + 1)) config_error("--beta must exceed 2k + 1");
  if (a.n_max < 0) config_error("--n-max must be >= 0");
  auto r = parse_grid(a.grid);
  make_dir(a.out);

  Table plus, minus;
  check(fi_table_compute(two_k, 1, r.data(), r.size(), a.n_max, 0, plus.out()), "b+");
  check(fi_table_compute(two_k, -1, r.data(), r.size(), a.n_max, 0, minus.out()), "b-");
  Bounds b;
  check(fi_bounds_compute(beta, plus.get(), minus.get(), b.out()), "bounds");
  fi_bounds_info info{};
  check(fi_bounds_info_get(b.get(), &info), "info");

  std::printf("# bounds k=%s beta=%s\n", k_label(two_k).c_str(), g17(beta).c_str());
  std::printf("g_tilde\t%s\nfitted_constant\t%s\ncalibration_n\t%d\nmin_rate\t%s\nall_dominated\t%s\n",
              e6(info.g_tilde).c_str(), e6(info.fitted_constant).c_str(), info.calibration_n,
              e6(info.min_rate).c_str(), info.all_dominated ? "yes" : "no");
  std::printf("# n\tsup_measured\tshape\tratio\trate\tdominated\n");
  auto ro = open_out(join(a.out, "bounds_report.txt"));
  ro << "# k=" << k_label(two_k) << " beta=" << g17(beta) << " C=" << g17(info.fitted_constant) << "\n";
  ro << "# n\tsup_measured\tshape\tratio\trate\tdominated\n";
  for (int i = 0; i < info.rows; ++i) {
    fi_bounds_row row{};
    check(fi_bounds_row_get(b.get(), i, &row), "row");
    double ratio = row.sup_measured / (info.fitted_constant * row.shape);
    std::printf("%d\t%s\t%s\t%s\t%s\t%s\n", row.n, e6(row.sup_measured).c_str(), e6(row.shape).c_str(),
                e6(ratio).c_str(), e6(row.rate).c_str(), row.dominated ? "yes" : "no");
    ro << row.n << '\t' << g17(row.sup_measured) << '\t' << g17(row.shape) << '\t' << g17(ratio) << '\t'
       << g17(row.rate) << '\t' << (row.dominated ? 1 : 0) << '\n';
  }
  // r against |b^+_n| then |b^-_n|
  auto po = open_out(join(a.out, "bounds_profile.txt"));
  po << "# r";
  for (int s : {1, -1})
    for (int n = 0; n <= a.n_max; ++n) po << "\t|b" << (s > 0 ? '+' : '-') << "_" << n << "|";
  po << '\n';
  std::vector<std::vector<double>> rows;
  for (const Table* t : {&plus, &minus})
    for (int n = 0; n <= a.n_max; ++n) {
      rows.emplace_back(r.size());
      check(fi_table_row(t->get(), n, rows.back().data()), "row");
    }
  for (std::size_t i = 0; i < r.size(); ++i) {
    po << g17(r[i]);
    for (auto& row : rows) po << '\t' << g17(std::abs(row[i]));
    po << '\n';
  }
  return info.all_dominated && info.min_rate > 0 ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier interpolation bases: tables, checks, reconstructions"};
  app.require_subcommand(1);

  BasisArgs ba;
  auto* basis = app.add_subcommand("basis", "compute coefficient tables b, a, atilde");
  basis->add_option("--k", ba.k, "half-integer weights, comma separated (default 1/2)");
  basis->add_option("--d", ba.d, "dimensions, comma separated; k = d/2");
  basis->add_option("--eps-sign", ba.eps, "+1, -1 or both")->capture_default_str();
  basis->add_option("--n-max", ba.n_max, "largest index; negative means an empty range")->capture_default_str();
  basis->add_option("--grid", ba.grid, "radii: a:b:h, sqrt:M or numbers, comma separated (default sqrt:36,0:6:0.05)");
  basis->add_option("--oversample", ba.oversample, "samples per index for the coefficient FFT (0 = default)");
  basis->add_option("--out", ba.out, "output directory")->capture_default_str();

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "run verification suites");
  ver->add_option("--suite", va.suite, "comma separated suite names (see --list)");
  ver->add_option("--tol-scale", va.tol_scale, "multiplies every tolerance")->capture_default_str();
  ver->add_option("--in", va.in, "directory of saved tables for the 'tables' suite");
  ver->add_flag("--full", va.full, "full-size parameters instead of the quick ones");
  ver->add_flag("--timings", va.timings, "append per-suite wall time as comment lines");
  ver->add_flag("--list", va.list, "list the suites and exit");

  ReconArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "perturbed radial reconstruction of a Gaussian");
  rec->add_option("--d", ra.d, "dimension")->capture_default_str();
  rec->add_option("--n-max", ra.n_max, "largest node index")->capture_default_str();
  rec->add_option("--profile", ra.profile, "perturbation profile file, 'zero' or 'half'")->capture_default_str();
  rec->add_option("--data", ra.data, "node data file (default: samples of exp(-pi t r^2))");
  rec->add_option("--t", ra.t, "Gaussian width")->capture_default_str();
  rec->add_option("--j-max", ra.j_max, "Neumann step limit")->capture_default_str();
  rec->add_option("--tol-scale", ra.tol_scale, "multiplies the error tolerance")->capture_default_str();
  rec->add_option("--out", ra.out, "output directory")->capture_default_str();

  HupArgs ha;
  auto* hup = app.add_subcommand("hup", "hyperbola uniqueness check from perturbed cross data");
  hup->add_option("--profile", ha.profile, "odd profile file, 'synthetic' or 'zero'")->capture_default_str();
  hup->add_option("--data", ha.data, "cross data file (default: synthesized from the profile)");
  hup->add_option("--delta", ha.delta, "size of the synthesized node perturbation")->capture_default_str();
  hup->add_option("--n-max", ha.n_max, "largest node index")->capture_default_str();
  hup->add_option("--tol-scale", ha.tol_scale, "multiplies the zero tolerance")->capture_default_str();
  hup->add_option("--out", ha.out, "output directory")->capture_default_str();

  BoundsArgs bo;
  auto* bnd = app.add_subcommand("bounds", "weighted sup bounds and exponential rates of b");
  bnd->add_option("--k", bo.k, "half-integer weight (default 1/2)");
  bnd->add_option("--d", bo.d, "dimension; k = d/2");
  bnd->add_option("--beta", bo.beta, "weight exponent (default 2k + 2)");
  bnd->add_option("--n-max", bo.n_max, "largest index")->capture_default_str();
  bnd->add_option("--grid", bo.grid, "radii")->capture_default_str();
  bnd->add_option("--out", bo.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kConfig;
  }
  try {
    if (*basis) return cmd_basis(ba);
    if (*ver) return cmd_verify(va);
    if (*rec) return cmd_reconstruct(ra);
    if (*hup) return cmd_hup(ha);
    if (*bnd) return cmd_bounds(bo);
  } catch (const Abort& a) {
    return a.code;
  }
  return kConfig;
}
