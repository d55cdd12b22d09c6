// one line per numbered criterion, full-size parameters
#include <chrono>
#include <cstdio>
#include <string>

#include "fourier_interp.h"

int main() {
  int failed = 0;
  for (int i = 0; i < fi_verify_suite_count(); ++i) {
    const char *name, *summary;
    int crit;
    fi_verify_suite(i, &name, &crit, &summary);
    if (crit == 0) continue;
    auto t0 = std::chrono::steady_clock::now();
    fi_verify_report* rep = nullptr;
    int st = fi_verify_run(name, 1.0, 1, nullptr, &rep);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (st != FI_OK) {
      std::printf("criterion %2d %-20s FAIL  %7.1f s  %s: %s\n", crit, name, secs, fi_status_name(st), fi_last_error());
      ++failed;
      continue;
    }
    bool ok = fi_verify_count(rep) > 0;
    std::string why;
    for (size_t j = 0; j < fi_verify_count(rep); ++j) {
      fi_check c;
      fi_verify_check(rep, j, &c);
      if (!c.pass) {
        ok = false;
        char b[512];
        std::snprintf(b, sizeof b, "%s%s (%s %.3e)", why.empty() ? "" : "; ", c.name,
                      c.errored ? c.detail : "residual", c.residual);
        why += b;
      }
    }
    std::printf("criterion %2d %-20s %s  %7.1f s  %s\n", crit, name, ok ? "PASS" : "FAIL", secs,
                ok ? summary : why.c_str());
    std::fflush(stdout);
    failed += !ok;
    fi_verify_free(rep);
  }
  return failed ? 1 : 0;
}
