#pragma once
#include <string>
#include <vector>

namespace fi::verify {

enum class Level { Quick, Full };

struct Options {
  std::string filter;     // comma separated suite names; empty selects every suite that has input
  double tol_scale = 1;   // multiplies every tolerance
  Level level = Level::Quick;
  std::string table_dir;  // table files checked by the "tables" suite
};

struct Check {
  std::string suite, name;
  double residual = 0, tol = 0;
  bool lower = false;  // residual must exceed tol instead of staying below it
  bool pass = false;
  bool errored = false;  // the check threw; detail holds the message
  std::string detail;
  double seconds = 0;
};

struct SuiteInfo {
  const char* name;
  int criterion;  // 0 for suites outside the numbered list
  const char* summary;
};
const std::vector<SuiteInfo>& suites();

// throws InvalidArgument for unknown suite names, before any work
std::vector<std::string> select(const Options& o);
std::vector<Check> run(const Options& o);

}  // namespace fi::verify
