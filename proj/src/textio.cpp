#include "textio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace fi::textio {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

static double to_num(const std::string& t) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(t, &pos);
  } catch (...) {
    // stod rejects "inf"/"nan" spellings on some platforms only partially
    if (t == "inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    if (t == "nan") return NAN;
    fail(Err::Parse, "not a number: '" + t + "'");
  }
  if (pos != t.size()) fail(Err::Parse, "not a number: '" + t + "'");
  return v;
}

std::vector<double> split_nums(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (auto& t : split(s, ',')) out.push_back(to_num(t));
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::string& KV::str(const std::string& k) const {
  auto it = kv.find(k);
  if (it == kv.end()) fail(Err::Parse, "missing key '" + k + "'");
  return it->second;
}
double KV::num(const std::string& k) const { return to_num(str(k)); }
long KV::integer(const std::string& k) const {
  double v = num(k);
  if (v != std::floor(v)) fail(Err::Parse, "key '" + k + "' must be an integer");
  return static_cast<long>(v);
}
std::vector<double> KV::nums(const std::string& k) const { return split_nums(str(k)); }
void KV::set(const std::string& k, double v) { kv[k] = fmt17(v); }
void KV::set(const std::string& k, const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt17(v[i]);
  kv[k] = s;
}

KV read_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open '" + path + "'");
  KV out;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) fail(Err::Parse, path + ":" + std::to_string(ln) + ": expected key=value");
    out.kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

void write_kv(const std::string& path, const KV& kv, const std::string& comment) {
  std::ofstream out(path);
  if (!out) fail(Err::Io, "cannot write '" + path + "'");
  if (!comment.empty()) out << "# " << comment << "\n";
  for (auto& [k, v] : kv.kv) out << k << "=" << v << "\n";
  if (!out) fail(Err::Io, "write failed for '" + path + "'");
}

void parse_header_pairs(const std::string& line, std::map<std::string, std::string>& out) {
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
}

}  // namespace fi::textio
