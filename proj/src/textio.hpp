#pragma once
#include <map>
#include <string>
#include <vector>

namespace fi::textio {

// key=value lines; '#' starts a comment; arrays are comma separated
struct KV {
  std::map<std::string, std::string> kv;
  bool has(const std::string& k) const { return kv.count(k) != 0; }
  const std::string& str(const std::string& k) const;
  double num(const std::string& k) const;
  long integer(const std::string& k) const;
  std::vector<double> nums(const std::string& k) const;
  void set(const std::string& k, const std::string& v) { kv[k] = v; }
  void set(const std::string& k, double v);
  void set(const std::string& k, const std::vector<double>& v);
};

KV read_kv(const std::string& path);
void write_kv(const std::string& path, const KV& kv, const std::string& comment = "");

std::string fmt17(double v);
std::vector<double> split_nums(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);
void parse_header_pairs(const std::string& line, std::map<std::string, std::string>& out);

}  // namespace fi::textio
