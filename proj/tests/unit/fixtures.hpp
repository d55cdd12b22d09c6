#pragma once
#include <cmath>
#include <filesystem>
#include <string>

#include "interp.hpp"

namespace fixtures {

constexpr int kN4 = 12;

inline std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// d = 4 tables shared by several suites; built once per process
inline const fi::interp::InterpTables& tables4() {
  static const fi::interp::InterpTables t = [] {
    auto g = fi::spaces::RadialGrid::panels(std::sqrt(kN4) + 6, 0.5, 1.0, 16, std::sqrt(kN4) + 2);
    return fi::interp::InterpTables::build(4, kN4, g);
  }();
  return t;
}

}  // namespace fixtures
