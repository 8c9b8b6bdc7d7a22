#pragma once

#include <filesystem>
#include <string>

#include "awgp/goldens.hpp"

namespace awgp::test {

inline const GoldenRegistry& goldens() {
  static const GoldenRegistry g = GoldenRegistry::load(AWGP_GOLDENS);
  return g;
}

inline std::string data_path(const std::string& name) { return std::string(AWGP_TEST_DATA) + "/" + name; }

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::path(AWGP_SCRATCH) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace awgp::test
