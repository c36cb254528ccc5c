#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csq/report.hpp"

namespace csq::cli {

struct RunConfig {
  std::string command;
  std::string model = "sphere";
  int n = 3;
  double hbar = 1.0;
  int k = 4;
  int mesh = 2;
  std::vector<int> levels;  // empty: per-command default
  std::size_t samples = 12;
  std::uint64_t seed = 0;
  double tol = 0.0;  // <= 0: per-model quadrature default
  std::string out;
  unsigned threads = 0;
  std::string check;  // empty: per-command default
  std::string loop = "latitude:0.7";

  /// Fills per-command defaults so the echoed config is the effective one.
  void resolve();
  report::Json to_json() const;
};

/// Throws ConfigError for invalid parameters.
report::Report run(const RunConfig& cfg);

}  // namespace csq::cli
