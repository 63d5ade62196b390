#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "myopic/capacity.hpp"

namespace myopic::fixtures {

inline std::string golden_path(const std::string& name) { return std::string(MYOPIC_GOLDEN_DIR) + "/" + name; }

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

inline KeyRegime regime_from(const std::string& name, double r_key) {
  if (name == "log_n") return KeyRegime::log_n();
  if (name == "linear") return KeyRegime::linear(r_key);
  if (name == "infinite") return KeyRegime::infinite();
  return KeyRegime::none();
}

// Re-renders a classifier golden line from its input columns.
inline std::string classifier_line(const std::string& golden_line) {
  const auto c = split_csv(golden_line);
  const double P = std::stod(c[1]), N = std::stod(c[2]), s2 = std::stod(c[3]), r_key = std::stod(c[5]);
  const CapacityVerdict v = classify(ChannelParams{P, N, s2}, regime_from(c[4], r_key));
  char rates[64];
  std::snprintf(rates, sizeof rates, "%.6f,%.6f", v.lower, v.upper);
  return c[0] + "," + c[1] + "," + c[2] + "," + c[3] + "," + c[4] + "," + c[5] + "," + to_string(v.kind) + "," +
         v.regime_label + "," + (v.boundary ? "1" : "0") + "," + rates;
}

}  // namespace myopic::fixtures
