#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "myopic/errors.hpp"
#include "myopic/geometry.hpp"

namespace myopic {

std::size_t ToyCovering::nearest(std::span<const double> x) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = distance_sq(center(i), x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

namespace {

double min_dist_sq(const std::vector<double>& centers, std::size_t from, std::size_t n,
                   std::span<const double> x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t off = from * n; off < centers.size(); off += n) {
    best = std::min(best, distance_sq({centers.data() + off, n}, x));
  }
  return best;
}

}  // namespace

ToyCovering build_toy_covering(Rng& rng, const ToyCoveringSpec& spec) {
  if (spec.n < 1 || spec.n > 12) throw ParameterError("build_toy_covering: n must lie in [1,12]");
  if (!(spec.delta > 0.0)) throw ParameterError("build_toy_covering: delta must be > 0");
  if (!(spec.outer_radius > 0.0 && spec.inner_radius >= 0.0 && spec.inner_radius <= spec.outer_radius)) {
    throw ParameterError("build_toy_covering: bad radii");
  }
  if (spec.probes == 0) throw ParameterError("build_toy_covering: probes must be >= 1");

  const auto n = static_cast<std::size_t>(spec.n);
  const double root_n = std::sqrt(static_cast<double>(spec.n));
  const double r_in = root_n * spec.inner_radius;
  const double r_out = root_n * spec.outer_radius;

  ToyCovering cov;
  cov.n = spec.n;
  cov.covering_radius = std::sqrt(spec.n * spec.delta);
  const double rad_sq = cov.covering_radius * cov.covering_radius;

  std::vector<Vec> probes(spec.probes);
  std::vector<std::pair<double, std::size_t>> uncovered;
  for (;;) {
    ++cov.rounds;
    uncovered.clear();
    for (std::size_t i = 0; i < probes.size(); ++i) {
      probes[i] = uniform_shell_sample(rng, spec.n, r_in, r_out);
      const double d = min_dist_sq(cov.centers, 0, n, probes[i]);
      if (d > rad_sq) uncovered.emplace_back(d, i);
    }
    if (uncovered.empty()) {
      cov.certified_probes = probes.size();
      return cov;
    }
    // Farthest first; later probes only need checking against this round's additions.
    std::sort(uncovered.begin(), uncovered.end(),
              [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    const std::size_t round_start = cov.size();
    for (const auto& [d, idx] : uncovered) {
      if (min_dist_sq(cov.centers, round_start, n, probes[idx]) <= rad_sq) continue;
      cov.centers.insert(cov.centers.end(), probes[idx].begin(), probes[idx].end());
      if (cov.size() > spec.center_budget) {
        throw SizingError("build_toy_covering: exceeded center budget of " +
                          std::to_string(spec.center_budget) + " centers");
      }
    }
  }
}

}  // namespace myopic
