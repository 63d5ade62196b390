#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "myopic/capacity.hpp"
#include "myopic/errors.hpp"

namespace myopic {

std::string to_string(KeyRegime::Kind kind) {
  switch (kind) {
    case KeyRegime::Kind::none: return "none";
    case KeyRegime::Kind::log_n: return "log_n";
    case KeyRegime::Kind::linear: return "linear";
    case KeyRegime::Kind::infinite: return "infinite";
  }
  return "?";
}

std::string to_string(CapacityVerdict::Kind kind) {
  switch (kind) {
    case CapacityVerdict::Kind::zero: return "zero";
    case CapacityVerdict::Kind::bounds: return "bounds";
    case CapacityVerdict::Kind::exact: return "exact";
  }
  return "?";
}

namespace {

enum class Row { zero, exact_ld, exact_myop, bounds_gv_ld, bounds_gv_myop, bounds_ld_myop };

const char* row_name(Row r) {
  switch (r) {
    case Row::zero: return "zero";
    case Row::exact_ld: return "exact_ld";
    case Row::exact_myop: return "exact_myop";
    case Row::bounds_gv_ld: return "bounds_gv_ld";
    case Row::bounds_gv_myop: return "bounds_gv_myop";
    case Row::bounds_ld_myop: return "bounds_ld_myop";
  }
  return "?";
}

// R_myop in normalized coordinates s = sigma2/P, x = N/P (P = 1).
double myop_normalized(double s, double x) {
  return rate_myop(ChannelParams{1.0, x, s});
}

// Region lookup on the (s, x) plane. Inclusive comparisons on the exact and
// zero rows are what send boundary points toward them.
Row locate(KeyRegime::Kind kind, double s, double x, double r_key) {
  const double ld_edge = 1.0 / x - 1.0;
  const double zero_edge = x - 1.0;
  switch (kind) {
    case KeyRegime::Kind::none: {
      if (x >= 1.0 || s <= 4.0 * x - 2.0) return Row::zero;
      const double strip_edge = x / (1.0 - x);
      if (strip_edge <= s && s <= ld_edge) return Row::exact_ld;
      if (s >= std::max(ld_edge, strip_edge)) return Row::exact_myop;
      if (s <= std::min(ld_edge, strip_edge)) return Row::bounds_gv_ld;
      return Row::bounds_gv_myop;
    }
    case KeyRegime::Kind::log_n:
      if (s <= zero_edge) return Row::zero;
      if (s <= ld_edge) return Row::exact_ld;
      if (s >= 4.0 * x - 1.0) return Row::exact_myop;
      return Row::bounds_ld_myop;
    case KeyRegime::Kind::linear: {
      if (s <= zero_edge) return Row::zero;
      if (s <= ld_edge) return Row::exact_ld;
      const double threshold = 0.5 * std::log2(1.0 + 1.0 / s) - myop_normalized(s, x);
      if (r_key >= threshold) return Row::exact_myop;
      return Row::bounds_ld_myop;
    }
    case KeyRegime::Kind::infinite:
      if (s <= zero_edge) return Row::zero;
      if (s <= ld_edge) return Row::exact_ld;
      return Row::exact_myop;
  }
  return Row::zero;
}

}  // namespace

CapacityVerdict classify(const ChannelParams& p, const KeyRegime& regime) {
  p.validate();
  if (regime.kind == KeyRegime::Kind::linear && !(regime.r_key > 0.0)) {
    throw ParameterError("classify: linear regime requires r_key > 0");
  }
  const double s = p.sigma2 / p.P;
  const double x = p.N / p.P;
  const Row row = locate(regime.kind, s, x, regime.r_key);

  CapacityVerdict v;
  v.regime_label = to_string(regime.kind) + ":" + row_name(row);

  const double r_ld = rate_ld(p);
  std::optional<double> r_myop;
  if (p.sigma2 > 0.0) r_myop = rate_myop(p);
  v.rates_used.emplace_back("R_LD", r_ld);
  if (r_myop) v.rates_used.emplace_back("R_myop", *r_myop);
  if (regime.kind == KeyRegime::Kind::none) v.rates_used.emplace_back("R_GV", rate_gv(p));
  if (regime.kind == KeyRegime::Kind::linear && r_myop) {
    v.rates_used.emplace_back("R_key", regime.r_key);
    v.rates_used.emplace_back("R_key_threshold", 0.5 * std::log2(1.0 + 1.0 / s) - *r_myop);
  }

  auto need_myop = [&]() {
    if (!r_myop) throw DegenerateGeometry("classify: R_myop needed at sigma2 = 0");
    return *r_myop;
  };
  switch (row) {
    case Row::zero:
      v.kind = CapacityVerdict::Kind::zero;
      break;
    case Row::exact_ld:
      v.kind = CapacityVerdict::Kind::exact;
      v.lower = v.upper = std::max(0.0, r_ld);
      break;
    case Row::exact_myop:
      v.kind = CapacityVerdict::Kind::exact;
      v.lower = v.upper = std::max(0.0, need_myop());
      break;
    case Row::bounds_gv_ld:
      v.kind = CapacityVerdict::Kind::bounds;
      v.lower = std::max(0.0, rate_gv(p));
      v.upper = std::max(0.0, r_ld);
      break;
    case Row::bounds_gv_myop:
      v.kind = CapacityVerdict::Kind::bounds;
      v.lower = std::max(0.0, rate_gv(p));
      v.upper = std::max(0.0, need_myop());
      break;
    case Row::bounds_ld_myop:
      v.kind = CapacityVerdict::Kind::bounds;
      v.lower = std::max(0.0, r_ld);
      v.upper = std::max(0.0, need_myop());
      break;
  }

  // On a boundary iff a relative nudge of any coordinate changes the row.
  constexpr double kNudge = 1e-12;
  const std::array<std::array<double, 3>, 6> nudges{{
      {1.0 + kNudge, 1.0, 1.0}, {1.0 - kNudge, 1.0, 1.0},
      {1.0, 1.0 + kNudge, 1.0}, {1.0, 1.0 - kNudge, 1.0},
      {1.0, 1.0, 1.0 + kNudge}, {1.0, 1.0, 1.0 - kNudge},
  }};
  for (const auto& k : nudges) {
    // At s = 0 a relative nudge is no move; step off the axis instead.
    const double s2 = s == 0.0 ? (k[0] > 1.0 ? kNudge : 0.0) : s * k[0];
    if (locate(regime.kind, s2, x * k[1], regime.r_key * k[2]) != row) {
      v.boundary = true;
      break;
    }
  }
  return v;
}

}  // namespace myopic
