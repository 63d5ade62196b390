#pragma once

#include <string>
#include <utility>
#include <vector>

namespace myopic {

// Per-symbol transmit power, jammer power, and jammer observation noise.
// sigma2 = 0 is the omniscient jammer.
struct ChannelParams {
  double P = 1.0;
  double N = 1.0;
  double sigma2 = 1.0;

  void validate() const;
};

struct KeyRegime {
  enum class Kind { none, log_n, linear, infinite };
  Kind kind = Kind::none;
  double r_key = 0.0;  // only meaningful for linear

  static KeyRegime none() { return {Kind::none, 0.0}; }
  static KeyRegime log_n() { return {Kind::log_n, 0.0}; }
  static KeyRegime linear(double r_key);
  static KeyRegime infinite() { return {Kind::infinite, 0.0}; }
};

std::string to_string(KeyRegime::Kind kind);

struct CapacityVerdict {
  enum class Kind { zero, bounds, exact };
  Kind kind = Kind::zero;
  double lower = 0.0;  // equals upper for exact, both 0 for zero
  double upper = 0.0;
  std::string regime_label;
  std::vector<std::pair<std::string, double>> rates_used;
  bool boundary = false;  // point sits on a region boundary (within 1e-12 relative)
};

std::string to_string(CapacityVerdict::Kind kind);

struct OptResult {
  double argument = 0.0;   // argmin (scale-and-babble) or argmax (radius)
  double objective = 0.0;  // f(alpha) or r(alpha_s)
  double achieved_rate = 0.0;
  bool boundary_hit = false;
};

double rate_ld(const ChannelParams& p);
// Throws DegenerateGeometry when the log argument is not positive.
double rate_myop(const ChannelParams& p);
double rate_gv(const ChannelParams& p);
double rate_rankin(const ChannelParams& p);
double rate_lp(const ChannelParams& p);
// Gaussian channel capacity 0.5*log2(1 + snr).
double rate_awgn(double snr);

// f(alpha) = (1-alpha)^2 P / (N - alpha^2 P); +inf where the denominator vanishes.
double scale_babble_objective(const ChannelParams& p, double alpha);
double scale_babble_alpha_max(const ChannelParams& p);
OptResult minimize_scale_babble(const ChannelParams& p);

double myop_ld_radius(const ChannelParams& p, double alpha_s);
OptResult maximize_myop_ld_radius(const ChannelParams& p);

// Piecewise closed form of the radius optimization: R_LD where the
// unconstrained optimum is feasible, else 0 or R_myop.
double myop_ld_closed_form_rate(const ChannelParams& p);

CapacityVerdict classify(const ChannelParams& p, const KeyRegime& regime);

double symmetrization_pe_floor(const ChannelParams& p);

struct DisambiguationPenalty {
  double rate_loss = 0.0;
  double extra_error = 0.0;
  bool infinite_key = false;
};

// Cost of resolving a list of size L with n_key shared bits.
DisambiguationPenalty list_disambiguation_penalty(int n, double L, double R, double n_key);

}  // namespace myopic
