#include "myopic/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "myopic/errors.hpp"

namespace myopic {

namespace {

constexpr double kBracket = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double half_log2(double v) { return 0.5 * std::log2(v); }

// Golden-section minimization of a unimodal f on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kBracket) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Stationary points of f solve (1 - a)(aP - N) = 0. Newton on that factor,
// starting from the search result, snaps an interior optimum onto the root.
double newton_refine(const ChannelParams& p, double a) {
  for (int it = 0; it < 8; ++it) {
    const double g = (1.0 - a) * (a * p.P - p.N);
    const double dg = p.P + p.N - 2.0 * a * p.P;
    if (dg == 0.0) break;
    const double step = g / dg;
    a -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(a))) break;
  }
  return a;
}

bool near_upper(double x, double hi) { return x >= hi - 1e-9 * std::max(1.0, hi); }

}  // namespace

void ChannelParams::validate() const {
  if (!(std::isfinite(P) && P > 0.0)) throw ParameterError("P must be finite and > 0");
  if (!(std::isfinite(N) && N > 0.0)) throw ParameterError("N must be finite and > 0");
  if (!(std::isfinite(sigma2) && sigma2 >= 0.0)) throw ParameterError("sigma2 must be finite and >= 0");
}

KeyRegime KeyRegime::linear(double r_key) {
  if (!(r_key > 0.0)) throw ParameterError("linear key regime requires r_key > 0");
  return {Kind::linear, r_key};
}

double rate_ld(const ChannelParams& p) {
  p.validate();
  return half_log2(p.P / p.N);
}

double rate_myop(const ChannelParams& p) {
  p.validate();
  if (!(p.sigma2 > 0.0)) throw ParameterError("rate_myop: sigma2 must be > 0");
  const double s = p.P + p.sigma2;
  const double arg = (s * (p.P + p.N) - 2.0 * p.P * std::sqrt(p.N * s)) / (p.N * p.sigma2);
  if (!(arg > 0.0)) throw DegenerateGeometry("rate_myop: log argument is not positive");
  return half_log2(arg);
}

double rate_gv(const ChannelParams& p) {
  p.validate();
  if (p.P < 2.0 * p.N) return 0.0;
  return half_log2(p.P * p.P / (4.0 * p.N * (p.P - p.N)));
}

double rate_rankin(const ChannelParams& p) {
  p.validate();
  if (p.P < 2.0 * p.N) return 0.0;
  return half_log2(p.P / (2.0 * p.N));
}

double rate_lp(const ChannelParams& p) {
  p.validate();
  if (p.P < 2.0 * p.N) return 0.0;
  const double root = std::sqrt(p.N * (p.P - p.N));
  const double alpha = (p.P + 2.0 * root) / (4.0 * root);
  const double beta = (p.P - 2.0 * root) / (4.0 * root);
  auto xlogx = [](double v) { return v > 0.0 ? v * std::log2(v) : 0.0; };
  return xlogx(alpha) - xlogx(beta);
}

double rate_awgn(double snr) {
  if (!(snr >= 0.0)) throw ParameterError("rate_awgn: snr must be >= 0");
  return 0.5 * std::log1p(snr) / std::numbers::ln2;
}

double scale_babble_alpha_max(const ChannelParams& p) {
  p.validate();
  return std::sqrt(p.N / (p.P + p.sigma2));
}

double scale_babble_objective(const ChannelParams& p, double alpha) {
  const double numer = (1.0 - alpha) * (1.0 - alpha) * p.P;
  const double denom = p.N - alpha * alpha * p.P;
  if (denom <= 0.0) return numer == 0.0 ? 0.0 : kInf;
  return numer / denom;
}

OptResult minimize_scale_babble(const ChannelParams& p) {
  p.validate();
  const double hi = scale_babble_alpha_max(p);
  auto f = [&](double a) { return scale_babble_objective(p, a); };

  const double searched = golden_min(f, 0.0, hi);
  double best = searched;
  double best_f = f(searched);
  // f is flat at its minimum, so the Newton point wins ties within rounding.
  const double refined = newton_refine(p, searched);
  if (refined > 0.0 && refined <= hi && f(refined) <= best_f * (1.0 + 1e-12)) {
    best = refined;
    best_f = f(refined);
  }
  if (f(hi) < best_f) {
    best = hi;
    best_f = f(hi);
  }

  OptResult out;
  out.argument = best;
  out.objective = best_f;
  out.achieved_rate = rate_awgn(best_f);
  out.boundary_hit = near_upper(best, hi);
  return out;
}

double myop_ld_radius(const ChannelParams& p, double alpha_s) {
  p.validate();
  if (!(alpha_s >= 0.0 && alpha_s <= p.N * (1.0 + 1e-15))) {
    throw ParameterError("myop_ld_radius: alpha_s must lie in [0, N]");
  }
  const double s = p.P + p.sigma2;
  const double denom = p.P + p.N - 2.0 * p.P * std::sqrt(alpha_s / s);
  if (!(denom > 0.0)) throw DegenerateGeometry("myop_ld_radius: denominator is not positive");
  return p.P * (p.N - p.P * alpha_s / s) / denom;
}

OptResult maximize_myop_ld_radius(const ChannelParams& p) {
  p.validate();
  const double s = p.P + p.sigma2;
  // The one degenerate corner (N = P, sigma2 = 0, alpha_s = N) has limit P.
  auto r = [&](double a_s) {
    try {
      return myop_ld_radius(p, std::min(a_s, p.N));
    } catch (const DegenerateGeometry&) {
      return p.P;
    }
  };
  auto neg_r = [&](double a_s) { return -r(a_s); };

  const double searched = golden_min(neg_r, 0.0, p.N);
  double best = searched;
  double best_r = r(searched);
  const double a_ref = newton_refine(p, std::sqrt(searched / s));
  for (double cand : {a_ref * a_ref * s, 0.0, p.N}) {
    if (cand >= 0.0 && cand <= p.N && r(cand) > best_r) {
      best = cand;
      best_r = r(cand);
    }
  }

  OptResult out;
  out.argument = best;
  out.objective = best_r;
  out.achieved_rate = best_r > 0.0 ? std::max(0.0, half_log2(p.P / best_r)) : kInf;
  out.boundary_hit = near_upper(best, p.N);
  return out;
}

double myop_ld_closed_form_rate(const ChannelParams& p) {
  p.validate();
  const double s = p.sigma2 / p.P;
  const double x = p.N / p.P;
  if (s < 1.0 / x - 1.0) return rate_ld(p);
  if (s <= x - 1.0) return 0.0;
  return rate_myop(p);
}

double symmetrization_pe_floor(const ChannelParams& p) {
  p.validate();
  return std::max(0.0, 0.5 * (1.0 - (2.0 * p.P + p.sigma2) / (4.0 * p.N)));
}

DisambiguationPenalty list_disambiguation_penalty(int n, double L, double R, double n_key) {
  if (n < 1) throw ParameterError("list_disambiguation_penalty: n must be >= 1");
  if (!(L >= 0.0 && R >= 0.0)) throw ParameterError("list_disambiguation_penalty: L and R must be >= 0");
  if (!(n_key > 0.0)) throw ParameterError("list_disambiguation_penalty: n_key must be > 0");
  DisambiguationPenalty out;
  if (std::isinf(n_key)) {
    out.rate_loss = kInf;
    out.extra_error = 0.0;
    out.infinite_key = true;
    return out;
  }
  out.rate_loss = n_key / (2.0 * n);
  out.extra_error = L == 0.0 ? 0.0 : 2.0 * n * L * R / (n_key * std::exp2(n_key / 2.0));
  return out;
}

}  // namespace myopic
