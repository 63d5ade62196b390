#include "myopic/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "myopic/errors.hpp"

namespace myopic {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

// Squared chord over squared sphere radius, with round-off slack at the top.
double normalized_chord_sq(const CapSpec& cap) {
  require(cap.ambient_dim >= 1, "cap: ambient_dim must be >= 1");
  require(cap.sphere_radius > 0.0, "cap: sphere_radius must be > 0");
  require(cap.chord_radius >= 0.0, "cap: chord_radius must be >= 0");
  const double ratio = cap.chord_radius / cap.sphere_radius;
  require(ratio <= 2.0 * (1.0 + 1e-12), "cap: chord_radius exceeds the sphere diameter");
  return std::min(ratio * ratio, 4.0);
}

// sin^2 of the half-angle, written to avoid cancellation near the pole.
double sin_sq_half_angle(double u) { return std::clamp(u * (1.0 - 0.25 * u), 0.0, 1.0); }

}  // namespace

LogMeasure LogMeasure::from_value(double v) {
  if (!(v >= 0.0)) throw ParameterError("LogMeasure: negative or NaN value");
  if (v == 0.0) return zero();
  return from_log2(std::log2(v));
}

double LogMeasure::value() const { return is_zero ? 0.0 : std::exp2(log2_value); }

LogMeasure sphere_log_area(int n, double r) {
  require(n >= 1, "sphere_log_area: n must be >= 1");
  require(r > 0.0, "sphere_log_area: r must be > 0");
  const double half = 0.5 * n;
  const double base = 1.0 + half * std::log2(std::numbers::pi) - std::lgamma(half) / kLn2;
  return LogMeasure::from_log2(base + (n - 1) * std::log2(r));
}

LogMeasure ball_log_volume(int n, double r) {
  require(n >= 1, "ball_log_volume: n must be >= 1");
  require(r > 0.0, "ball_log_volume: r must be > 0");
  const double half = 0.5 * n;
  const double base = half * std::log2(std::numbers::pi) - std::lgamma(half + 1.0) / kLn2;
  return LogMeasure::from_log2(base + n * std::log2(r));
}

double cap_cos_half_angle(const CapSpec& cap) { return 1.0 - 0.5 * normalized_chord_sq(cap); }

double cap_base_radius(const CapSpec& cap) {
  return cap.sphere_radius * std::sqrt(sin_sq_half_angle(normalized_chord_sq(cap)));
}

double cap_fraction(const CapSpec& cap) {
  const double u = normalized_chord_sq(cap);
  if (u >= 4.0) return 1.0;
  // S^0 is two points; any cap short of the whole sphere holds one of them.
  if (cap.ambient_dim == 1) return 0.5;
  if (u == 0.0) return 0.0;
  const double a = 0.5 * (cap.ambient_dim - 1);
  const double half = 0.5 * boost::math::ibeta(a, 0.5, sin_sq_half_angle(u));
  return u <= 2.0 ? half : 1.0 - half;
}

LogMeasure cap_log_fraction(const CapSpec& cap) {
  const double u = normalized_chord_sq(cap);
  if (u >= 4.0) return LogMeasure::from_log2(0.0);
  if (cap.ambient_dim == 1) return LogMeasure::from_log2(-1.0);
  if (u == 0.0) return LogMeasure::zero();
  const double a = 0.5 * (cap.ambient_dim - 1);
  const double s2 = sin_sq_half_angle(u);
  if (u <= 2.0) return LogMeasure::from_log2(-1.0 + log_ibeta(a, 0.5, s2) / kLn2);
  const double half = 0.5 * boost::math::ibeta(a, 0.5, s2);
  return LogMeasure::from_log2(std::log1p(-half) / kLn2);
}

CapSandwich cap_fraction_sandwich(const CapSpec& cap) {
  require(cap.ambient_dim >= 2, "cap_fraction_sandwich: needs n >= 2");
  const double u = normalized_chord_sq(cap);
  require(u <= 2.0, "cap_fraction_sandwich: cap larger than a hemisphere");
  const double rho = cap_base_radius(cap);
  if (rho == 0.0) return {0.0, 0.0};
  const int n = cap.ambient_dim;
  const double log_total = sphere_log_area(n, cap.sphere_radius).log2_value;
  CapSandwich out;
  out.lower = std::exp2(ball_log_volume(n - 1, rho).log2_value - log_total);
  out.upper = std::exp2(sphere_log_area(n, rho).log2_value - log_total);
  return out;
}

double strip_fraction(const StripSpec& strip) {
  require(strip.inner_chord <= strip.outer_chord, "strip: inner_chord exceeds outer_chord");
  const CapSpec inner{strip.ambient_dim, strip.sphere_radius, strip.inner_chord};
  const CapSpec outer{strip.ambient_dim, strip.sphere_radius, strip.outer_chord};
  return std::max(0.0, cap_fraction(outer) - cap_fraction(inner));
}

CapSpec ball_sphere_cap(int n, double sphere_radius, double center_norm, double ball_radius) {
  require(sphere_radius > 0.0, "ball_sphere_cap: sphere_radius must be > 0");
  require(center_norm >= 0.0 && ball_radius >= 0.0, "ball_sphere_cap: negative length");
  const double R = sphere_radius;
  const double full = 2.0 * R;
  if (center_norm == 0.0) return {n, R, ball_radius >= R ? full : 0.0};
  const double gap = R - center_norm;
  const double numer = ball_radius * ball_radius - gap * gap;
  if (numer <= 0.0) return {n, R, 0.0};
  // chord^2 = 2R^2 (1 - cos), with 1 - cos = numer / (2 t R).
  const double chord_sq = R * numer / center_norm;
  if (chord_sq >= full * full) return {n, R, full};
  return {n, R, std::sqrt(chord_sq)};
}

void uniform_sphere_sample(Rng& rng, std::span<double> out, double r) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    for (double& v : out) v = gauss(rng);
    const double len = norm(out);
    if (len > 0.0) {
      scale_in_place(out, r / len);
      return;
    }
  }
}

Vec uniform_sphere_sample(Rng& rng, int n, double r) {
  require(n >= 1, "uniform_sphere_sample: n must be >= 1");
  Vec out(static_cast<std::size_t>(n));
  uniform_sphere_sample(rng, out, r);
  return out;
}

Vec uniform_shell_sample(Rng& rng, int n, double r_in, double r_out) {
  require(n >= 1, "uniform_shell_sample: n must be >= 1");
  require(0.0 <= r_in && r_in <= r_out && r_out > 0.0, "uniform_shell_sample: bad radii");
  Vec out(static_cast<std::size_t>(n));
  uniform_sphere_sample(rng, out, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Radial CDF is (r^n - r_in^n)/(r_out^n - r_in^n); work in r/r_out.
  const double t = std::pow(r_in / r_out, n);
  const double radius = r_out * std::pow(t + unif(rng) * (1.0 - t), 1.0 / n);
  scale_in_place(out, radius);
  return out;
}

CoveringBound covering_size_log_bound(double ambient_radius, double delta, int n) {
  require(n >= 1, "covering_size_log_bound: n must be >= 1");
  require(ambient_radius >= 0.0, "covering_size_log_bound: ambient_radius must be >= 0");
  require(delta > 0.0, "covering_size_log_bound: delta must be > 0");
  const double s = std::sqrt(delta);
  return {LogMeasure::from_log2(n * std::log2((ambient_radius + s) / s)), true};
}

double gaussian_norm_tail_bound(int n, double sigma2, double eps, TailSide side) {
  require(n >= 1, "gaussian_norm_tail_bound: n must be >= 1");
  require(sigma2 > 0.0, "gaussian_norm_tail_bound: sigma2 must be > 0");
  require(eps >= 0.0, "gaussian_norm_tail_bound: eps must be >= 0");
  const double e2n = eps * eps * n;
  switch (side) {
    case TailSide::above:
      return std::exp(-e2n / 4.0);
    case TailSide::below:
      return std::exp(-e2n / 2.0);
    case TailSide::two_sided:
      return std::min(1.0, 2.0 * std::exp(-e2n / 4.0));
  }
  return 1.0;
}

double inner_product_tail_bound(int n, double norm_a, double norm_b, double zeta) {
  require(n >= 1, "inner_product_tail_bound: n must be >= 1");
  require(norm_a > 0.0 && norm_b > 0.0, "inner_product_tail_bound: norms must be > 0");
  require(zeta >= 0.0, "inner_product_tail_bound: zeta must be >= 0");
  const double nn = static_cast<double>(n);
  const double denom = 2.0 * norm_a * norm_a * norm_b * norm_b;
  return std::exp2(-(nn - 1.0) * nn * nn * zeta * zeta / denom);
}

double gaussian_scalar_tail_bound(double sigma2, double eps) {
  require(sigma2 > 0.0, "gaussian_scalar_tail_bound: sigma2 must be > 0");
  require(eps >= 0.0, "gaussian_scalar_tail_bound: eps must be >= 0");
  return std::min(1.0, 2.0 * std::exp(-eps * eps / (2.0 * sigma2)));
}

AtypicalityBounds atypicality_bounds(int n, double P, double sigma2, double eps) {
  require(n >= 1, "atypicality_bounds: n must be >= 1");
  require(P > 0.0 && sigma2 > 0.0, "atypicality_bounds: P and sigma2 must be > 0");
  require(eps > 0.0 && eps < 1.0, "atypicality_bounds: eps must lie in (0,1)");

  auto norm_bound = [&](double e) { return gaussian_norm_tail_bound(n, sigma2, e, TailSide::two_sided); };
  auto angle_bound = [&](double e) {
    return std::min(1.0, 2.0 * std::exp(-e * e * (1.0 - e) * n / 2.0) + norm_bound(e));
  };

  AtypicalityBounds out;
  out.noise_norm = norm_bound(eps);
  out.angle = angle_bound(eps);

  // Largest eps1 whose typical set for (|s_z|^2, cross term) lands inside
  // n(P+sigma2)(1 +- eps); then the observation event implies one of the
  // first two events at eps1.
  auto spread = [&](double e) { return sigma2 * e + 2.0 * std::sqrt(P * sigma2 * (1.0 + e)) * e; };
  const double target = (P + sigma2) * eps;
  double lo = 0.0, hi = 1.0;
  if (spread(hi) <= target) {
    lo = hi;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (spread(mid) <= target ? lo : hi) = mid;
    }
  }
  out.eps1 = lo;
  out.observation_norm = lo > 0.0 && lo < 1.0 ? std::min(1.0, norm_bound(lo) + angle_bound(lo)) : 1.0;
  return out;
}

}  // namespace myopic
