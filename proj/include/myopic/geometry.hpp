#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "myopic/rng.hpp"
#include "myopic/vecops.hpp"

namespace myopic {

// Base-2 logarithm of a nonnegative measure. Areas of high-dimensional
// spheres overflow double long before n = 10^4, so everything is carried in
// log form and exponentiated only at the edge.
struct LogMeasure {
  double log2_value = 0.0;
  bool is_zero = false;

  static LogMeasure zero() { return {0.0, true}; }
  static LogMeasure from_log2(double l) { return {l, false}; }
  static LogMeasure from_value(double v);
  double value() const;
};

// Cap on the sphere of radius sphere_radius in R^ambient_dim: the points
// within Euclidean distance chord_radius of a fixed point of the sphere.
struct CapSpec {
  int ambient_dim = 1;
  double sphere_radius = 1.0;
  double chord_radius = 0.0;
};

// Region between two concentric caps.
struct StripSpec {
  int ambient_dim = 1;
  double sphere_radius = 1.0;
  double inner_chord = 0.0;
  double outer_chord = 0.0;
};

LogMeasure sphere_log_area(int n, double r);
LogMeasure ball_log_volume(int n, double r);

// Normalized surface measure of the cap.
double cap_fraction(const CapSpec& cap);
LogMeasure cap_log_fraction(const CapSpec& cap);

// cos of the cap half-angle as seen from the sphere's center.
double cap_cos_half_angle(const CapSpec& cap);

// Radius of the (n-1)-ball spanned by the cap's boundary.
double cap_base_radius(const CapSpec& cap);

struct CapSandwich {
  double lower = 0.0;
  double upper = 0.0;
};

// Projection lower bound and equal-radius-sphere upper bound, both in terms
// of the base radius. Only defined for caps no larger than a hemisphere.
CapSandwich cap_fraction_sandwich(const CapSpec& cap);

double strip_fraction(const StripSpec& strip);

// The set {x : |x| = sphere_radius, |x - y| <= ball_radius} for |y| =
// center_norm is a cap; returns it in chord form. Empty and full
// intersections map to chord 0 and chord 2*sphere_radius.
CapSpec ball_sphere_cap(int n, double sphere_radius, double center_norm, double ball_radius);

// Regularized incomplete beta in log domain (natural log). Accurate where
// the linear value underflows.
double log_ibeta(double a, double b, double x);

void uniform_sphere_sample(Rng& rng, std::span<double> out, double r);
Vec uniform_sphere_sample(Rng& rng, int n, double r);

// Uniform (by volume) over the shell r_in <= |x| <= r_out; r_in = 0 gives the ball.
Vec uniform_shell_sample(Rng& rng, int n, double r_in, double r_out);

struct CoveringBound {
  LogMeasure size;
  // The (1+o(1)) factor in the exponent is dropped; the value is the
  // leading-order exponent only.
  bool asymptotic = true;
};

// n*log2((a + sqrt(delta)) / sqrt(delta)) for a ball of radius sqrt(n)*a
// covered by balls of radius sqrt(n*delta).
CoveringBound covering_size_log_bound(double ambient_radius, double delta, int n);

struct ToyCoveringSpec {
  int n = 2;
  double outer_radius = 1.0;  // per-dimension: actual radius sqrt(n)*outer_radius
  double inner_radius = 0.0;  // > 0 for a shell
  double delta = 0.25;        // covering radius sqrt(n*delta)
  std::size_t probes = 10000;
  std::size_t center_budget = 1000000;
};

struct ToyCovering {
  int n = 0;
  double covering_radius = 0.0;
  std::vector<double> centers;  // row-major, n per center
  std::size_t certified_probes = 0;
  std::size_t rounds = 0;

  std::size_t size() const { return n == 0 ? 0 : centers.size() / static_cast<std::size_t>(n); }
  std::span<const double> center(std::size_t i) const {
    return {centers.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  std::size_t nearest(std::span<const double> x) const;
};

// Greedy random covering. Each round draws a probe batch; uncovered probes
// are inserted farthest-first. Stops once a full batch is covered, which is
// the certificate. Throws SizingError past the center budget.
ToyCovering build_toy_covering(Rng& rng, const ToyCoveringSpec& spec);

enum class TailSide { above, below, two_sided };

// Chi-square concentration for |g|^2 with g ~ N(0, sigma2 I_n), relative
// deviation eps. Scale-free, so sigma2 only checks the domain.
double gaussian_norm_tail_bound(int n, double sigma2, double eps, TailSide side);

// P(|<a, b>| > n*zeta) for a isotropic on the sphere of radius norm_a.
double inner_product_tail_bound(int n, double norm_a, double norm_b, double zeta);

// P(|g| >= eps) for scalar g ~ N(0, sigma2).
double gaussian_scalar_tail_bound(double sigma2, double eps);

// Bounds on the three atypical-observation events for z = x + s_z:
// noise norm outside sqrt(n sigma2 (1 +- eps)); |cos angle(x, s_z)| >= eps;
// |z|^2 outside n(P + sigma2)(1 +- eps).
struct AtypicalityBounds {
  double noise_norm = 1.0;
  double angle = 1.0;
  double observation_norm = 1.0;
  double eps1 = 0.0;  // inner tolerance used for the observation-norm event
};

AtypicalityBounds atypicality_bounds(int n, double P, double sigma2, double eps);

}  // namespace myopic
