#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "myopic/errors.hpp"
#include "myopic/geometry.hpp"

using namespace myopic;

namespace {

constexpr double kPi = std::numbers::pi;

// Fraction of uniform sphere samples inside a cap around e_1.
double monte_carlo_cap(int n, double sphere_radius, double chord, std::size_t samples, std::uint64_t seed) {
  Rng rng = make_stream(seed, StreamTag::selftest, static_cast<std::uint64_t>(n));
  Vec pole(static_cast<std::size_t>(n), 0.0);
  pole[0] = sphere_radius;
  Vec v(static_cast<std::size_t>(n));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    uniform_sphere_sample(rng, v, sphere_radius);
    if (distance_sq(v, pole) <= chord * chord) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace

TEST(SphereArea, LowDimensionalValues) {
  EXPECT_NEAR(sphere_log_area(2, 1.0).log2_value, std::log2(2 * kPi), 1e-13);
  EXPECT_NEAR(sphere_log_area(3, 1.0).log2_value, std::log2(4 * kPi), 1e-13);
  EXPECT_NEAR(sphere_log_area(4, 2.0).log2_value, std::log2(2 * kPi * kPi * 8), 1e-13);
}

TEST(SphereArea, RadiusScalingIsExact) {
  for (int n : {2, 7, 50, 3000}) {
    for (double r : {0.5, 3.0, 40.0}) {
      EXPECT_NEAR(sphere_log_area(n, r).log2_value - sphere_log_area(n, 1.0).log2_value, (n - 1) * std::log2(r),
                  1e-9 * n);
    }
  }
}

TEST(SphereArea, StaysFiniteInHighDimension) {
  const LogMeasure m = sphere_log_area(10000, 1.0);
  EXPECT_FALSE(m.is_zero);
  EXPECT_TRUE(std::isfinite(m.log2_value));
}

TEST(BallVolume, LowDimensionalValues) {
  EXPECT_NEAR(ball_log_volume(1, 1.0).log2_value, 1.0, 1e-13);
  EXPECT_NEAR(ball_log_volume(2, 1.0).log2_value, std::log2(kPi), 1e-13);
  EXPECT_NEAR(ball_log_volume(3, 1.0).log2_value, std::log2(4 * kPi / 3), 1e-13);
}

TEST(CapFraction, HemisphereIsHalfExactly) {
  for (int n : {2, 3, 4, 8, 16, 100, 5000}) {
    EXPECT_EQ(cap_fraction({n, 1.0, std::sqrt(2.0)}), 0.5) << "n=" << n;
  }
}

TEST(CapFraction, WholeSphereAndEmptyCap) {
  EXPECT_EQ(cap_fraction({5, 1.0, 2.0}), 1.0);
  EXPECT_THROW(cap_fraction({5, 1.0, 3.0}), ParameterError);  // chord beyond the diameter
  EXPECT_EQ(cap_fraction({5, 1.0, 0.0}), 0.0);
}

TEST(CapFraction, ThreeDimensionalClosedForm) {
  // Archimedes: the cap area fraction is (1 - cos theta) / 2.
  EXPECT_NEAR(cap_fraction({3, 1.0, 1.0}), 0.25, 1e-14);
  for (double chord : {0.3, 0.9, 1.5, 1.9}) {
    const double cos_theta = 1.0 - chord * chord / 2.0;
    EXPECT_NEAR(cap_fraction({3, 1.0, chord}), (1.0 - cos_theta) / 2.0, 1e-13);
  }
}

TEST(CapFraction, MonotoneInChord) {
  for (int n : {2, 5, 40}) {
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double f = cap_fraction({n, 1.0, 2.0 * i / 400.0});
      EXPECT_GE(f, prev);
      prev = f;
    }
  }
}

TEST(CapFraction, AgreesWithMonteCarlo) {
  for (int n : {4, 8}) {
    for (double chord : {0.8, 1.3}) {
      const double p = cap_fraction({n, 2.0, 2.0 * chord});
      const std::size_t samples = 100000;
      const double se = std::sqrt(p * (1 - p) / samples);
      EXPECT_NEAR(monte_carlo_cap(n, 2.0, 2.0 * chord, samples, 11), p, 3 * se) << "n=" << n << " chord=" << chord;
    }
  }
}

TEST(CapFraction, LogDomainMatchesLinear) {
  for (int n : {3, 20, 200}) {
    for (double chord : {0.2, 0.7, 1.2, 1.41}) {
      const CapSpec cap{n, 1.0, chord};
      const double f = cap_fraction(cap);
      if (f < 1e-300) continue;
      EXPECT_NEAR(cap_log_fraction(cap).log2_value, std::log2(f), 1e-9);
    }
  }
  // Far below double range the log domain still answers.
  const LogMeasure tiny = cap_log_fraction({20000, 1.0, 0.1});
  EXPECT_FALSE(tiny.is_zero);
  EXPECT_LT(tiny.log2_value, -1e4);
}

TEST(CapFraction, InsideTheSandwich) {
  for (int n : {2, 3, 8, 30, 300}) {
    for (double chord : {0.05, 0.4, 0.9, 1.3, 1.414}) {
      const CapSpec cap{n, 1.0, chord};
      const CapSandwich s = cap_fraction_sandwich(cap);
      const double f = cap_fraction(cap);
      EXPECT_LE(s.lower, f * (1 + 1e-12)) << n << " " << chord;
      EXPECT_GE(s.upper, f * (1 - 1e-12)) << n << " " << chord;
    }
  }
}

TEST(CapFraction, RejectsInvalidSpecs) {
  EXPECT_THROW(cap_fraction({0, 1.0, 0.5}), ParameterError);
  EXPECT_THROW(cap_fraction({3, -1.0, 0.5}), ParameterError);
  EXPECT_THROW(cap_fraction({3, 1.0, -0.5}), ParameterError);
}

TEST(StripFraction, Examples) {
  EXPECT_NEAR(strip_fraction({6, 1.0, 0.0, 2.0}), 1.0, 1e-15);
  EXPECT_EQ(strip_fraction({6, 1.0, 0.7, 0.7}), 0.0);
  EXPECT_NEAR(strip_fraction({3, 1.0, 1.0, std::sqrt(2.0)}), 0.25, 1e-14);
}

TEST(BallSphereCap, ChordMatchesGeometry) {
  // Points of the radius-R sphere within distance rho of a point at norm t.
  const int n = 5;
  const double R = 2.0, t = 1.5, rho = 1.2;
  const CapSpec cap = ball_sphere_cap(n, R, t, rho);
  // Boundary circle: |x| = R and |x - t e1| = rho, so x1 = (R^2 + t^2 - rho^2) / (2t).
  const double x1 = (R * R + t * t - rho * rho) / (2 * t);
  EXPECT_NEAR(cap.chord_radius * cap.chord_radius, 2 * R * (R - x1), 1e-12);
  EXPECT_EQ(ball_sphere_cap(n, R, t, 0.1).chord_radius, 0.0);  // ball misses the sphere
  EXPECT_EQ(ball_sphere_cap(n, R, t, 10.0).chord_radius, 2 * R);
}

TEST(SphereSampling, OneDimensionIsASign) {
  Rng rng = make_stream(3, StreamTag::selftest, 0);
  for (int i = 0; i < 100; ++i) {
    const Vec v = uniform_sphere_sample(rng, 1, 5.0);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(std::fabs(v[0]), 5.0);
  }
}

TEST(SphereSampling, NormAndIsotropy) {
  Rng rng = make_stream(4, StreamTag::selftest, 0);
  const int n = 8;
  const std::size_t draws = 100000;
  const double r = 3.0;
  Vec mean(n, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const Vec v = uniform_sphere_sample(rng, n, r);
    ASSERT_NEAR(norm(v), r, 1e-12 * r);
    for (int j = 0; j < n; ++j) mean[j] += v[j] / draws;
  }
  const double sd = r / std::sqrt(n * static_cast<double>(draws));
  for (double m : mean) EXPECT_LT(std::fabs(m), 3 * sd);
}

TEST(ShellSampling, StaysInsideShell) {
  Rng rng = make_stream(5, StreamTag::selftest, 0);
  for (int i = 0; i < 1000; ++i) {
    const double r = norm(uniform_shell_sample(rng, 6, 1.0, 2.0));
    EXPECT_GE(r, 1.0 - 1e-12);
    EXPECT_LE(r, 2.0 + 1e-12);
  }
}

TEST(CoveringBound, Examples) {
  const CoveringBound b = covering_size_log_bound(1.0, 1.0, 7);
  EXPECT_TRUE(b.asymptotic);
  EXPECT_NEAR(b.size.log2_value, 7.0, 1e-12);
  EXPECT_NEAR(covering_size_log_bound(1.0, 1e30, 7).size.log2_value, 0.0, 1e-12);
  // Observation-shell covering: ambient radius sqrt((P + sigma2)(1 + eps)).
  const double P = 1.0, s2 = 0.5, eps = 0.1, dz = 0.05;
  const double amb = std::sqrt((P + s2) * (1 + eps));
  EXPECT_NEAR(covering_size_log_bound(amb, dz, 20).size.log2_value, 20 * std::log2((amb + std::sqrt(dz)) / std::sqrt(dz)),
              1e-10);
}

TEST(ToyCovering, OneDimension) {
  Rng rng = make_stream(6, StreamTag::covering, 0);
  const ToyCovering c = build_toy_covering(rng, {1, 1.0, 0.0, 1.0});
  EXPECT_LE(c.size(), 3u);
  EXPECT_GE(c.certified_probes, 10000u);
}

TEST(ToyCovering, ProbeCertificateAndSizeBound) {
  for (int n : {2, 4, 6}) {
    Rng rng = make_stream(7, StreamTag::covering, static_cast<std::uint64_t>(n));
    const ToyCoveringSpec spec{n, 1.0, 0.0, 0.25};
    const ToyCovering c = build_toy_covering(rng, spec);
    // Fresh probes from an independent stream.
    Rng probe = make_stream(8, StreamTag::covering, static_cast<std::uint64_t>(n));
    std::size_t violations = 0;
    for (int i = 0; i < 10000; ++i) {
      const Vec x = uniform_shell_sample(probe, n, 0.0, std::sqrt(n * 1.0));
      if (distance_sq(c.center(c.nearest(x)), x) > c.covering_radius * c.covering_radius) ++violations;
    }
    // Greedy certification is probabilistic; allow a sliver of uncovered volume.
    EXPECT_LE(violations, 10u) << "n=" << n;
    const double bound = covering_size_log_bound(1.0, 0.25, n).size.log2_value;
    EXPECT_LE(std::log2(static_cast<double>(c.size())), bound * 1.5) << "n=" << n;
  }
}

TEST(ToyCovering, BudgetExceeded) {
  Rng rng = make_stream(9, StreamTag::covering, 0);
  ToyCoveringSpec spec{6, 1.0, 0.0, 0.01};
  spec.center_budget = 50;
  EXPECT_THROW(build_toy_covering(rng, spec), SizingError);
}

TEST(NormTail, ClosedForms) {
  EXPECT_EQ(gaussian_norm_tail_bound(10, 1.0, 0.0, TailSide::above), 1.0);
  EXPECT_EQ(gaussian_norm_tail_bound(10, 1.0, 0.0, TailSide::below), 1.0);
  EXPECT_EQ(gaussian_norm_tail_bound(10, 1.0, 0.0, TailSide::two_sided), 1.0);
  EXPECT_NEAR(gaussian_norm_tail_bound(100, 1.0, 0.5, TailSide::above), std::exp(-6.25), 1e-15);
  EXPECT_NEAR(gaussian_norm_tail_bound(100, 1.0, 0.5, TailSide::below), std::exp(-12.5), 1e-18);
}

TEST(NormTail, DominatesEmpiricalChiSquare) {
  const int n = 20;
  const double s2 = 2.0;
  Rng rng = make_stream(10, StreamTag::selftest, 0);
  std::normal_distribution<double> g(0.0, std::sqrt(s2));
  const std::size_t draws = 100000;
  std::vector<double> q(draws);
  for (auto& v : q) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = g(rng);
      acc += x * x;
    }
    v = acc;
  }
  for (double eps : {0.2, 0.5, 1.0}) {
    std::size_t above = 0, below = 0;
    for (double v : q) {
      above += v >= n * s2 * (1 + eps);
      below += v <= n * s2 * (1 - eps);
    }
    EXPECT_LE(static_cast<double>(above) / draws, gaussian_norm_tail_bound(n, s2, eps, TailSide::above));
    EXPECT_LE(static_cast<double>(below) / draws, gaussian_norm_tail_bound(n, s2, eps, TailSide::below));
  }
}

TEST(InnerProductTail, ClosedForms) {
  EXPECT_EQ(inner_product_tail_bound(10, 1.0, 1.0, 0.0), 1.0);
  const int n = 101;
  EXPECT_NEAR(inner_product_tail_bound(n, std::sqrt(n), std::sqrt(n), 1.0), std::exp2(-50.0), 1e-25);
}

TEST(InnerProductTail, DominatesEmpiricalTail) {
  const int n = 16;
  const double a = 2.0, b = 3.0;
  Rng rng = make_stream(12, StreamTag::selftest, 0);
  const std::size_t draws = 100000;
  std::vector<double> ip(draws);
  Vec e(n, 0.0);
  e[0] = a;
  for (auto& v : ip) v = std::fabs(dot(e, uniform_sphere_sample(rng, n, b)));
  for (double zeta : {0.05, 0.1, 0.2, 0.4}) {
    std::size_t hits = 0;
    for (double v : ip) hits += v >= n * zeta;
    EXPECT_LE(static_cast<double>(hits) / draws, inner_product_tail_bound(n, a, b, zeta)) << zeta;
  }
}

TEST(ScalarTail, ClosedForm) {
  EXPECT_EQ(gaussian_scalar_tail_bound(1.0, 0.0), 1.0);
  EXPECT_NEAR(gaussian_scalar_tail_bound(1.0, 3.0), 2 * std::exp(-4.5), 1e-15);
}

TEST(AtypicalityBounds, InnerToleranceSolvesTheConstraint) {
  const double P = 1.0, s2 = 0.5, eps = 0.3;
  const AtypicalityBounds b = atypicality_bounds(128, P, s2, eps);
  const double lhs = s2 * b.eps1 + 2 * std::sqrt(P * s2 * (1 + b.eps1)) * b.eps1;
  EXPECT_NEAR(lhs, (P + s2) * eps, 1e-9);
  EXPECT_LE(b.noise_norm, b.angle);
  EXPECT_LE(b.observation_norm, 1.0);
}

TEST(IncompleteBeta, LogDomainMatchesBoost) {
  for (double a : {0.5, 3.5, 40.0}) {
    for (double b : {0.5, 2.0}) {
      for (double x : {0.01, 0.3, 0.7, 0.99}) {
        EXPECT_NEAR(log_ibeta(a, b, x), std::log(boost::math::ibeta(a, b, x)), 1e-11) << a << " " << b << " " << x;
      }
    }
  }
}
