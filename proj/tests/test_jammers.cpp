#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "myopic/errors.hpp"
#include "myopic/geometry.hpp"
#include "myopic/jammers.hpp"

using namespace myopic;

namespace {

JamContext context(std::span<const double> z, const ChannelParams& p, Rng& rng,
                   const SphericalCodebook* cb = nullptr) {
  JamContext ctx;
  ctx.z = z;
  ctx.params = p;
  ctx.rng = &rng;
  ctx.codebook = cb;
  return ctx;
}

}  // namespace

TEST(Observe, NoiselessIsIdentity) {
  Rng rng = make_stream(1, StreamTag::selftest, 0);
  const Vec x = uniform_sphere_sample(rng, 16, 4.0);
  EXPECT_EQ(awgn_observe(rng, x, 0.0), x);
  EXPECT_THROW(awgn_observe(rng, x, -1.0), ParameterError);
}

TEST(Observe, NoiseEnergyMatchesChiSquare) {
  // |z - x|^2 / sigma2 is chi-square with n degrees of freedom: mean n, variance 2n.
  const int n = 32, trials = 4000;
  const double sigma2 = 0.7;
  Rng rng = make_stream(2, StreamTag::selftest, 0);
  const Vec x(n, 0.0);
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) sum += distance_sq(awgn_observe(rng, x, sigma2), x) / sigma2;
  EXPECT_NEAR(sum / trials, n, 4 * std::sqrt(2.0 * n / trials));
}

TEST(Oblivious, StaysInBudgetAndHasRightVariance) {
  const int n = 64, trials = 2000;
  const ChannelParams p{1, 0.5, 1};
  Rng rng = make_stream(3, StreamTag::attack, 0);
  const Vec z(n, 0.0);
  double energy = 0.0;
  for (int t = 0; t < trials; ++t) {
    const JamResult r = jam_oblivious(context(z, p, rng), 0.01);
    EXPECT_LE(norm(r.s), std::sqrt(n * p.N) * (1 + kPowerSlack));
    energy += dot(r.s, r.s);
  }
  // |s|^2 = min(c X, nN) with X ~ chi-square(n), c = N(1 - backoff).
  // E[min(cX, L)] = c n F_{n+2}(L/c) + L (1 - F_n(L/c)).
  const double c = p.N * 0.99, L = n * p.N;
  const auto F = [](double k, double v) { return boost::math::gamma_p(k / 2, v / 2); };
  const double expected = c * n * F(n + 2, L / c) + L * (1 - F(n, L / c));
  EXPECT_NEAR(energy / trials, expected, 4 * c * std::sqrt(2.0 * n / trials));
  EXPECT_THROW(jam_oblivious(context(z, p, rng), 1.0), ParameterError);
}

TEST(ScaleAndBabble, RejectsInfeasibleAlpha) {
  const ChannelParams p{1, 0.5, 1};
  Rng rng = make_stream(4, StreamTag::attack, 0);
  const Vec z(8, 1.0);
  EXPECT_THROW(jam_scale_and_babble(context(z, p, rng), 0.6), ParameterError);  // sqrt(0.25) = 0.5
  EXPECT_THROW(jam_scale_and_babble(context(z, p, rng), 0.0), ParameterError);
  EXPECT_THROW(jam_scale_and_babble(context(z, p, rng), 0.3, 0.0), ParameterError);
  EXPECT_NO_THROW(jam_scale_and_babble(context(z, p, rng), 0.5));
}

TEST(ScaleAndBabble, BabbleVarianceMatches) {
  // With z = 0 the output is pure babble of variance (N - alpha^2 (P + sigma2))(1 - eps).
  const int n = 200, trials = 500;
  const ChannelParams p{1, 0.5, 1};
  const double alpha = 0.3, eps = 0.05;
  const double gamma2 = (p.N - alpha * alpha * (p.P + p.sigma2)) * (1 - eps);
  Rng rng = make_stream(5, StreamTag::attack, 0);
  const Vec z(n, 0.0);
  double energy = 0.0;
  for (int t = 0; t < trials; ++t) {
    const JamResult r = jam_scale_and_babble(context(z, p, rng), alpha, eps);
    energy += dot(r.s, r.s);
  }
  EXPECT_NEAR(energy / trials / n, gamma2, 4 * gamma2 * std::sqrt(2.0 / (n * trials)));
}

TEST(ScaleAndBabble, ScalesTheObservation) {
  // At alpha = alpha_max there is no babble: s = -alpha z, clipped if needed.
  const ChannelParams p{1, 0.5, 1};
  const double a_max = std::sqrt(p.N / (p.P + p.sigma2));
  Rng rng = make_stream(6, StreamTag::attack, 0);
  const Vec z = uniform_sphere_sample(rng, 10, std::sqrt(10 * (p.P + p.sigma2)) * 0.9);
  const JamResult r = jam_scale_and_babble(context(z, p, rng), a_max);
  EXPECT_FALSE(r.clipped);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(r.s[i], -a_max * z[i], 1e-15);
}

TEST(SymmetrizeZAware, EnergyWithinQuarterBound) {
  const int n = 16, trials = 3000;
  const ChannelParams p{1, 1, 1};
  const auto cb = SphericalCodebook::generate(7, n, 0.5, 0.0, p.P);
  Rng rng = make_stream(7, StreamTag::attack, 0);
  double energy = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vec z = awgn_observe(rng, cb.codeword(t % cb.message_count(), 0), p.sigma2);
    const JamResult r = jam_symmetrize_z_aware(context(z, p, rng, &cb));
    EXPECT_LE(norm(r.s), std::sqrt(n * p.N) * (1 + kPowerSlack));
    ASSERT_TRUE(r.aux_message.has_value());
    energy += dot(r.s, r.s);
  }
  const double bound = 0.25 * (2 * n * p.P + n * p.sigma2);
  EXPECT_LE(energy / trials, bound * 1.02);
}

TEST(SymmetrizeZAware, NoiselessOutputIsTheMidpoint) {
  const int n = 12;
  const ChannelParams p{1, 1, 0};
  const auto cb = SphericalCodebook::generate(8, n, 0.5, 0.0, p.P);
  Rng rng = make_stream(8, StreamTag::attack, 0);
  for (int t = 0; t < 50; ++t) {
    const auto x = cb.codeword(t % cb.message_count(), 0);
    const JamResult r = jam_symmetrize_z_aware(context(x, p, rng, &cb));
    EXPECT_FALSE(r.clipped);
    const auto xp = cb.codeword(*r.aux_message, 0);
    const Vec y = add(x, r.s);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(y[i], 0.5 * (x[i] + xp[i]), 1e-12);
  }
}

TEST(SymmetrizeZAgnostic, NeedsEnoughPower) {
  const auto cb = SphericalCodebook::generate(9, 8, 0.5, 0.0, 1.0);
  Rng rng = make_stream(9, StreamTag::attack, 0);
  const Vec z(8, 0.0);
  EXPECT_THROW(jam_symmetrize_z_agnostic(context(z, {1, 0.9, 1}, rng, &cb)), ParameterError);
  const JamResult r = jam_symmetrize_z_agnostic(context(z, {1, 1, 1}, rng, &cb));
  EXPECT_NEAR(norm(r.s), std::sqrt(8.0), 1e-12);
  EXPECT_THROW(jam_symmetrize_z_aware(context(z, {1, 1, 1}, rng, nullptr)), ParameterError);
}

TEST(Push, LandsAtTheExpectedRadius) {
  const int n = 20;
  const ChannelParams p{1, 0.3, 1};
  Rng rng = make_stream(10, StreamTag::attack, 0);
  const Vec x = uniform_sphere_sample(rng, n, std::sqrt(n * p.P));
  const JamResult r = jam_push_to_origin(context(x, p, rng), x);
  EXPECT_NEAR(norm(add(x, r.s)), std::sqrt(n * p.P) - std::sqrt(n * p.N), 1e-12);
  const Vec zero(n, 0.0);
  EXPECT_THROW(jam_push_to_origin(context(x, p, rng), zero), DegenerateGeometry);
}

TEST(Dispatch, NamesRoundTrip) {
  using K = AttackSpec::Kind;
  for (K k : {K::none, K::oblivious, K::scale_and_babble, K::symmetrize_z_aware, K::symmetrize_z_agnostic,
              K::push_to_origin, K::push_to_origin_omniscient}) {
    EXPECT_EQ(parse_attack_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_attack_kind("jam_harder"), ParameterError);
  EXPECT_TRUE(attack_uses_codebook(K::symmetrize_z_aware));
  EXPECT_FALSE(attack_uses_codebook(K::scale_and_babble));
}

TEST(Dispatch, EveryAttackRespectsThePowerConstraint) {
  using K = AttackSpec::Kind;
  const int n = 10;
  const ChannelParams p{1, 1.2, 0.8};
  const auto cb = SphericalCodebook::generate(11, n, 0.5, 0.2, p.P);
  Rng rng = make_stream(11, StreamTag::attack, 0);
  const double limit = std::sqrt(n * p.N) * (1 + kPowerSlack);
  for (K k : {K::none, K::oblivious, K::scale_and_babble, K::symmetrize_z_aware, K::symmetrize_z_agnostic,
              K::push_to_origin, K::push_to_origin_omniscient}) {
    AttackSpec spec;
    spec.kind = k;
    for (int t = 0; t < 10000 / 7; ++t) {
      const auto x = cb.row(t % cb.size());
      const Vec z = awgn_observe(rng, x, p.sigma2);
      const JamResult r = apply_attack(spec, context(z, p, rng, &cb), x);
      ASSERT_EQ(r.s.size(), static_cast<std::size_t>(n));
      ASSERT_LE(norm(r.s), limit) << to_string(k);
    }
  }
}
