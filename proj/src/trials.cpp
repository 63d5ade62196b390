#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "myopic/errors.hpp"
#include "myopic/experiments.hpp"
#include "myopic/rng.hpp"

namespace myopic {

void TrialConfig::validate() const {
  if (!(std::isfinite(params.P) && params.P > 0.0)) throw ParameterError("P must be finite and > 0");
  if (!(std::isfinite(params.sigma2) && params.sigma2 >= 0.0)) throw ParameterError("sigma2 must be finite and >= 0");
  if (!(std::isfinite(params.N) && params.N >= 0.0)) throw ParameterError("N must be finite and >= 0");
  if (params.N == 0.0 && attack.kind != AttackSpec::Kind::none) {
    throw ParameterError("N = 0 leaves no jammer budget; use attack none");
  }
  if (n < 1) throw ParameterError("n must be >= 1");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (!(rate >= 0.0 && key_rate >= 0.0)) throw ParameterError("rates must be >= 0");
  if (list_radius && !(*list_radius >= 0.0)) throw ParameterError("list radius must be >= 0");
  if (mode == CodebookMode::ensemble && attack_uses_codebook(attack.kind)) {
    throw ParameterError("ensemble mode cannot serve an attack that reads the codebook");
  }
}

double TrialConfig::effective_list_radius() const {
  return list_radius ? *list_radius : std::sqrt(n * params.N);
}

void TrialTally::merge(const TrialTally& other) {
  errors += other.errors;
  trials += other.trials;
  clip_count += other.clip_count;
  tie_count += other.tie_count;
  for (const auto& [size, count] : other.list_size_histogram) list_size_histogram[size] += count;
}

namespace {

struct Prepared {
  TrialConfig config;
  const SphericalCodebook* cb = nullptr;  // null in ensemble mode
  double message_bits = 0.0;
};

JamResult jam(const Prepared& prep, std::span<const double> x, std::span<const double> z, Rng& rng) {
  JamContext ctx{z, prep.cb, prep.config.params, &rng};
  return apply_attack(prep.config.attack, ctx, x);
}

void fixed_trial(const Prepared& prep, std::size_t t, TrialTally& tally) {
  const TrialConfig& c = prep.config;
  const SphericalCodebook& cb = *prep.cb;
  Rng rng = make_stream(c.seed, StreamTag::trial, t);
  std::uniform_int_distribution<std::size_t> pick_m(0, cb.message_count() - 1);
  std::uniform_int_distribution<std::size_t> pick_k(0, cb.key_count() - 1);
  const std::size_t m = pick_m(rng);
  const std::size_t k = pick_k(rng);
  auto x = cb.codeword(m, k);
  const Vec z = awgn_observe(rng, x, c.params.sigma2);
  const JamResult j = jam(prep, x, z, rng);
  const Vec y = add(x, j.s);

  ++tally.trials;
  if (j.clipped) ++tally.clip_count;
  if (c.decoder == DecoderKind::min_distance) {
    const DecodeOutcome out = min_distance_decode(cb, y, k);
    if (out.tie_flag) ++tally.tie_count;
    if (out.m_hat != m) ++tally.errors;
  } else {
    const auto list = list_decode(cb, y, k, c.effective_list_radius());
    ++tally.list_size_histogram[list.size()];
    if (!std::binary_search(list.begin(), list.end(), m)) ++tally.errors;
  }
}

// Fresh random codebook per trial, drawn lazily: only the transmitted
// codeword is materialized. The other M - 1 codewords are independent and
// uniform on the sphere, so each lands within distance d of y with the
// cap probability p(d), and the decoder's verdict has a closed-form law.
void ensemble_trial(const Prepared& prep, std::size_t t, TrialTally& tally) {
  const TrialConfig& c = prep.config;
  Rng rng = make_stream(c.seed, StreamTag::trial, t);
  const double sphere = std::sqrt(c.n * c.params.P);
  const Vec x = uniform_sphere_sample(rng, c.n, sphere);
  const Vec z = awgn_observe(rng, x, c.params.sigma2);
  const JamResult j = jam(prep, x, z, rng);
  const Vec y = add(x, j.s);
  const double y_norm = norm(y);
  const double others = std::exp2(prep.message_bits) - 1.0;

  ++tally.trials;
  if (j.clipped) ++tally.clip_count;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (c.decoder == DecoderKind::min_distance) {
    const double d = norm(j.s);
    const double p = cap_fraction(ball_sphere_cap(c.n, sphere, y_norm, d));
    // P(some other codeword is at least as close) = 1 - (1 - p)^(M-1).
    const double p_err = p >= 1.0 ? 1.0 : -std::expm1(others * std::log1p(-p));
    if (unif(rng) < p_err) ++tally.errors;
  } else {
    const double radius = c.effective_list_radius();
    const double p = cap_fraction(ball_sphere_cap(c.n, sphere, y_norm, radius));
    std::binomial_distribution<long long> intruders(static_cast<long long>(others), p);
    const bool own = norm(j.s) <= radius;
    const auto size = static_cast<std::size_t>(intruders(rng)) + (own ? 1 : 0);
    ++tally.list_size_histogram[size];
    if (!own) ++tally.errors;
  }
}

TrialTally run_trials(const Prepared& prep) {
  const TrialConfig& c = prep.config;
  const unsigned threads = std::max(1u, std::min<unsigned>(c.threads, static_cast<unsigned>(c.trials)));
  auto run_range = [&](std::size_t lo, std::size_t hi, TrialTally& out) {
    for (std::size_t t = lo; t < hi; ++t) {
      if (prep.cb) {
        fixed_trial(prep, t, out);
      } else {
        ensemble_trial(prep, t, out);
      }
    }
  };
  std::vector<TrialTally> parts(threads);
  if (threads == 1) {
    run_range(0, c.trials, parts[0]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(threads);
    for (unsigned i = 0; i < threads; ++i) {
      const std::size_t lo = c.trials * i / threads, hi = c.trials * (i + 1) / threads;
      pool.emplace_back([&, i, lo, hi] {
        try {
          run_range(lo, hi, parts[i]);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  TrialTally total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

Prepared prepare(const TrialConfig& config) {
  config.validate();
  Prepared prep{config, nullptr, 0.0};
  if (config.attack.kind == AttackSpec::Kind::scale_and_babble && !config.attack.alpha) {
    prep.config.attack.alpha = minimize_scale_babble(config.params).argument;
  }
  return prep;
}

}  // namespace

PeResult run_pe(const TrialConfig& config, const SphericalCodebook& cb) {
  Prepared prep = prepare(config);
  if (cb.n() != config.n) throw ParameterError("codebook blocklength differs from the config");
  prep.cb = &cb;
  PeResult out;
  out.tally = run_trials(prep);
  out.actual_rate = cb.rate();
  out.actual_key_rate = cb.key_rate();
  out.alpha = prep.config.attack.alpha;
  return out;
}

PeResult run_pe(const TrialConfig& config) {
  Prepared prep = prepare(config);
  const double bits = std::floor(config.n * config.rate + 1e-9);
  const double key_bits = std::floor(config.n * config.key_rate + 1e-9);
  const bool fits = bits + key_bits <= 62.0 && std::exp2(bits + key_bits) <= static_cast<double>(config.budget);
  bool ensemble = config.mode == CodebookMode::ensemble;
  if (config.mode == CodebookMode::automatic && !fits) {
    if (attack_uses_codebook(config.attack.kind)) {
      throw SizingError("codebook of 2^" + std::to_string(static_cast<long long>(bits + key_bits)) +
                        " codewords exceeds the budget and the attack needs it materialized");
    }
    ensemble = true;
  }
  if (ensemble) {
    if (config.decoder == DecoderKind::list && bits > 62.0) {
      throw SizingError("ensemble list decoding supports at most 2^62 messages");
    }
    prep.message_bits = bits;
    PeResult out;
    out.tally = run_trials(prep);
    out.ensemble = true;
    out.actual_rate = bits / config.n;
    out.actual_key_rate = key_bits / config.n;
    out.alpha = prep.config.attack.alpha;
    return out;
  }
  const SphericalCodebook cb =
      SphericalCodebook::generate(config.seed, config.n, config.rate, config.key_rate, config.params.P, config.budget);
  return run_pe(config, cb);
}

}  // namespace myopic
