#include "myopic/jammers.hpp"

#include <cmath>
#include <random>

#include "myopic/errors.hpp"

namespace myopic {

namespace {

Rng& need_rng(const JamContext& ctx) {
  if (ctx.rng == nullptr) throw ParameterError("jammer needs an rng stream");
  return *ctx.rng;
}

const SphericalCodebook& need_codebook(const JamContext& ctx) {
  if (ctx.codebook == nullptr) throw ParameterError("jammer needs the codebook");
  if (ctx.codebook->n() != static_cast<int>(ctx.z.size())) throw ParameterError("codebook and z disagree on n");
  return *ctx.codebook;
}

double budget(const JamContext& ctx) { return std::sqrt(static_cast<double>(ctx.z.size()) * ctx.params.N); }

// Scales v down onto the power sphere when it is outside.
JamResult clip(Vec v, double limit) {
  JamResult r;
  const double len = norm(v);
  if (len > limit) {
    r.beta = limit / len;
    r.clipped = true;
    scale_in_place(v, r.beta);
  }
  r.s = std::move(v);
  return r;
}

std::size_t draw_codeword(const SphericalCodebook& cb, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
  return pick(rng);
}

}  // namespace

Vec awgn_observe(Rng& rng, std::span<const double> x, double sigma2) {
  if (!(sigma2 >= 0.0)) throw ParameterError("awgn_observe: sigma2 must be >= 0");
  Vec z(x.begin(), x.end());
  if (sigma2 == 0.0) return z;
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2));
  for (double& v : z) v += gauss(rng);
  return z;
}

JamResult jam_oblivious(const JamContext& ctx, double backoff) {
  if (!(backoff >= 0.0 && backoff < 1.0)) throw ParameterError("oblivious backoff must lie in [0,1)");
  Rng& rng = need_rng(ctx);
  std::normal_distribution<double> gauss(0.0, std::sqrt(ctx.params.N * (1.0 - backoff)));
  Vec s(ctx.z.size());
  for (double& v : s) v = gauss(rng);
  return clip(std::move(s), budget(ctx));
}

JamResult jam_scale_and_babble(const JamContext& ctx, double alpha, double eps) {
  const ChannelParams& p = ctx.params;
  const double a_max = std::sqrt(p.N / (p.P + p.sigma2));
  if (!(alpha > 0.0 && alpha <= a_max * (1.0 + 1e-12))) {
    throw ParameterError("scale-and-babble: alpha must lie in (0, sqrt(N/(P+sigma2))]");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("scale-and-babble: eps must lie in (0,1)");
  Rng& rng = need_rng(ctx);
  const double gamma2 = std::max(0.0, (p.N - alpha * alpha * (p.P + p.sigma2)) * (1.0 - eps));
  Vec v(ctx.z.size());
  if (gamma2 > 0.0) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(gamma2));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -alpha * ctx.z[i] + gauss(rng);
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -alpha * ctx.z[i];
  }
  return clip(std::move(v), budget(ctx));
}

JamResult jam_symmetrize_z_aware(const JamContext& ctx) {
  const SphericalCodebook& cb = need_codebook(ctx);
  const std::size_t f = draw_codeword(cb, need_rng(ctx));
  auto xp = cb.row(f);
  Vec v(ctx.z.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (xp[i] - ctx.z[i]);
  JamResult r = clip(std::move(v), budget(ctx));
  r.aux_message = f % cb.message_count();
  r.aux_key = f / cb.message_count();
  return r;
}

JamResult jam_symmetrize_z_agnostic(const JamContext& ctx) {
  if (ctx.params.N < ctx.params.P) {
    throw ParameterError("z-agnostic symmetrization needs N >= P; a codeword exceeds the jammer budget");
  }
  const SphericalCodebook& cb = need_codebook(ctx);
  const std::size_t f = draw_codeword(cb, need_rng(ctx));
  auto xp = cb.row(f);
  JamResult r;
  r.s.assign(xp.begin(), xp.end());
  r.aux_message = f % cb.message_count();
  r.aux_key = f / cb.message_count();
  return r;
}

JamResult jam_push_to_origin(const JamContext& ctx, std::span<const double> x_estimate) {
  if (x_estimate.size() != ctx.z.size()) throw ParameterError("push: estimate has wrong length");
  const double len = norm(x_estimate);
  if (!(len > 0.0)) throw DegenerateGeometry("push: estimate is the zero vector");
  JamResult r;
  r.s.assign(x_estimate.begin(), x_estimate.end());
  scale_in_place(r.s, -budget(ctx) / len);
  return r;
}

AttackSpec::Kind parse_attack_kind(const std::string& name) {
  using K = AttackSpec::Kind;
  for (K k : {K::none, K::oblivious, K::scale_and_babble, K::symmetrize_z_aware, K::symmetrize_z_agnostic,
              K::push_to_origin, K::push_to_origin_omniscient}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown attack '" + name + "'");
}

std::string to_string(AttackSpec::Kind kind) {
  using K = AttackSpec::Kind;
  switch (kind) {
    case K::none: return "none";
    case K::oblivious: return "oblivious";
    case K::scale_and_babble: return "scale_and_babble";
    case K::symmetrize_z_aware: return "symmetrize_z_aware";
    case K::symmetrize_z_agnostic: return "symmetrize_z_agnostic";
    case K::push_to_origin: return "push_to_origin";
    case K::push_to_origin_omniscient: return "push_to_origin_omniscient";
  }
  return "?";
}

bool attack_uses_codebook(AttackSpec::Kind kind) {
  return kind == AttackSpec::Kind::symmetrize_z_aware || kind == AttackSpec::Kind::symmetrize_z_agnostic;
}

JamResult apply_attack(const AttackSpec& spec, const JamContext& ctx, std::span<const double> x) {
  using K = AttackSpec::Kind;
  switch (spec.kind) {
    case K::none: {
      JamResult r;
      r.s.assign(ctx.z.size(), 0.0);
      return r;
    }
    case K::oblivious:
      return jam_oblivious(ctx, spec.backoff);
    case K::scale_and_babble: {
      const double alpha = spec.alpha ? *spec.alpha : minimize_scale_babble(ctx.params).argument;
      return jam_scale_and_babble(ctx, alpha, spec.babble_eps);
    }
    case K::symmetrize_z_aware:
      return jam_symmetrize_z_aware(ctx);
    case K::symmetrize_z_agnostic:
      return jam_symmetrize_z_agnostic(ctx);
    case K::push_to_origin:
      return jam_push_to_origin(ctx, ctx.z);
    case K::push_to_origin_omniscient:
      return jam_push_to_origin(ctx, x);
  }
  throw ParameterError("unhandled attack");
}

}  // namespace myopic
