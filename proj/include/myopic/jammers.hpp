#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "myopic/capacity.hpp"
#include "myopic/codec.hpp"
#include "myopic/rng.hpp"
#include "myopic/vecops.hpp"

namespace myopic {

struct JamContext {
  std::span<const double> z;
  const SphericalCodebook* codebook = nullptr;  // may be null for codebook-blind attacks
  ChannelParams params;
  Rng* rng = nullptr;
};

struct JamResult {
  Vec s;
  bool clipped = false;
  double beta = 1.0;
  std::optional<std::size_t> aux_message;
  std::optional<std::size_t> aux_key;
};

// Power slack allowed on top of sqrt(nN).
inline constexpr double kPowerSlack = 1e-9;

Vec awgn_observe(Rng& rng, std::span<const double> x, double sigma2);

// Codebook-blind Gaussian noise at variance N(1 - backoff).
JamResult jam_oblivious(const JamContext& ctx, double backoff = 0.01);

// s = beta(-alpha z + g), g ~ N(0, gamma^2 I), gamma^2 = (N - alpha^2(P + sigma2))(1 - eps).
JamResult jam_scale_and_babble(const JamContext& ctx, double alpha, double eps = 0.05);

// Pushes z halfway to a uniformly drawn codeword: s = beta (x' - z) / 2.
JamResult jam_symmetrize_z_aware(const JamContext& ctx);

// Transmits a uniformly drawn codeword. Needs N >= P.
JamResult jam_symmetrize_z_agnostic(const JamContext& ctx);

// Full-power push against the estimate: s = -sqrt(nN) x_est / |x_est|.
JamResult jam_push_to_origin(const JamContext& ctx, std::span<const double> x_estimate);

struct AttackSpec {
  enum class Kind {
    none,
    oblivious,
    scale_and_babble,
    symmetrize_z_aware,
    symmetrize_z_agnostic,
    push_to_origin,             // myopic: pushes against z
    push_to_origin_omniscient,  // pushes against the true codeword
  };
  Kind kind = Kind::none;
  std::optional<double> alpha;  // scale-and-babble; empty means the optimizer's argmin
  double babble_eps = 0.05;
  double backoff = 0.01;
};

AttackSpec::Kind parse_attack_kind(const std::string& name);
std::string to_string(AttackSpec::Kind kind);

// True when the attack reads codewords, so the codebook must be materialized.
bool attack_uses_codebook(AttackSpec::Kind kind);

// Dispatch by name; x is only read by the omniscient push.
JamResult apply_attack(const AttackSpec& spec, const JamContext& ctx, std::span<const double> x);

}  // namespace myopic
