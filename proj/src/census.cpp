#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "myopic/errors.hpp"
#include "myopic/experiments.hpp"

namespace myopic {

double quasi_uniformity(const ChannelParams& params, int n, double z_norm, double r_str, double tau, double delta_z) {
  if (n < 1) throw ParameterError("quasi_uniformity: n must be >= 1");
  if (!(params.sigma2 > 0.0)) throw ParameterError("quasi_uniformity: sigma2 must be > 0");
  if (!(tau >= 0.0 && tau < 1.0)) throw ParameterError("quasi_uniformity: tau must lie in [0,1)");
  if (!(r_str >= 0.0 && z_norm >= 0.0 && delta_z >= 0.0)) throw ParameterError("quasi_uniformity: negative input");
  const double r_minus = r_str * (1.0 - tau);
  const double r_plus = r_str * (1.0 + tau);
  if (r_plus >= params.P) throw DegenerateGeometry("quasi_uniformity: strip reaches the equator (r+ >= P)");
  const double nn = static_cast<double>(n);
  const double lever = (z_norm + std::sqrt(nn * delta_z)) / params.sigma2;
  const double denom = std::sqrt(nn * (params.P - r_minus)) + std::sqrt(nn * (params.P - r_plus));
  return std::exp(lever * 2.0 * nn * r_str * tau / denom);
}

Observation typical_observation(Rng& rng, std::span<const double> x, const ChannelParams& params, double eps,
                                std::size_t max_redraws) {
  if (!(eps >= 0.0)) throw ParameterError("typical_observation: eps must be >= 0");
  const double target = static_cast<double>(x.size()) * (params.P + params.sigma2);
  Observation obs;
  for (;;) {
    obs.z = awgn_observe(rng, x, params.sigma2);
    const double z2 = norm_sq(obs.z);
    if (eps == 0.0 || std::fabs(z2 - target) <= eps * target) return obs;
    if (++obs.redraws > max_redraws) throw DegenerateGeometry("typical_observation: redraw limit reached");
  }
}

std::size_t StripCensus::thick_count() const {
  std::size_t total = 0;
  for (const auto& s : strips) total += s.count;
  return total;
}

std::optional<int> StripCensus::strip_of(std::size_t flat) const {
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (std::find(members[j].begin(), members[j].end(), flat) != members[j].end()) return strips[j].index;
  }
  return std::nullopt;
}

namespace {

// log2 of the normalized area of {x on the sphere : |x - z| <= d}.
LogMeasure log_ball_fraction(int n, double sphere, double z_norm, double d) {
  return cap_log_fraction(ball_sphere_cap(n, sphere, z_norm, d));
}

}  // namespace

StripCensus strip_census(const SphericalCodebook& cb, const ChannelParams& params, std::span<const double> z,
                         const StripOptions& opt) {
  const int n = cb.n();
  if (z.size() != static_cast<std::size_t>(n)) throw ParameterError("strip_census: z has wrong length");
  if (!(params.sigma2 > 0.0)) throw ParameterError("strip_census: sigma2 must be > 0");
  if (!(opt.epsilon > 0.0 && opt.delta > 0.0)) throw ParameterError("strip_census: epsilon and delta must be > 0");
  const long long K = std::llround(opt.epsilon / opt.delta);
  if (K < 1 || std::fabs(K * opt.delta - opt.epsilon) > 1e-9 * opt.epsilon) {
    throw ParameterError("strip_census: epsilon must be a whole multiple of delta");
  }

  StripCensus c;
  c.n = n;
  c.epsilon = opt.epsilon;
  c.delta = opt.delta;
  c.half_count = static_cast<int>(K);
  c.message_count = cb.message_count();
  if (opt.delta_z > 0.0) {
    if (opt.net == nullptr || opt.net->n != n) throw ParameterError("strip_census: delta_z > 0 needs a net of matching dimension");
    auto q = opt.net->center(opt.net->nearest(z));
    c.z_hat.assign(q.begin(), q.end());
  } else {
    c.z_hat.assign(z.begin(), z.end());
  }
  c.z_hat_norm = norm(c.z_hat);

  const double scale = n * params.sigma2;
  const double sphere = std::sqrt(n * cb.power());
  const std::size_t strip_total = 2 * static_cast<std::size_t>(K);
  c.members.assign(strip_total, {});

  // Lexicographic (m, k) walk so member lists come out already ordered.
  const std::size_t M = cb.message_count(), Kc = cb.key_count();
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t k = 0; k < Kc; ++k) {
      const std::size_t f = cb.flat_index(m, k);
      const double t = (distance_sq(cb.row(f), c.z_hat) / scale - 1.0) / opt.delta;
      const double i = std::ceil(t);
      if (i < static_cast<double>(1 - K) || i > static_cast<double>(K)) continue;
      c.members[static_cast<std::size_t>(static_cast<long long>(i) + K - 1)].push_back(f);
    }
  }

  const double total_bits = cb.message_bits() + cb.key_bits();
  const double e_str_floor = std::exp2(3.0 * n * opt.ogs_epsilon);
  auto base_radius = [&](double d, bool& past_equator) {
    // Per-dimension squared radius of the circle {|x| = sphere, |x - z| = d}.
    const double cosphi = (sphere * sphere + c.z_hat_norm * c.z_hat_norm - d * d) / (2.0 * sphere * c.z_hat_norm);
    if (cosphi <= 0.0) past_equator = true;
    const double cc = std::clamp(cosphi, -1.0, 1.0);
    return cb.power() * (1.0 - cc * cc);
  };

  c.delta_factor = 1.0;
  for (long long i = 1 - K; i <= K; ++i) {
    StripRow row;
    row.index = static_cast<int>(i);
    row.inner_distance = std::sqrt(std::max(0.0, scale * (1.0 + (i - 1) * opt.delta)));
    row.outer_distance = std::sqrt(scale * (1.0 + i * opt.delta));
    const auto& mem = c.members[static_cast<std::size_t>(i + K - 1)];
    row.count = mem.size();
    row.e_str = static_cast<double>(row.count) < e_str_floor;

    const LogMeasure outer = log_ball_fraction(n, sphere, c.z_hat_norm, row.outer_distance);
    const LogMeasure inner = log_ball_fraction(n, sphere, c.z_hat_norm, row.inner_distance);
    row.fraction = std::max(0.0, outer.value() - inner.value());
    double log2_fraction = -1074.0;  // floor for a strip of zero area
    if (!outer.is_zero) {
      if (inner.is_zero) {
        log2_fraction = outer.log2_value;
      } else if (inner.log2_value < outer.log2_value) {
        log2_fraction = outer.log2_value +
                        std::log1p(-std::exp2(inner.log2_value - outer.log2_value)) / std::numbers::ln2;
      }
    }
    row.expected_log2_count = log2_fraction + total_bits;

    bool past_equator = c.z_hat_norm == 0.0;
    if (!past_equator) {
      const double r_minus = base_radius(row.inner_distance, past_equator);
      const double r_plus = base_radius(row.outer_distance, past_equator);
      const double r_str = 0.5 * (r_minus + r_plus);
      const double tau = r_str > 0.0 ? (r_plus - r_minus) / (r_plus + r_minus) : 0.0;
      // r_minus = 0: the inner boundary shrinks to a point and tau reaches 1.
      if (!past_equator && r_minus > 0.0 && r_plus < cb.power()) {
        row.delta_factor = quasi_uniformity(params, n, c.z_hat_norm, r_str, tau, opt.delta_z);
        c.delta_factor = std::max(c.delta_factor, row.delta_factor);
      } else {
        past_equator = true;
      }
    }
    row.delta_factor_valid = !past_equator;
    if (past_equator) row.delta_factor = 0.0;
    c.strips.push_back(row);
  }
  return c;
}

std::size_t ogs_block_size(int n, double ogs_epsilon) {
  if (!(ogs_epsilon >= 0.0)) throw ParameterError("ogs_epsilon must be >= 0");
  const double v = std::ceil(std::exp2(n * ogs_epsilon) - 1e-9);
  if (v > 1e15) throw SizingError("OGS block size is not representable");
  return static_cast<std::size_t>(std::max(1.0, v));
}

std::optional<std::size_t> OgsPartition::block_of(std::size_t index) const {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (std::find(blocks[b].begin(), blocks[b].end(), index) != blocks[b].end()) return b;
  }
  return std::nullopt;
}

bool OgsPartition::in_last_block(std::size_t index) const {
  const auto b = block_of(index);
  return b && *b + 1 == blocks.size();
}

OgsPartition partition_blocks(const std::vector<std::size_t>& ordered, std::size_t block_size, int strip_index) {
  if (block_size == 0) throw ParameterError("OGS block size must be >= 1");
  OgsPartition p;
  p.strip_index = strip_index;
  p.block_size = block_size;
  p.empty_strip = ordered.empty();
  for (std::size_t i = 0; i < ordered.size(); i += block_size) {
    const std::size_t end = std::min(ordered.size(), i + block_size);
    p.blocks.emplace_back(ordered.begin() + static_cast<std::ptrdiff_t>(i), ordered.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return p;
}

OgsPartition build_ogs(const StripCensus& census, int strip_index, std::size_t block_size) {
  if (strip_index < 1 - census.half_count || strip_index > census.half_count) {
    throw ParameterError("build_ogs: strip index " + std::to_string(strip_index) + " out of range");
  }
  return partition_blocks(census.members[static_cast<std::size_t>(strip_index + census.half_count - 1)], block_size,
                          strip_index);
}

OgsPartition build_ogs(const StripCensus& census, int strip_index, double ogs_epsilon) {
  return build_ogs(census, strip_index, ogs_block_size(census.n, ogs_epsilon));
}

}  // namespace myopic
