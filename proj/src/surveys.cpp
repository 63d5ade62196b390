#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "myopic/errors.hpp"
#include "myopic/experiments.hpp"
#include "myopic/rng.hpp"

namespace myopic {

SurveyResult list_size_survey(const SphericalCodebook& cb, const SurveyConfig& config) {
  if (config.centers == 0) throw ParameterError("list_size_survey: centers must be >= 1");
  if (!(config.radius >= 0.0)) throw ParameterError("list_size_survey: radius must be >= 0");
  if (config.key >= cb.key_count()) throw ParameterError("list_size_survey: key out of range");
  const int n = cb.n();
  const double P = cb.power();
  const double N = config.params.N;
  const double sphere = std::sqrt(n * P);

  SurveyResult out;
  if (config.mode == CenterMode::worst_shell) {
    if (!(N > 0.0 && N < P)) throw ParameterError("worst-shell centers need 0 < N < P");
    const double shell = std::sqrt(n * (P - N));
    out.expected_mean = cb.message_count() * cap_fraction(ball_sphere_cap(n, sphere, shell, config.radius));
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < config.centers; ++i) {
    Rng rng = make_stream(config.seed, StreamTag::survey, i);
    Vec center;
    std::size_t key = config.key;
    switch (config.mode) {
      case CenterMode::worst_shell:
        center = uniform_sphere_sample(rng, n, std::sqrt(n * (P - N)));
        break;
      case CenterMode::omniscient_shell: {
        const double push = std::sqrt(n * N);
        center = uniform_shell_sample(rng, n, std::max(0.0, sphere - push), sphere + push);
        break;
      }
      case CenterMode::attack: {
        std::uniform_int_distribution<std::size_t> pick_m(0, cb.message_count() - 1);
        std::uniform_int_distribution<std::size_t> pick_k(0, cb.key_count() - 1);
        const std::size_t m = pick_m(rng);
        key = pick_k(rng);
        auto x = cb.codeword(m, key);
        const Vec z = awgn_observe(rng, x, config.params.sigma2);
        const JamResult j = apply_attack(config.attack, JamContext{z, &cb, config.params, &rng}, x);
        center = add(x, j.s);
        break;
      }
    }
    const std::size_t size = list_size(cb, center, key, config.radius);
    ++out.histogram[size];
    out.max_list = std::max(out.max_list, size);
    sum += static_cast<double>(size);
  }
  out.centers = config.centers;
  out.mean_list = sum / static_cast<double>(config.centers);
  return out;
}

BlobResult blob_and_reverse_sizes(const SphericalCodebook& cb, const std::vector<std::size_t>& ogs,
                                  std::span<const double> s, double radius) {
  if (s.size() != static_cast<std::size_t>(cb.n())) throw ParameterError("blob: attack vector has wrong length");
  std::vector<std::size_t> sorted_ogs(ogs);
  std::sort(sorted_ogs.begin(), sorted_ogs.end());
  // Outside codeword -> number of OGS members whose shifted ball holds it.
  std::map<std::size_t, std::size_t> reverse;
  for (std::size_t f : ogs) {
    const Vec center = add(cb.row(f), s);
    for (std::size_t g : ball_members(cb, center, radius)) {
      if (!std::binary_search(sorted_ogs.begin(), sorted_ogs.end(), g)) ++reverse[g];
    }
  }
  BlobResult out;
  out.blob_count = reverse.size();
  for (const auto& [g, count] : reverse) {
    out.blob_members.push_back(g);
    out.reverse_size_max = std::max(out.reverse_size_max, count);
  }
  return out;
}

std::size_t BlobSurvey::reverse_size_max() const {
  std::size_t best = 0;
  for (const auto& r : rows) best = std::max(best, r.reverse_size_max);
  return best;
}

BlobSurvey blob_survey(const BlobSurveyConfig& config) {
  config.params.validate();
  const SphericalCodebook cb =
      SphericalCodebook::generate(config.seed, config.n, config.rate, 0.0, config.params.P);
  const double radius = config.radius ? *config.radius : std::sqrt(config.n * config.params.N);
  const std::size_t block = ogs_block_size(config.n, config.strips.ogs_epsilon);

  for (std::size_t r = 0; r < config.max_realizations; ++r) {
    Rng rng = make_stream(config.seed, StreamTag::census, r);
    std::uniform_int_distribution<std::size_t> pick(0, cb.message_count() - 1);
    const std::size_t f = cb.flat_index(pick(rng), 0);
    const Vec z = awgn_observe(rng, cb.row(f), config.params.sigma2);
    const StripCensus census = strip_census(cb, config.params, z, config.strips);
    const auto strip = census.strip_of(f);
    if (!strip) continue;  // atypical noise: x fell outside the thick strip

    const OgsPartition part = build_ogs(census, *strip, block);
    const std::size_t b = *part.block_of(f);
    BlobSurvey out;
    out.realization = r;
    out.strip_index = *strip;
    out.ogs_size = part.blocks[b].size();
    out.strip_size = census.strips[static_cast<std::size_t>(*strip + census.half_count - 1)].count;
    out.e_orcl = part.in_last_block(f);
    for (std::size_t a = 0; a < config.attack_vectors; ++a) {
      Rng arng = make_stream(config.seed, StreamTag::attack, a);
      const Vec s = uniform_sphere_sample(arng, config.n, std::sqrt(config.n * config.params.N));
      const BlobResult br = blob_and_reverse_sizes(cb, part.blocks[b], s, radius);
      out.rows.push_back({a, br.blob_count, br.reverse_size_max});
    }
    return out;
  }
  throw DegenerateGeometry("blob_survey: transmitted codeword never landed in the thick strip");
}

AtypicalityRates atypicality_rates(const ChannelParams& params, int n, double eps, std::size_t trials,
                                   std::uint64_t seed) {
  params.validate();
  if (!(params.sigma2 > 0.0)) throw ParameterError("atypicality_rates: sigma2 must be > 0");
  if (trials == 0 || n < 1) throw ParameterError("atypicality_rates: need n >= 1 and trials >= 1");
  const double ns2 = n * params.sigma2;
  const double nz = n * (params.P + params.sigma2);
  std::size_t e1 = 0, e2 = 0, e3 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, StreamTag::trial, t);
    const Vec x = uniform_sphere_sample(rng, n, std::sqrt(n * params.P));
    const Vec z = awgn_observe(rng, x, params.sigma2);
    Vec sz(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) sz[i] = z[i] - x[i];
    const double s2 = norm_sq(sz);
    if (s2 < ns2 * (1.0 - eps) || s2 > ns2 * (1.0 + eps)) ++e1;
    if (std::fabs(dot(x, sz)) >= eps * norm(x) * std::sqrt(s2)) ++e2;
    const double z2 = norm_sq(z);
    if (z2 < nz * (1.0 - eps) || z2 > nz * (1.0 + eps)) ++e3;
  }
  const double tt = static_cast<double>(trials);
  return {e1 / tt, e2 / tt, e3 / tt, trials};
}

std::vector<RegionRow> region_sweep(std::span<const double> sigma2_over_p, std::span<const double> n_over_p,
                                    const KeyRegime& regime) {
  std::vector<RegionRow> rows;
  rows.reserve(sigma2_over_p.size() * n_over_p.size());
  for (double s : sigma2_over_p) {
    for (double x : n_over_p) {
      rows.push_back({s, x, regime, classify(ChannelParams{1.0, x, s}, regime)});
    }
  }
  return rows;
}

}  // namespace myopic
