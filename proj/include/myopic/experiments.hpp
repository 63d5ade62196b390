#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "myopic/capacity.hpp"
#include "myopic/codec.hpp"
#include "myopic/geometry.hpp"
#include "myopic/jammers.hpp"
#include "myopic/rng.hpp"
#include "myopic/stats.hpp"

namespace myopic {

// ---------------------------------------------------------------- run_pe

enum class DecoderKind { min_distance, list };

// fixed: materialize the codebook. ensemble: draw only the transmitted
// codeword and sample the decoder's verdict from the exact law of a fresh
// random codebook (codebook-blind attacks only). automatic: fixed when the
// codebook fits the budget, ensemble otherwise.
enum class CodebookMode { automatic, fixed, ensemble };

struct TrialConfig {
  ChannelParams params;
  int n = 16;
  double rate = 0.5;
  double key_rate = 0.0;
  AttackSpec attack;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  DecoderKind decoder = DecoderKind::min_distance;
  std::optional<double> list_radius;  // default sqrt(nN)
  CodebookMode mode = CodebookMode::automatic;
  std::size_t budget = kDefaultCodebookBudget;
  unsigned threads = 1;

  void validate() const;
  double effective_list_radius() const;
};

struct TrialTally {
  std::size_t errors = 0;
  std::size_t trials = 0;
  std::size_t clip_count = 0;
  std::size_t tie_count = 0;
  std::map<std::size_t, std::size_t> list_size_histogram;

  double pe_hat() const { return trials == 0 ? 0.0 : static_cast<double>(errors) / trials; }
  WilsonInterval ci95() const { return wilson_interval(errors, trials); }
  void merge(const TrialTally& other);
  bool operator==(const TrialTally&) const = default;
};

struct PeResult {
  TrialTally tally;
  bool ensemble = false;
  double actual_rate = 0.0;
  double actual_key_rate = 0.0;
  std::optional<double> alpha;  // scale-and-babble coefficient actually used
};

PeResult run_pe(const TrialConfig& config);
// Reuses an existing codebook (fixed mode).
PeResult run_pe(const TrialConfig& config, const SphericalCodebook& cb);

// -------------------------------------------------------- strips and OGS

struct StripOptions {
  double epsilon = 0.2;      // thick strip spans n sigma2 (1 +- epsilon)
  double delta = 0.1;        // thin strip width; epsilon / delta must be a whole number
  double delta_z = 0.0;      // quantization of z; > 0 needs a net
  double ogs_epsilon = 0.25;  // OGS blocks hold ceil(2^(n ogs_epsilon)) indices: 8 at n = 12, 256 at n = 32
  const ToyCovering* net = nullptr;
};

struct StripRow {
  int index = 0;
  double inner_distance = 0.0;  // sqrt(n sigma2 (1 + (i-1) delta))
  double outer_distance = 0.0;  // sqrt(n sigma2 (1 + i delta))
  std::size_t count = 0;
  double fraction = 0.0;             // exact normalized area of the strip
  double expected_log2_count = 0.0;  // log2(fraction * codebook size)
  double delta_factor = 1.0;         // closed-form quasi-uniformity of this strip
  bool delta_factor_valid = true;    // false when the strip crosses the equator of z or pinches to a point
  bool e_str = false;                // fewer than 2^(3 n ogs_epsilon) members
};

struct StripCensus {
  int n = 0;
  Vec z_hat;
  double z_hat_norm = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  int half_count = 0;  // K = epsilon / delta; strips run over -K+1..K
  std::vector<StripRow> strips;
  // Per strip: flat codebook indices, sorted lexicographically by (m, k).
  std::vector<std::vector<std::size_t>> members;
  double delta_factor = 1.0;  // max over valid strips
  std::size_t message_count = 0;

  std::size_t thick_count() const;
  // Strip index i containing a flat codebook index, if any.
  std::optional<int> strip_of(std::size_t flat) const;
};

StripCensus strip_census(const SphericalCodebook& cb, const ChannelParams& params, std::span<const double> z,
                         const StripOptions& options);

// Observation z = x + noise conditioned on |z|^2 within n (P + sigma2) (1 +- eps),
// by redrawing the noise. eps = 0 accepts the first draw.
struct Observation {
  Vec z;
  std::size_t redraws = 0;
};
Observation typical_observation(Rng& rng, std::span<const double> x, const ChannelParams& params, double eps,
                                std::size_t max_redraws = 1000000);

// Closed-form quasi-uniformity factor of a strip whose boundary base radii
// are n r_str (1 -+ tau).
double quasi_uniformity(const ChannelParams& params, int n, double z_norm, double r_str, double tau,
                        double delta_z = 0.0);

struct OgsPartition {
  int strip_index = 0;
  std::size_t block_size = 0;
  std::vector<std::vector<std::size_t>> blocks;
  bool empty_strip = false;  // the E_str flag at the partition level

  // 0-based block holding the index, if present.
  std::optional<std::size_t> block_of(std::size_t index) const;
  // True when the index sits in the final block (the E_orcl flag).
  bool in_last_block(std::size_t index) const;
};

// Partition an ordered index list into consecutive blocks of block_size.
OgsPartition partition_blocks(const std::vector<std::size_t>& ordered, std::size_t block_size, int strip_index = 0);
OgsPartition build_ogs(const StripCensus& census, int strip_index, std::size_t block_size);
// Block size ceil(2^(n ogs_epsilon)).
OgsPartition build_ogs(const StripCensus& census, int strip_index, double ogs_epsilon);
std::size_t ogs_block_size(int n, double ogs_epsilon);

// ------------------------------------------------------------- surveys

enum class CenterMode { worst_shell, omniscient_shell, attack };

struct SurveyConfig {
  CenterMode mode = CenterMode::worst_shell;
  double radius = 1.0;
  std::size_t centers = 1000;
  std::uint64_t seed = 0;
  ChannelParams params;
  AttackSpec attack;  // for CenterMode::attack
  std::size_t key = 0;
};

struct SurveyResult {
  std::map<std::size_t, std::size_t> histogram;
  std::size_t max_list = 0;
  double mean_list = 0.0;
  std::size_t centers = 0;
  // Exact mean for the worst-shell mode (codebook size times cap fraction).
  double expected_mean = std::numeric_limits<double>::quiet_NaN();
};

SurveyResult list_size_survey(const SphericalCodebook& cb, const SurveyConfig& config);

struct BlobResult {
  std::size_t blob_count = 0;
  std::size_t reverse_size_max = 0;
  std::vector<std::size_t> blob_members;  // flat indices outside the OGS, ascending
};

// Blob and reverse list sizes over the whole codebook for one attack vector.
BlobResult blob_and_reverse_sizes(const SphericalCodebook& cb, const std::vector<std::size_t>& ogs,
                                  std::span<const double> s, double radius);

struct BlobSurveyConfig {
  ChannelParams params;
  int n = 14;
  double rate = 1.0;
  StripOptions strips;
  std::size_t attack_vectors = 100;
  std::optional<double> radius;  // default sqrt(nN)
  std::uint64_t seed = 0;
  std::size_t max_realizations = 64;
};

struct BlobSurveyRow {
  std::size_t attack_index = 0;
  std::size_t blob_count = 0;
  std::size_t reverse_size_max = 0;
};

struct BlobSurvey {
  std::size_t realization = 0;  // realizations skipped until x landed in a strip
  int strip_index = 0;
  std::size_t ogs_size = 0;
  std::size_t strip_size = 0;
  bool e_orcl = false;
  std::vector<BlobSurveyRow> rows;
  std::size_t reverse_size_max() const;
};

BlobSurvey blob_survey(const BlobSurveyConfig& config);

// Empirical frequencies of the three atypical-observation events.
struct AtypicalityRates {
  double noise_norm = 0.0;
  double angle = 0.0;
  double observation_norm = 0.0;
  std::size_t trials = 0;
};

AtypicalityRates atypicality_rates(const ChannelParams& params, int n, double eps, std::size_t trials,
                                   std::uint64_t seed);

struct RegionRow {
  double sigma2_over_p = 0.0;
  double n_over_p = 0.0;
  KeyRegime regime;
  CapacityVerdict verdict;
};

// Classify every (sigma2/P, N/P) lattice point at P = 1.
std::vector<RegionRow> region_sweep(std::span<const double> sigma2_over_p, std::span<const double> n_over_p,
                                    const KeyRegime& regime);

}  // namespace myopic
