#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "myopic/vecops.hpp"

namespace myopic {

inline constexpr std::size_t kDefaultCodebookBudget = std::size_t{1} << 22;

// Rounds n*rate down to whole bits. The small guard absorbs products such as
// 10 * 0.7 that land a hair under an integer.
unsigned whole_bits(int n, double rate);

// Random spherical code. Codewords x(m, k) live on the sphere of radius
// sqrt(n P); storage is key-major, so each key's subcode is contiguous.
class SphericalCodebook {
 public:
  static SphericalCodebook generate(std::uint64_t seed, int n, double rate, double key_rate,
                                    double power, std::size_t budget = kDefaultCodebookBudget);

  int n() const { return n_; }
  double rate() const { return static_cast<double>(message_bits_) / n_; }
  double key_rate() const { return static_cast<double>(key_bits_) / n_; }
  double power() const { return power_; }
  std::uint64_t seed() const { return seed_; }
  unsigned message_bits() const { return message_bits_; }
  unsigned key_bits() const { return key_bits_; }
  std::size_t message_count() const { return std::size_t{1} << message_bits_; }
  std::size_t key_count() const { return std::size_t{1} << key_bits_; }
  std::size_t size() const { return message_count() * key_count(); }

  std::size_t flat_index(std::size_t m, std::size_t k) const { return k * message_count() + m; }
  std::span<const double> row(std::size_t flat) const {
    return {data_.data() + flat * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  // Squared norm of the stored row; equals nP up to rounding.
  double row_norm_sq(std::size_t flat) const { return norms_sq_[flat]; }
  std::span<const double> codeword(std::size_t m, std::size_t k) const;
  const std::vector<double>& data() const { return data_; }

  // Binary container; layout documented in the README.
  void save(const std::filesystem::path& path) const;
  static SphericalCodebook load(const std::filesystem::path& path);

 private:
  SphericalCodebook() = default;
  void compute_norms();

  int n_ = 0;
  unsigned message_bits_ = 0;
  unsigned key_bits_ = 0;
  double power_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<double> data_;
  std::vector<double> norms_sq_;
};

// Throws std::out_of_range for bad indices.
Vec encode(const SphericalCodebook& cb, std::size_t m, std::size_t k);

struct DecodeOutcome {
  std::size_t m_hat = 0;
  double distance = 0.0;
  bool tie_flag = false;
};

inline constexpr double kTieTolerance = 1e-12;

// Exhaustive nearest codeword within key k's subcode. Squared distances
// within kTieTolerance count as a tie, resolved toward the smaller message.
DecodeOutcome min_distance_decode(const SphericalCodebook& cb, std::span<const double> y, std::size_t k);

// Messages whose key-k codeword lies in the closed ball (center, radius), ascending.
std::vector<std::size_t> list_decode(const SphericalCodebook& cb, std::span<const double> center,
                                     std::size_t k, double radius);

// Size of list_decode without materializing it.
std::size_t list_size(const SphericalCodebook& cb, std::span<const double> center, std::size_t k,
                      double radius);

// Membership over the whole codebook (all keys), as flat indices ascending.
std::vector<std::size_t> ball_members(const SphericalCodebook& cb, std::span<const double> center,
                                      double radius);

}  // namespace myopic
