#include "myopic/codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "myopic/errors.hpp"
#include "myopic/geometry.hpp"
#include "myopic/rng.hpp"

namespace myopic {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'H', 'C', 'O', 'D', 'E', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("codebook: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

// Relative band around the threshold where the inner-product form of the
// squared distance is too coarse and the distance is recomputed directly.
constexpr double kBand = 1e-9;

// Visits flat indices in [first, last) whose codeword lies in the closed ball.
template <class Visit>
void scan_ball(const SphericalCodebook& cb, std::span<const double> center, double radius,
               std::size_t first, std::size_t last, Visit&& visit) {
  if (!(radius >= 0.0)) throw ParameterError("list decoding radius must be >= 0");
  if (center.size() != static_cast<std::size_t>(cb.n())) throw ParameterError("center has wrong length");
  const double yy = norm_sq(center);
  const double r2 = radius * radius;
  for (std::size_t f = first; f < last; ++f) {
    const double xx = cb.row_norm_sq(f);
    const double d2 = xx + yy - 2.0 * dot(cb.row(f), center);
    const double slack = kBand * (xx + yy + r2);
    if (d2 < r2 - slack) {
      visit(f);
    } else if (d2 <= r2 + slack && std::sqrt(distance_sq(cb.row(f), center)) <= radius) {
      visit(f);
    }
  }
}

}  // namespace

unsigned whole_bits(int n, double rate) {
  if (n < 1) throw ParameterError("blocklength n must be >= 1");
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ParameterError("rate must be finite and >= 0");
  const double bits = std::floor(n * rate + 1e-9);
  if (bits > 62.0) throw SizingError("codebook: 2^" + std::to_string(static_cast<long long>(bits)) + " entries is not addressable");
  return static_cast<unsigned>(bits);
}

SphericalCodebook SphericalCodebook::generate(std::uint64_t seed, int n, double rate, double key_rate,
                                              double power, std::size_t budget) {
  if (!(power > 0.0)) throw ParameterError("codebook power must be > 0");
  SphericalCodebook cb;
  cb.n_ = n;
  cb.message_bits_ = whole_bits(n, rate);
  cb.key_bits_ = whole_bits(n, key_rate);
  cb.power_ = power;
  cb.seed_ = seed;
  const unsigned total_bits = cb.message_bits_ + cb.key_bits_;
  if (total_bits > 62 || (std::size_t{1} << total_bits) > budget) {
    throw SizingError("codebook: 2^" + std::to_string(total_bits) + " codewords exceeds the budget of " +
                      std::to_string(budget));
  }
  const std::size_t count = cb.size();
  const auto nn = static_cast<std::size_t>(n);
  cb.data_.resize(count * nn);
  Rng rng = make_stream(seed, StreamTag::codebook, 0);
  const double radius = std::sqrt(n * power);
  for (std::size_t f = 0; f < count; ++f) {
    uniform_sphere_sample(rng, std::span<double>(cb.data_.data() + f * nn, nn), radius);
  }
  cb.compute_norms();
  return cb;
}

void SphericalCodebook::compute_norms() {
  norms_sq_.resize(size());
  for (std::size_t f = 0; f < size(); ++f) norms_sq_[f] = norm_sq(row(f));
}

std::span<const double> SphericalCodebook::codeword(std::size_t m, std::size_t k) const {
  if (m >= message_count()) throw std::out_of_range("message index " + std::to_string(m) + " out of range");
  if (k >= key_count()) throw std::out_of_range("key index " + std::to_string(k) + " out of range");
  return row(flat_index(m, k));
}

void SphericalCodebook::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof kMagic);
  put_le(os, static_cast<std::uint64_t>(n_));
  put_le(os, rate());
  put_le(os, key_rate());
  put_le(os, power_);
  put_le(os, seed_);
  for (double v : data_) put_le(os, v);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

SphericalCodebook SphericalCodebook::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error(path.string() + ": not a codebook file");
  SphericalCodebook cb;
  const auto n = get_le<std::uint64_t>(is);
  if (n == 0 || n > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw std::runtime_error(path.string() + ": bad blocklength");
  }
  cb.n_ = static_cast<int>(n);
  const double rate = get_le<double>(is);
  const double key_rate = get_le<double>(is);
  cb.power_ = get_le<double>(is);
  cb.seed_ = get_le<std::uint64_t>(is);
  cb.message_bits_ = static_cast<unsigned>(std::llround(rate * cb.n_));
  cb.key_bits_ = static_cast<unsigned>(std::llround(key_rate * cb.n_));
  if (cb.message_bits_ + cb.key_bits_ > 62) throw std::runtime_error(path.string() + ": bad header");
  cb.data_.resize(cb.size() * n);
  for (double& v : cb.data_) v = get_le<double>(is);
  if (is.peek() != std::ifstream::traits_type::eof()) throw std::runtime_error(path.string() + ": trailing bytes");
  cb.compute_norms();
  return cb;
}

Vec encode(const SphericalCodebook& cb, std::size_t m, std::size_t k) {
  auto w = cb.codeword(m, k);
  return {w.begin(), w.end()};
}

DecodeOutcome min_distance_decode(const SphericalCodebook& cb, std::span<const double> y, std::size_t k) {
  if (y.size() != static_cast<std::size_t>(cb.n())) throw ParameterError("received vector has wrong length");
  if (k >= cb.key_count()) throw std::out_of_range("key index out of range");
  const std::size_t M = cb.message_count();
  const std::size_t base = cb.flat_index(0, k);
  const double yy = norm_sq(y);

  // Running minimum plus every message within the tolerance of it; the
  // list is pruned whenever the minimum drops.
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, double>> near;
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t f = base + m;
    const double d2 = cb.row_norm_sq(f) + yy - 2.0 * dot(cb.row(f), y);
    if (d2 > best + kTieTolerance) continue;
    if (d2 < best) {
      best = d2;
      std::erase_if(near, [&](const auto& e) { return e.second > best + kTieTolerance; });
    }
    near.emplace_back(m, d2);
  }
  DecodeOutcome out;
  out.m_hat = near.front().first;
  out.tie_flag = near.size() > 1;
  out.distance = std::sqrt(distance_sq(cb.row(base + out.m_hat), y));
  return out;
}

std::vector<std::size_t> list_decode(const SphericalCodebook& cb, std::span<const double> center,
                                     std::size_t k, double radius) {
  if (k >= cb.key_count()) throw std::out_of_range("key index out of range");
  const std::size_t base = cb.flat_index(0, k);
  std::vector<std::size_t> out;
  scan_ball(cb, center, radius, base, base + cb.message_count(), [&](std::size_t f) { out.push_back(f - base); });
  return out;
}

std::size_t list_size(const SphericalCodebook& cb, std::span<const double> center, std::size_t k,
                      double radius) {
  if (k >= cb.key_count()) throw std::out_of_range("key index out of range");
  const std::size_t base = cb.flat_index(0, k);
  std::size_t count = 0;
  scan_ball(cb, center, radius, base, base + cb.message_count(), [&](std::size_t) { ++count; });
  return count;
}

std::vector<std::size_t> ball_members(const SphericalCodebook& cb, std::span<const double> center,
                                      double radius) {
  std::vector<std::size_t> out;
  scan_ball(cb, center, radius, 0, cb.size(), [&](std::size_t f) { out.push_back(f); });
  return out;
}

}  // namespace myopic
