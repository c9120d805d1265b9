#include "ralasso/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ralasso {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream_id) {
  ctr_ = {0u, 0u, static_cast<std::uint32_t>(stream_id),
          static_cast<std::uint32_t>(stream_id >> 32)};
  key_ = {static_cast<std::uint32_t>(seed),
          static_cast<std::uint32_t>(seed >> 32)};
}

void Philox4x32::advance() {
  std::array<std::uint32_t, 4> x = ctr_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, x[0], hi0, lo0);
    mulhilo(kM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  out_ = x;
  idx_ = 0;
  if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter; stream words untouched
}

std::uint32_t Philox4x32::next_u32() {
  if (idx_ >= 4) advance();
  return out_[idx_++];
}

std::uint64_t Philox4x32::next_u64() {
  std::uint64_t lo = next_u32();
  std::uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double Philox4x32::next_uniform() {
  std::uint64_t k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Philox4x32::next_normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  double u1 = next_uniform();
  double u2 = next_uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(t);
  have_spare_normal_ = true;
  return r * std::cos(t);
}

std::uint64_t Philox4x32::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t rem = (kMax % bound + 1) % bound;  // 2^64 mod bound
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x > kMax - rem);
  return x % bound;
}

std::uint64_t make_stream(StreamPurpose purpose, std::uint32_t grid_index,
                          std::uint32_t rep_index) {
  return (static_cast<std::uint64_t>(purpose) << 48) |
         (static_cast<std::uint64_t>(grid_index & 0xFFFFu) << 32) |
         static_cast<std::uint64_t>(rep_index);
}

}  // namespace ralasso
