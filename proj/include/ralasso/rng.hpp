#pragma once

#include <array>
#include <cstdint>

namespace ralasso {

// Generator identity recorded in every report header. Changing the generator
// (or any constant below) is a breaking change for frozen outputs.
inline constexpr const char* kRngName = "philox4x32-10";

// Philox 4x32, 10 rounds. Counter-based: block j of stream (seed, id) is a
// pure function of (seed, id, j), so work can be sharded across threads with
// no shared state and no order sensitivity.
class Philox4x32 {
 public:
  Philox4x32(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on the open interval (0,1): (k + 0.5) * 2^-53, k a 53-bit draw.
  double next_uniform();
  // Standard normal via Box-Muller; second member of each pair is cached.
  double next_normal();
  // Unbiased integer in [0, bound), bound >= 1, by rejection.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  void advance();
  std::array<std::uint32_t, 4> ctr_;   // [block_lo, block_hi, stream_lo, stream_hi]
  std::array<std::uint32_t, 2> key_;   // seed
  std::array<std::uint32_t, 4> out_{};
  int idx_ = 4;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

enum class StreamPurpose : std::uint16_t {
  Evaluate = 1,     // evaluation replication r
  Validation = 2,   // tuning validation dataset v (shared by all grid points)
  FoldShuffle = 3,  // CV fold assignment
  Test = 4,         // scratch streams inside the test suite
};

// Stream id layout: purpose<<48 | grid_index<<32 | rep_index.
std::uint64_t make_stream(StreamPurpose purpose, std::uint32_t grid_index,
                          std::uint32_t rep_index);

}  // namespace ralasso
