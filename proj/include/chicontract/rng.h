// Copyright 2026 The chi-contract Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHICONTRACT_RNG_H_
#define CHICONTRACT_RNG_H_

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace chicontract {

// Philox4x32-10 block function (Salmon et al., SC'11): maps a 128-bit counter
// and a 64-bit key to 128 pseudo-random bits.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Stream purposes keep draws for different roles in disjoint substreams.
enum class StreamPurpose : uint32_t {
  kGeneric = 0,
  kParameter = 1,     // Z ~ zeta
  kInput = 2,         // X_i
  kChannelOutput = 3, // Y_i given X_i
  kSharedCoin = 4,    // public U
  kPrivateCoin = 5,   // private U_i
  kChannelSampler = 6,
  kMonteCarlo = 7,
};

// A counter-based substream. The key is the experiment seed; the stream id
// occupies the upper 96 counter bits and the lower 32 bits count blocks, so
// every (seed, stream) pair is an independent, schedule-free sequence.
//
// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = uint64_t;

  CounterRng(uint64_t seed, uint64_t stream, uint32_t lane = 0)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        stream_(stream),
        lane_(lane) {}

  // The substream for (seed, trial, player, purpose). `player` is limited to
  // 2^24 values.
  static CounterRng ForTrial(uint64_t seed, uint64_t trial, uint32_t player,
                             StreamPurpose purpose) {
    return CounterRng(seed, trial,
                      (static_cast<uint32_t>(purpose) << 24) | (player & 0xFFFFFFu));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // +1 or -1 with equal probability.
  int Rademacher() { return ((*this)() >> 63) ? 1 : -1; }
  // Index drawn from a probability vector by inversion.
  int Categorical(std::span<const double> probs);

 private:
  std::array<uint32_t, 2> key_;
  uint64_t stream_;
  uint32_t lane_;
  uint32_t block_ = 0;
  std::array<uint32_t, 4> buffer_{};
  int buffered_ = 0;  // 64-bit words left in buffer_
};

}  // namespace chicontract

#endif  // CHICONTRACT_RNG_H_
