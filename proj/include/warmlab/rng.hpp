// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random numbers. Every random quantity in the library is a
// pure function of (seed, stream id, position), so replicas and vertices can
// be evaluated in any order or on any number of threads with identical
// results.
#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace warmlab {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  /// Lanes of independent blocks in structure-of-arrays form (word w of lane
  /// i in ctr[w][i]); same results as one generate() call per lane.
  template <std::size_t Lanes>
  static void generate_lanes(std::array<std::array<std::uint32_t, Lanes>, 4>& ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      for (std::size_t i = 0; i < Lanes; ++i) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0][i];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2][i];
        const std::uint32_t c1 = ctr[1][i];
        const std::uint32_t c3 = ctr[3][i];
        ctr[0][i] = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ key[0];
        ctr[1][i] = static_cast<std::uint32_t>(p1);
        ctr[2][i] = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ key[1];
        ctr[3][i] = static_cast<std::uint32_t>(p0);
      }
    }
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// SplitMix64 finaliser; used to mix seeds and tags into stream ids.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a over bytes, then mixed.
std::uint64_t hash_label(std::string_view label) noexcept;

/// What a stream is used for. Distinct purposes never share draws.
enum class Purpose : std::uint32_t {
  kClock = 1,     // WARM firing-time gaps
  kChoice = 2,    // WARM edge-selection uniforms U_{j,v}
  kReplica = 3,   // Monte Carlo replica stream
  kAuxiliary = 4  // anything else (coin flips for synthetic inputs, ...)
};

/// Stream id for (label, purpose); the seed is carried separately as the key.
std::uint64_t stream_id(std::string_view label, Purpose purpose) noexcept;
std::uint64_t stream_id(std::uint64_t index, Purpose purpose) noexcept;

/// Maps 53 random bits to (0, 1]. Zero is excluded so -log(u) is finite.
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Random access into the stream (seed, stream): value at position `index`.
double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

/// Anything that hands out uniforms in (0, 1] one at a time.
template <typename T>
concept UniformSource = requires(T& source) {
  { source.next() } -> std::same_as<double>;
  { source.consumed() } -> std::convertible_to<std::uint64_t>;
};

/// Sequential view of one Philox substream. Cheap to copy; copies replay.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t start = 0) noexcept;

  double next() noexcept {
    if ((position_ & 1u) == 0 || !cached_) refill();
    return buffer_[position_++ & 1u];
  }

  /// The next out.size() values, exactly as repeated next() would give them.
  void fill(std::span<double> out) noexcept;

  std::uint64_t consumed() const noexcept { return position_ - start_; }
  std::uint64_t position() const noexcept { return position_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t start_;
  std::uint64_t position_;
  std::array<double, 2> buffer_{};
  bool cached_ = false;
};

class StreamExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replays a fixed sequence of uniforms; running past the end throws.
class ReplayUniforms {
 public:
  explicit ReplayUniforms(std::span<const double> values) noexcept : values_(values) {}

  double next() {
    if (position_ >= values_.size()) {
      throw StreamExhausted("uniform stream exhausted after " + std::to_string(position_) +
                            " draws");
    }
    return values_[position_++];
  }
  std::uint64_t consumed() const noexcept { return position_; }

 private:
  std::span<const double> values_;
  std::size_t position_ = 0;
};

/// Exp(1) variate as -ln(U).
template <UniformSource Source>
double next_exponential(Source& source) {
  return -std::log(source.next());
}

}  // namespace warmlab
