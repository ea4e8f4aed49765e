// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/rng.hpp"

namespace warmlab {
namespace {

Philox4x32::Counter counter_for(std::uint64_t stream, std::uint64_t block) noexcept {
  return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

Philox4x32::Key key_for(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

std::array<double, 2> block_values(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t block) noexcept {
  const auto out = Philox4x32::generate(counter_for(stream, block), key_for(seed));
  const std::uint64_t first = (std::uint64_t{out[0]} << 32) | out[1];
  const std::uint64_t second = (std::uint64_t{out[2]} << 32) | out[3];
  return {to_unit_interval(first), to_unit_interval(second)};
}

}  // namespace

std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return mix64(h);
}

std::uint64_t stream_id(std::string_view label, Purpose purpose) noexcept {
  return mix64(hash_label(label) ^ (std::uint64_t{static_cast<std::uint32_t>(purpose)} << 56));
}

std::uint64_t stream_id(std::uint64_t index, Purpose purpose) noexcept {
  return mix64(mix64(index) ^ (std::uint64_t{static_cast<std::uint32_t>(purpose)} << 56));
}

double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  return block_values(seed, stream, index / 2)[index & 1u];
}

UniformStream::UniformStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t start) noexcept
    : seed_(seed), stream_(stream), start_(start), position_(start) {}

void UniformStream::refill() noexcept {
  buffer_ = block_values(seed_, stream_, position_ / 2);
  cached_ = true;
}

void UniformStream::fill(std::span<double> out) noexcept {
  std::size_t i = 0;
  while (i < out.size() && (position_ & 1u) != 0) out[i++] = next();
  constexpr std::size_t kLanes = 16;
  const Philox4x32::Key key = key_for(seed_);
  while (out.size() - i >= 2 * kLanes) {
    const std::uint64_t block = position_ / 2;
    std::array<std::array<std::uint32_t, kLanes>, 4> ctr;
    for (std::size_t l = 0; l < kLanes; ++l) {
      const auto c = counter_for(stream_, block + l);
      for (std::size_t w = 0; w < 4; ++w) ctr[w][l] = c[w];
    }
    Philox4x32::generate_lanes(ctr, key);
    for (std::size_t l = 0; l < kLanes; ++l) {
      out[i++] = to_unit_interval((std::uint64_t{ctr[0][l]} << 32) | ctr[1][l]);
      out[i++] = to_unit_interval((std::uint64_t{ctr[2][l]} << 32) | ctr[3][l]);
    }
    position_ += 2 * kLanes;
    cached_ = false;
  }
  while (i < out.size()) out[i++] = next();
}

}  // namespace warmlab
