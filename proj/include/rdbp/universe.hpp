#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "rdbp/distributions.hpp"

namespace rdbp {

/// 64-bit run seed.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

/// Parses a decimal or 0x-prefixed hexadecimal 64-bit seed.
std::optional<Seed> parse_seed(std::string_view text);

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// The independent double arrays a process runs on. `Auxiliary` feeds
/// claim-independent policy randomness (the coin-flip policy).
enum class Stream : std::uint32_t { Offspring = 0, Claim = 1, Resource = 2, Auxiliary = 3 };

/// Largest generation or individual index addressable in a universe.
inline constexpr std::uint64_t kMaxIndex = 0xFFFFFFFFull;

/// Deterministic, randomly addressable source of the offspring, claim and
/// resource arrays.
///
/// Cell (n, k) of each array is a pure function of
/// (seed, replicate_id, stream, n, k): a Philox block keyed by the seed with
/// counter (k, n, stream, replicate_id). Generation n starts at 0,
/// individuals are numbered from 1, and both are capped at kMaxIndex.
class Universe {
 public:
  Universe(Seed seed, LawTriple laws, std::uint32_t replicate_id = 0);

  Seed seed() const { return seed_; }
  const LawTriple& laws() const { return laws_; }
  std::uint32_t replicate_id() const { return replicate_id_; }

  /// Uniform deviate in the open interval (0, 1) at a cell.
  double uniform_at(Stream stream, std::uint64_t n, std::uint64_t k) const;

  std::uint64_t offspring_at(std::uint64_t n, std::uint64_t k) const;
  double claim_at(std::uint64_t n, std::uint64_t k) const;
  double resource_at(std::uint64_t n, std::uint64_t k) const;

  /// Same seed and laws, different replicate stream.
  Universe derive_replicate(std::uint32_t id) const;

  friend bool operator==(const Universe&, const Universe&) = default;

 private:
  Seed seed_;
  LawTriple laws_;
  std::uint32_t replicate_id_;
};

}  // namespace rdbp
