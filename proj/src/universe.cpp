#include "rdbp/universe.hpp"

#include <charconv>

namespace rdbp {

std::optional<Seed> parse_seed(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, base);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return Seed{value};
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

Universe::Universe(Seed seed, LawTriple laws, std::uint32_t replicate_id)
    : seed_(seed), laws_(std::move(laws)), replicate_id_(replicate_id) {}

double Universe::uniform_at(Stream stream, std::uint64_t n, std::uint64_t k) const {
  const std::array<std::uint32_t, 4> counter{
      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(n),
      static_cast<std::uint32_t>(stream), replicate_id_};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_.value),
                                         static_cast<std::uint32_t>(seed_.value >> 32)};
  const auto block = philox4x32(counter, key);
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(block[0]) << 32) | block[1]) >> 11;
  // Midpoint of one of 2^53 equal cells: strictly inside (0, 1).
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t Universe::offspring_at(std::uint64_t n, std::uint64_t k) const {
  return laws_.offspring.sample(uniform_at(Stream::Offspring, n, k));
}

double Universe::claim_at(std::uint64_t n, std::uint64_t k) const {
  return laws_.claim.quantile(uniform_at(Stream::Claim, n, k));
}

double Universe::resource_at(std::uint64_t n, std::uint64_t k) const {
  return laws_.resource.quantile(uniform_at(Stream::Resource, n, k));
}

Universe Universe::derive_replicate(std::uint32_t id) const {
  return Universe(seed_, laws_, id);
}

}  // namespace rdbp
