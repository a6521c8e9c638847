#include "rdbp/policies.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rdbp/universe.hpp"

namespace rdbp {

namespace {

Permutation identity(std::size_t t) {
  Permutation p(t);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

// Ties keep arrival order in both directions.
Permutation ascending(std::span<const double> claims) {
  auto p = identity(claims.size());
  std::stable_sort(p.begin(), p.end(),
                   [&](std::size_t i, std::size_t j) { return claims[i] < claims[j]; });
  return p;
}

Permutation descending(std::span<const double> claims) {
  auto p = identity(claims.size());
  std::stable_sort(p.begin(), p.end(),
                   [&](std::size_t i, std::size_t j) { return claims[i] > claims[j]; });
  return p;
}

void check_permutation(const Permutation& p, std::size_t t) {
  if (p.size() != t) {
    throw std::invalid_argument("custom policy returned a permutation of the wrong length");
  }
  std::vector<bool> seen(t, false);
  for (auto i : p) {
    if (i >= t || seen[i]) {
      throw std::invalid_argument("custom policy returned a non-permutation");
    }
    seen[i] = true;
  }
}

template <class Order>
std::uint64_t greedy_count(std::span<const double> claims, const Order& order,
                           double resources) {
  double total = 0.0;
  std::uint64_t count = 0;
  for (auto i : order) {
    total += claims[i];
    if (total > resources) break;
    ++count;
  }
  return count;
}

}  // namespace

PriorityPolicy::PriorityPolicy(PolicyKind kind, std::string name, Rule rule)
    : kind_(kind), name_(std::move(name)), rule_(std::move(rule)) {}

PriorityPolicy PriorityPolicy::fcfs() { return {PolicyKind::FirstComeFirstServed, "fcfs"}; }
PriorityPolicy PriorityPolicy::weakest_first() { return {PolicyKind::WeakestFirst, "wf"}; }
PriorityPolicy PriorityPolicy::strongest_first() { return {PolicyKind::StrongestFirst, "sf"}; }
PriorityPolicy PriorityPolicy::coin_flip() { return {PolicyKind::CoinFlip, "coinflip"}; }
PriorityPolicy PriorityPolicy::counterexample() {
  return {PolicyKind::Counterexample, "counterexample"};
}

PriorityPolicy PriorityPolicy::custom(std::string name, Rule rule) {
  if (!rule) throw std::invalid_argument("custom policy needs a rule");
  return {PolicyKind::Custom, std::move(name), std::move(rule)};
}

std::optional<PriorityPolicy> PriorityPolicy::from_token(std::string_view token) {
  if (token == "fcfs") return fcfs();
  if (token == "wf") return weakest_first();
  if (token == "sf") return strongest_first();
  if (token == "coinflip") return coin_flip();
  if (token == "counterexample") return counterexample();
  return std::nullopt;
}

Permutation PriorityPolicy::priority(std::span<const double> claims, DrawContext ctx) const {
  const std::size_t t = claims.size();
  switch (kind_) {
    case PolicyKind::FirstComeFirstServed:
      return identity(t);
    case PolicyKind::WeakestFirst:
      return ascending(claims);
    case PolicyKind::StrongestFirst:
      return descending(claims);
    case PolicyKind::CoinFlip: {
      if (ctx.universe == nullptr) {
        throw std::invalid_argument("coin-flip policy needs a universe to draw from");
      }
      auto p = identity(t);
      for (std::size_t i = t; i > 1; --i) {
        const double u = ctx.universe->uniform_at(Stream::Auxiliary, ctx.generation, i);
        const auto j = std::min(static_cast<std::size_t>(u * static_cast<double>(i)), i - 1);
        std::swap(p[i - 1], p[j]);
      }
      return p;
    }
    case PolicyKind::Counterexample: {
      auto p = descending(claims);
      if (t >= 3) {
        std::rotate(p.begin(), p.begin() + 2, p.begin() + 3);
      }
      return p;
    }
    case PolicyKind::Custom: {
      auto p = rule_(claims);
      check_permutation(p, t);
      return p;
    }
  }
  return identity(t);
}

ServedSet apply_policy(const PriorityPolicy& policy, std::span<const double> claims,
                       double resources, DrawContext ctx) {
  ServedSet served;
  const auto order = policy.priority(claims, ctx);
  for (auto i : order) {
    const double next = served.consumed + claims[i];
    if (next > resources) break;
    served.consumed = next;
    served.served_indices.push_back(i);
  }
  served.count = served.served_indices.size();
  return served;
}

std::uint64_t served_count(const PriorityPolicy& policy, std::span<const double> claims,
                           double resources, DrawContext ctx) {
  switch (policy.kind()) {
    case PolicyKind::FirstComeFirstServed:
      return count_fcfs(claims, resources);
    case PolicyKind::WeakestFirst:
      return count_wf(claims, resources);
    case PolicyKind::StrongestFirst:
      return count_sf(claims, resources);
    default:
      return greedy_count(claims, policy.priority(claims, ctx), resources);
  }
}

std::uint64_t count_wf(std::span<const double> claims, double resources) {
  std::vector<double> sorted(claims.begin(), claims.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  std::uint64_t count = 0;
  for (double x : sorted) {
    total += x;
    if (total > resources) break;
    ++count;
  }
  return count;
}

std::uint64_t count_sf(std::span<const double> claims, double resources) {
  std::vector<double> sorted(claims.begin(), claims.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>{});
  double total = 0.0;
  std::uint64_t count = 0;
  for (double x : sorted) {
    total += x;
    if (total > resources) break;
    ++count;
  }
  return count;
}

std::uint64_t count_fcfs(std::span<const double> claims, double resources) {
  double total = 0.0;
  std::uint64_t count = 0;
  for (double x : claims) {
    total += x;
    if (total > resources) break;
    ++count;
  }
  return count;
}

}  // namespace rdbp
