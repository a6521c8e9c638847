#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdbp {

class Universe;

/// Priority order over a claim string: element j is the (0-based) arrival
/// index of the claim served j-th.
using Permutation = std::vector<std::size_t>;

/// Source of claim-independent randomness for randomized policies: the
/// auxiliary stream of a universe at one generation.
struct DrawContext {
  const Universe* universe = nullptr;
  std::uint64_t generation = 0;
};

enum class PolicyKind {
  FirstComeFirstServed,
  WeakestFirst,
  StrongestFirst,
  CoinFlip,
  /// Serves the third-largest claim, then the largest, then the second
  /// largest, then the rest in decreasing order (t >= 3); strongest-first
  /// otherwise. Breaks any pathwise lower bound by the strongest-first
  /// process.
  Counterexample,
  Custom,
};

/// A rule producing a priority permutation over a claim string.
class PriorityPolicy {
 public:
  using Rule = std::function<Permutation(std::span<const double>)>;

  static PriorityPolicy fcfs();
  static PriorityPolicy weakest_first();
  static PriorityPolicy strongest_first();
  static PriorityPolicy coin_flip();
  static PriorityPolicy counterexample();
  /// `rule` must be a deterministic function of the claim string returning a
  /// permutation of [0, t).
  static PriorityPolicy custom(std::string name, Rule rule);

  /// Parses a CLI token: fcfs | wf | sf | coinflip | counterexample.
  static std::optional<PriorityPolicy> from_token(std::string_view token);

  PolicyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool needs_draws() const { return kind_ == PolicyKind::CoinFlip; }

  /// Throws std::invalid_argument if a coin-flip policy gets no universe,
  /// or if a custom rule returns something other than a permutation.
  Permutation priority(std::span<const double> claims, DrawContext ctx = {}) const;

 private:
  PriorityPolicy(PolicyKind kind, std::string name, Rule rule = {});

  PolicyKind kind_;
  std::string name_;
  Rule rule_;
};

/// The claims completely served by a policy from a resource budget.
struct ServedSet {
  std::uint64_t count = 0;
  /// Arrival positions of the served claims, in service order.
  std::vector<std::size_t> served_indices;
  /// Sum of the served claims.
  double consumed = 0.0;
};

/// Greedy prefix in priority order: serve while the running total stays
/// within `resources`, stop at the first claim that does not fit.
ServedSet apply_policy(const PriorityPolicy& policy, std::span<const double> claims,
                       double resources, DrawContext ctx = {});

/// Count of the served prefix only; avoids materializing ServedSet.
std::uint64_t served_count(const PriorityPolicy& policy, std::span<const double> claims,
                           double resources, DrawContext ctx = {});

/// Number of increasing order statistics that fit (weakest-first count).
std::uint64_t count_wf(std::span<const double> claims, double resources);
/// Number of decreasing order statistics that fit (strongest-first count).
std::uint64_t count_sf(std::span<const double> claims, double resources);
/// Length of the longest arrival-order prefix that fits.
std::uint64_t count_fcfs(std::span<const double> claims, double resources);

}  // namespace rdbp
