#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rdbp/distributions.hpp"
#include "rdbp/policies.hpp"
#include "rdbp/universe.hpp"

namespace rdbp {

inline constexpr std::uint64_t kDefaultHorizon = 200;
inline constexpr std::uint64_t kDefaultExplosionCap = 1'000'000;

struct ProcessSpec {
  LawTriple laws;
  PriorityPolicy policy;
  std::uint64_t initial_size = 1;
  std::uint64_t horizon = kDefaultHorizon;
  std::uint64_t explosion_cap = kDefaultExplosionCap;

  /// Throws ConfigurationError on horizon < 1, L < 1 or cap <= L.
  void validate() const;
};

enum class OutcomeKind { Extinct, AliveAtHorizon, Exploded };

struct Outcome {
  OutcomeKind kind = OutcomeKind::AliveAtHorizon;
  /// Generation at which the trajectory went extinct or hit the cap; the
  /// horizon for AliveAtHorizon.
  std::uint64_t generation = 0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Renders e.g. "Extinct(3)", "Exploded(12)", "AliveAtHorizon(200)".
std::string to_string(const Outcome& outcome);

struct Trajectory {
  /// Gamma_0, ..., Gamma_T where T is the stopping generation.
  std::vector<std::uint64_t> sizes;
  Outcome outcome;
  /// Gamma_{n+1} / Gamma_n for every n with Gamma_n > 0.
  std::vector<double> growth_ratios;

  /// Size at generation n, extending an extinct trajectory by zeros.
  /// Undefined past the end of an exploded or censored trajectory.
  bool size_known(std::uint64_t n) const;
  std::uint64_t size_at(std::uint64_t n) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Totals produced by the first `current_size` individuals of generation n.
struct GenerationDraw {
  std::uint64_t offspring = 0;
  double resources = 0.0;
  std::vector<double> claims;
};

/// Draws D_n(current_size), R_n(current_size) and the claim string of the
/// offspring. Throws ConfigurationError if the offspring count exceeds the
/// universe's index cap.
GenerationDraw draw_generation(std::uint64_t current_size, const Universe& u, std::uint64_t n);

/// One step of the recursion: the number of generation-(n+1) individuals
/// whose claims the policy serves from the resources of `current_size`
/// individuals.
std::uint64_t step(std::uint64_t current_size, const Universe& u, std::uint64_t n,
                   const PriorityPolicy& policy);

/// Runs the process from spec.initial_size until extinction, the explosion
/// cap, or the horizon.
Trajectory simulate(const ProcessSpec& spec, const Universe& u);

/// Runs several policies on the identical arrays of `u`. All specs must
/// agree on everything but the policy.
std::vector<Trajectory> simulate_coupled(std::span<const ProcessSpec> specs, const Universe& u);

}  // namespace rdbp
