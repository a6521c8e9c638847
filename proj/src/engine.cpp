#include "rdbp/engine.hpp"

#include <fmt/format.h>

#include "rdbp/errors.hpp"

namespace rdbp {

void ProcessSpec::validate() const {
  if (horizon < 1) throw ConfigurationError("horizon must be at least 1");
  if (initial_size < 1) throw ConfigurationError("initial_size must be at least 1");
  if (explosion_cap <= initial_size) {
    throw ConfigurationError(fmt::format("explosion_cap {} must exceed initial_size {}",
                                         explosion_cap, initial_size));
  }
  if (initial_size > kMaxIndex || horizon > kMaxIndex) {
    throw ConfigurationError("initial_size and horizon must fit the 32-bit index range");
  }
}

std::string to_string(const Outcome& outcome) {
  switch (outcome.kind) {
    case OutcomeKind::Extinct:
      return fmt::format("Extinct({})", outcome.generation);
    case OutcomeKind::Exploded:
      return fmt::format("Exploded({})", outcome.generation);
    case OutcomeKind::AliveAtHorizon:
      return fmt::format("AliveAtHorizon({})", outcome.generation);
  }
  return "Unknown";
}

bool Trajectory::size_known(std::uint64_t n) const {
  return n < sizes.size() || outcome.kind == OutcomeKind::Extinct;
}

std::uint64_t Trajectory::size_at(std::uint64_t n) const {
  return n < sizes.size() ? sizes[n] : 0;
}

GenerationDraw draw_generation(std::uint64_t current_size, const Universe& u, std::uint64_t n) {
  GenerationDraw draw;
  if (current_size > kMaxIndex) {
    throw ConfigurationError(
        fmt::format("generation {} has {} individuals, beyond the index cap", n, current_size));
  }
  for (std::uint64_t j = 1; j <= current_size; ++j) {
    draw.offspring += u.offspring_at(n, j);
    draw.resources += u.resource_at(n, j);
  }
  if (draw.offspring > kMaxIndex) {
    throw ConfigurationError(fmt::format(
        "generation {} produced {} offspring, beyond the index cap", n, draw.offspring));
  }
  draw.claims.resize(draw.offspring);
  for (std::uint64_t k = 1; k <= draw.offspring; ++k) {
    draw.claims[k - 1] = u.claim_at(n, k);
  }
  return draw;
}

std::uint64_t step(std::uint64_t current_size, const Universe& u, std::uint64_t n,
                   const PriorityPolicy& policy) {
  if (current_size == 0) return 0;
  const auto draw = draw_generation(current_size, u, n);
  return served_count(policy, draw.claims, draw.resources, DrawContext{&u, n});
}

Trajectory simulate(const ProcessSpec& spec, const Universe& u) {
  spec.validate();
  if (!(spec.laws == u.laws())) {
    throw ConfigurationError("process laws differ from the universe's laws");
  }
  Trajectory traj;
  traj.sizes.push_back(spec.initial_size);
  traj.outcome = {OutcomeKind::AliveAtHorizon, spec.horizon};
  std::uint64_t size = spec.initial_size;
  for (std::uint64_t n = 0; n < spec.horizon; ++n) {
    const std::uint64_t next = step(size, u, n, spec.policy);
    traj.growth_ratios.push_back(static_cast<double>(next) / static_cast<double>(size));
    traj.sizes.push_back(next);
    size = next;
    if (next == 0) {
      traj.outcome = {OutcomeKind::Extinct, n + 1};
      break;
    }
    if (next >= spec.explosion_cap) {
      traj.outcome = {OutcomeKind::Exploded, n + 1};
      break;
    }
  }
  return traj;
}

std::vector<Trajectory> simulate_coupled(std::span<const ProcessSpec> specs, const Universe& u) {
  std::vector<Trajectory> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    const auto& first = specs.front();
    if (spec.initial_size != first.initial_size || spec.horizon != first.horizon ||
        spec.explosion_cap != first.explosion_cap || !(spec.laws == first.laws)) {
      throw ConfigurationError("coupled specs must differ only in their policy");
    }
    out.push_back(simulate(spec, u));
  }
  return out;
}

}  // namespace rdbp
