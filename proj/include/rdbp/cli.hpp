#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdbp/criteria.hpp"
#include "rdbp/engine.hpp"
#include "rdbp/montecarlo.hpp"

namespace rdbp::cli {

using Json = nlohmann::json;

/// Exit codes of the driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Names accepted in verify.checks.
inline const std::vector<std::string> kCheckNames = {
    "dominance", "envelope", "safe_haven", "superadditivity", "counterexample",
    "monotonicity", "extinction"};

struct VerifyConfig {
  std::vector<std::string> checks;
  /// Policies compared against wf by the dominance check.
  std::vector<std::string> dominance_policies = {"fcfs", "sf", "coinflip", "counterexample"};
  std::vector<std::string> envelope_policies = {"wf"};
  std::uint64_t min_size = 10'000;
  double slack = 0.05;
  /// Envelope passes when |mean ratio / target - 1| is at most this.
  double relative_tolerance = 0.05;
  std::vector<std::uint64_t> l_values = {1, 2, 5, 10};
  std::uint64_t superadditivity_l = 3;
  std::uint64_t generations = 5;
  double level = 1e-3;
  std::uint64_t budget = 1'000'000;
  std::vector<std::uint64_t> t_values = {1, 2, 4, 8, 16};

  friend bool operator==(const VerifyConfig&, const VerifyConfig&) = default;
};

/// Everything one run of the driver needs. Only `laws` is required in the
/// JSON form; other sections fall back to these defaults.
struct RunConfig {
  LawTriple laws{OffspringLaw::point_mass(1), ClaimLaw::constant(1.0), ResourceLaw::constant(1.0)};
  std::string policy = "wf";
  std::uint64_t initial_size = 1;
  std::uint64_t horizon = kDefaultHorizon;
  std::uint64_t explosion_cap = kDefaultExplosionCap;
  std::uint64_t replicates = 2000;
  double confidence = 0.99;
  Seed seed{};
  std::vector<double> m_grid;
  VerifyConfig verify;
  std::string out_dir = ".";

  ProcessSpec process_spec() const;
  McConfig mc_config(unsigned threads) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Strict schema check: unknown keys and wrong types are rejected with a
/// ConfigurationError naming the field path (e.g. "laws.claim.params.d").
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);
Json to_json(const RunConfig& config);

Json law_to_json(const OffspringLaw& law);
Json law_to_json(const ClaimLaw& law);
Json law_to_json(const ResourceLaw& law);

/// JSON text with every non-integer number printed to 17 significant digits.
std::string dump(const Json& j, int indent = 2);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

/// `generation,size` rows followed by a "# outcome Extinct(3)" footer line.
std::string trajectory_csv(const Trajectory& traj);
Json trajectory_json(const Trajectory& traj);
Json report_json(const CriticalReport& report);
std::string curve_csv(const std::vector<CurveRow>& rows);

struct VerifyOutcome {
  Json report;
  /// A hard invariant (dominance) was violated.
  bool hard_failure = false;
};

VerifyOutcome run_verify(const RunConfig& config, unsigned threads);

/// Entry point of the `rdbp` executable; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rdbp::cli
