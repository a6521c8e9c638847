#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdbp/criteria.hpp"
#include "rdbp/engine.hpp"

namespace rdbp {

struct McConfig {
  std::uint64_t replicates = 2000;
  std::uint64_t horizon = kDefaultHorizon;
  std::uint64_t explosion_cap = kDefaultExplosionCap;
  Seed base_seed{};
  double confidence = 0.99;
  /// Worker count. Results do not depend on it.
  unsigned threads = 1;

  void validate() const;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Two-sided Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence);

/// Standard normal quantile.
double normal_quantile(double p);

struct ExtinctionEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t n_extinct = 0;
  std::uint64_t n_alive = 0;
  std::uint64_t n_exploded = 0;

  std::uint64_t replicates() const { return n_extinct + n_alive + n_exploded; }
  /// Fraction of replicates that hit the explosion cap.
  double explosion_frequency() const;
};

/// Replicate i runs `spec` on derive_replicate(i) of the base universe.
/// Trajectories alive at the horizon are counted as not extinct but are
/// reported separately in n_alive.
ExtinctionEstimate estimate_extinction(const ProcessSpec& spec, const McConfig& mc);

struct SafeHavenRow {
  std::uint64_t initial_size = 0;
  ExtinctionEstimate estimate;
  /// (upper confidence limit of q_W)^L
  double bound = 0.0;
  bool pass = false;
};

struct SafeHavenReport {
  ExtinctionEstimate single;
  std::vector<SafeHavenRow> rows;
  /// Point estimates are non-increasing in L, strictly while positive.
  bool monotone = false;
  bool pass() const;
};

/// Extinction of the wf-process from L founders against q_W^L. Throws
/// PreconditionError outside the wf-survival regime.
SafeHavenReport safe_haven_check(const LawTriple& triple, const std::vector<std::uint64_t>& l_values,
                                 const McConfig& mc);

struct DominanceReport {
  std::string policy;
  std::uint64_t replicates = 0;
  std::uint64_t generations_compared = 0;
  /// Generations where the policy's process exceeded the coupled wf-process.
  std::uint64_t violations = 0;
};

DominanceReport dominance_check(const PriorityPolicy& policy, const LawTriple& triple,
                                const McConfig& mc);

struct GrowthEstimate {
  double mean_ratio = 0.0;
  double dispersion = 0.0;
  std::uint64_t n_contributing = 0;
  std::uint64_t n_ratios = 0;
  /// Predicted limiting growth factor, where one is known for the policy.
  std::optional<double> target;
};

struct EnvelopeReport {
  std::string policy;
  GrowthEstimate growth;
  double lower = 0.0;
  double upper = 0.0;
  double slack = 0.0;
  double fraction_inside = 0.0;
  /// |mean_ratio / target - 1|, when a target exists.
  std::optional<double> relative_error;
};

/// Predicted limiting growth factor of a surviving process under `policy`:
/// m F(tau) for wf, m (1 - F(theta)) for sf, min(m, r / mu) for fcfs and
/// coin-flip; none for other policies.
std::optional<double> growth_target(const PriorityPolicy& policy, const LawTriple& triple,
                                    const SolverConfig& cfg = {});

/// Late growth ratios (taken once the size reaches `min_size`) of the
/// non-extinct trajectories against the band
/// [m (1 - F(theta)) - slack, m F(tau) + slack]. Throws InsufficientSurvivors
/// if no trajectory reaches `min_size`.
EnvelopeReport envelope_check(const PriorityPolicy& policy, const LawTriple& triple,
                              const McConfig& mc, std::uint64_t min_size, double slack = 0.05);

struct SuperadditivityReport {
  std::uint64_t initial_size = 0;
  std::uint64_t generations = 0;
  /// max_k (P[W_n <= k | W_0 = L] - P[sum of L copies <= k]); dominance
  /// predicts it is at most 0.
  double max_cdf_excess = 0.0;
  double critical_value = 0.0;
  bool dominance_pass = false;
  /// P[W_n = 0 | W_0 = L] against P[W_n = 0 | W_0 = 1]^L.
  ExtinctionEstimate zero_from_l;
  ExtinctionEstimate zero_from_one;
  bool zero_bound_pass = false;
  bool pass() const { return dominance_pass && zero_bound_pass; }
};

/// Compares W_n from L founders with the sum of L independent single-founder
/// copies, by a one-sided two-sample Kolmogorov-Smirnov test at `level`.
SuperadditivityReport superadditivity_check(const LawTriple& triple, std::uint64_t l,
                                            std::uint64_t generations, const McConfig& mc,
                                            double level = 1e-3);

struct CounterexampleResult {
  bool found = false;
  std::uint64_t scanned = 0;
  Seed seed{};
  std::uint32_t replicate_id = 0;
  Trajectory policy_trajectory;
  Trajectory sf_trajectory;
};

/// Checks that the laws make a two-generation reversal S_2 > Gamma_2 = 0 under
/// the counterexample policy possible. Throws PreconditionError otherwise.
void check_counterexample_feasible(const LawTriple& triple);

/// Scans replicates 0, 1, ... for a universe on which the counterexample
/// policy dies out at generation 2 while the strongest-first process is
/// alive. The smallest witness id is returned regardless of thread count.
CounterexampleResult counterexample_search(const LawTriple& triple, const McConfig& mc,
                                           std::uint64_t budget = 1'000'000);

/// Reruns both processes for two generations on one replicate.
CounterexampleResult replay_counterexample(const LawTriple& triple, Seed seed,
                                           std::uint32_t replicate_id);

struct MonotonicityCell {
  std::uint64_t t = 0;
  std::uint64_t v = 0;
  double p_hat = 0.0;
  Interval ci;
};

struct MonotonicityViolation {
  std::uint64_t t_from = 0;
  std::uint64_t t_to = 0;
  std::uint64_t v = 0;
};

/// Exploratory estimate of P[M(D(t), R(t)) >= v]; no verdict is drawn.
struct MonotonicityProbe {
  std::vector<MonotonicityCell> cells;
  /// Consecutive t where the estimate drops with disjoint confidence
  /// intervals.
  std::vector<MonotonicityViolation> violations;
  static constexpr bool exploratory = true;
};

MonotonicityProbe sf_monotonicity_probe(const LawTriple& triple,
                                        const std::vector<std::uint64_t>& t_values,
                                        const McConfig& mc);

}  // namespace rdbp
