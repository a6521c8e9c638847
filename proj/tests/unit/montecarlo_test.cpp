#include <cmath>

#include <gtest/gtest.h>

#include "rdbp/errors.hpp"
#include "rdbp/montecarlo.hpp"

using namespace rdbp;

namespace {

LawTriple toy_laws(double r) {
  return {OffspringLaw({0.25, 0.0, 0.75}), ClaimLaw::uniform(2.0), ResourceLaw::constant(r)};
}

LawTriple counterexample_laws() {
  return {OffspringLaw({0.5, 0.0, 0.0, 0.5}), ClaimLaw::uniform(2.0), ResourceLaw::uniform(0.0, 1.0)};
}

McConfig small_mc(std::uint64_t replicates = 300, std::uint64_t cap = 2000) {
  McConfig mc;
  mc.replicates = replicates;
  mc.horizon = 200;
  mc.explosion_cap = cap;
  mc.base_seed = Seed{42};
  return mc;
}

}  // namespace

TEST(Wilson, MatchesReferenceValues) {
  const auto a = wilson_interval(5, 10, 0.99);
  EXPECT_NEAR(a.low, 0.1842255182472355, 1e-12);
  EXPECT_NEAR(a.high, 0.8157744817527646, 1e-12);
  const auto b = wilson_interval(0, 50, 0.95);
  EXPECT_NEAR(b.low, 0.0, 1e-15);
  EXPECT_NEAR(b.high, 0.07134759913335874, 1e-12);
  const auto c = wilson_interval(1990, 2000, 0.99);
  EXPECT_NEAR(c.low, 0.988989673610194, 1e-12);
  EXPECT_NEAR(c.high, 0.9977369119554527, 1e-12);
}

TEST(Wilson, CoversEstimateAndShrinks) {
  double prev_width = 2.0;
  for (std::uint64_t n : {100u, 400u, 1600u, 6400u}) {
    const auto ci = wilson_interval(3 * n / 10, n, 0.99);
    EXPECT_LE(ci.low, 0.3);
    EXPECT_GE(ci.high, 0.3);
    const double width = ci.high - ci.low;
    EXPECT_LT(width, prev_width);
    if (prev_width < 2.0) EXPECT_NEAR(prev_width / width, 2.0, 0.1);  // width ~ 1/sqrt(n)
    prev_width = width;
  }
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
}

TEST(EstimateExtinction, CertainExtinction) {
  const LawTriple laws{OffspringLaw::point_mass(0), ClaimLaw::uniform(2), ResourceLaw::constant(1)};
  const auto e = estimate_extinction(ProcessSpec{laws, PriorityPolicy::weakest_first()}, small_mc(100));
  EXPECT_EQ(e.p_hat, 1.0);
  EXPECT_EQ(e.n_extinct, 100u);
  EXPECT_EQ(e.ci_high, 1.0);
  EXPECT_LE(e.ci_low, e.p_hat);
}

TEST(EstimateExtinction, IndependentOfThreadCount) {
  const auto laws = toy_laws(1.2);
  const ProcessSpec spec{laws, PriorityPolicy::weakest_first(), 1, 200, 2000};
  auto mc = small_mc(200);
  const auto one = estimate_extinction(spec, mc);
  mc.threads = 3;
  const auto three = estimate_extinction(spec, mc);
  EXPECT_EQ(one.p_hat, three.p_hat);
  EXPECT_EQ(one.n_extinct, three.n_extinct);
  EXPECT_EQ(one.n_alive, three.n_alive);
  EXPECT_EQ(one.n_exploded, three.n_exploded);
  EXPECT_EQ(one.ci_low, three.ci_low);
}

TEST(EstimateExtinction, FcfsRegimes) {
  const auto below = estimate_extinction(
      ProcessSpec{toy_laws(0.8), PriorityPolicy::fcfs(), 1, 200, 2000}, small_mc(500));
  EXPECT_GE(below.p_hat, 0.99);
  const LawTriple rich{OffspringLaw({0.25, 0.0, 0.75}), ClaimLaw::uniform(2.0), ResourceLaw::constant(2.0)};
  const auto above =
      estimate_extinction(ProcessSpec{rich, PriorityPolicy::fcfs(), 1, 200, 2000}, small_mc(500));
  EXPECT_GT(above.n_exploded, 0u);
}

TEST(EstimateExtinction, RejectsBadConfig) {
  auto mc = small_mc();
  mc.replicates = 0;
  EXPECT_THROW(estimate_extinction(ProcessSpec{toy_laws(1), PriorityPolicy::fcfs()}, mc),
               ConfigurationError);
  mc = small_mc();
  mc.confidence = 1.0;
  EXPECT_THROW(estimate_extinction(ProcessSpec{toy_laws(1), PriorityPolicy::fcfs()}, mc),
               ConfigurationError);
}

TEST(Dominance, ZeroViolations) {
  for (const auto& p : {PriorityPolicy::fcfs(), PriorityPolicy::strongest_first(),
                        PriorityPolicy::coin_flip(), PriorityPolicy::counterexample(),
                        PriorityPolicy::weakest_first()}) {
    auto mc = small_mc(200, 5000);
    mc.horizon = 50;
    const auto d = dominance_check(p, toy_laws(1.2), mc);
    EXPECT_EQ(d.violations, 0u) << p.name();
    EXPECT_GT(d.generations_compared, 200u);
  }
}

TEST(SafeHaven, RejectsOutsideSurvivalRegime) {
  EXPECT_THROW(safe_haven_check(toy_laws(0.4), {1, 2}, small_mc()), PreconditionError);
}

TEST(SafeHaven, SmallRun) {
  const auto rep = safe_haven_check(toy_laws(1.2), {1, 2, 5}, small_mc(400));
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows[0].estimate.p_hat, rep.single.p_hat);
  for (const auto& row : rep.rows) EXPECT_TRUE(row.pass);
  EXPECT_TRUE(rep.monotone);
}

TEST(Superadditivity, SingleFounderIsIdentical) {
  const auto rep = superadditivity_check(toy_laws(1.2), 1, 5, small_mc(300));
  EXPECT_EQ(rep.max_cdf_excess, 0.0);
  EXPECT_TRUE(rep.pass());
}

TEST(Superadditivity, ThreeFounders) {
  const auto rep = superadditivity_check(toy_laws(1.2), 3, 5, small_mc(1000, 100000));
  EXPECT_TRUE(rep.dominance_pass) << rep.max_cdf_excess << " > " << rep.critical_value;
  EXPECT_TRUE(rep.zero_bound_pass);
}

TEST(Growth, TargetsPerPolicy) {
  const auto laws = toy_laws(1.2);
  EXPECT_NEAR(*growth_target(PriorityPolicy::weakest_first(), laws),
              effective_mean_wf(laws.claim, 1.2, 1.5), 1e-15);
  EXPECT_NEAR(*growth_target(PriorityPolicy::fcfs(), laws), 1.2, 1e-15);
  EXPECT_FALSE(growth_target(PriorityPolicy::counterexample(), laws));
}

TEST(Envelope, NoSurvivorsReported) {
  EXPECT_THROW(envelope_check(PriorityPolicy::weakest_first(), toy_laws(0.4), small_mc(50), 1000),
               InsufficientSurvivors);
}

TEST(Counterexample, RequiresThreeOffspring) {
  const LawTriple laws{OffspringLaw({0.5, 0.0, 0.5}), ClaimLaw::uniform(2.0), ResourceLaw::uniform(0, 1)};
  EXPECT_THROW(counterexample_search(laws, small_mc(), 10), PreconditionError);
  const LawTriple constant_claims{OffspringLaw({0.5, 0.0, 0.0, 0.5}), ClaimLaw::constant(1.0),
                                  ResourceLaw::uniform(0, 1)};
  EXPECT_THROW(check_counterexample_feasible(constant_claims), PreconditionError);
}

TEST(Counterexample, BudgetExhaustedIsNotAnError) {
  const auto res = counterexample_search(counterexample_laws(), small_mc(), 100);
  if (!res.found) EXPECT_EQ(res.scanned, 100u);
}

TEST(Counterexample, ReplayIsDeterministic) {
  const auto a = replay_counterexample(counterexample_laws(), Seed{5}, 17);
  const auto b = replay_counterexample(counterexample_laws(), Seed{5}, 17);
  EXPECT_EQ(a.policy_trajectory, b.policy_trajectory);
  EXPECT_EQ(a.sf_trajectory, b.sf_trajectory);
  EXPECT_EQ(a.found, b.found);
}

TEST(Monotonicity, DegenerateLawsAreExact) {
  const LawTriple laws{OffspringLaw::point_mass(3), ClaimLaw::constant(1.0), ResourceLaw::constant(2.0)};
  const auto probe = sf_monotonicity_probe(laws, {1, 2, 3, 4}, small_mc(20));
  EXPECT_TRUE(MonotonicityProbe::exploratory);
  // M(t) = min(3t, 2t) = 2t deterministically.
  for (const auto& cell : probe.cells) EXPECT_EQ(cell.p_hat, cell.v <= 2 * cell.t ? 1.0 : 0.0);
  EXPECT_TRUE(probe.violations.empty());
}

TEST(Monotonicity, SingleTIsVacuous) {
  const auto probe = sf_monotonicity_probe(counterexample_laws(), {5}, small_mc(100));
  EXPECT_TRUE(probe.violations.empty());
  EXPECT_THROW(sf_monotonicity_probe(counterexample_laws(), {5, 5}, small_mc(10)), ConfigurationError);
}
