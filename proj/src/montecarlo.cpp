#include "rdbp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "rdbp/errors.hpp"

namespace rdbp {

namespace {

// Runs fn(i) for i in [0, n) on a fixed contiguous partition. Callers write
// results into slot i so aggregation never depends on scheduling.
template <class Fn>
void parallel_for(std::uint64_t n, unsigned threads, Fn&& fn) {
  const auto workers = static_cast<unsigned>(
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads == 0 ? 1 : threads, n)));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (std::uint64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint32_t replicate_index(std::uint64_t id) {
  if (id > kMaxIndex) {
    throw ConfigurationError(fmt::format("replicate id {} exceeds the 32-bit range", id));
  }
  return static_cast<std::uint32_t>(id);
}

ProcessSpec make_spec(const LawTriple& triple, PriorityPolicy policy, std::uint64_t initial_size,
                      const McConfig& mc) {
  return ProcessSpec{triple, std::move(policy), initial_size, mc.horizon, mc.explosion_cap};
}

ExtinctionEstimate estimate_from_counts(std::uint64_t extinct, std::uint64_t alive,
                                        std::uint64_t exploded, double confidence) {
  ExtinctionEstimate est;
  est.n_extinct = extinct;
  est.n_alive = alive;
  est.n_exploded = exploded;
  const std::uint64_t n = est.replicates();
  est.p_hat = n == 0 ? 0.0 : static_cast<double>(extinct) / static_cast<double>(n);
  const auto ci = wilson_interval(extinct, n, confidence);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  return est;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

}  // namespace

void McConfig::validate() const {
  if (replicates < 1) throw ConfigurationError("replicates must be at least 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigurationError("confidence must lie in (0, 1)");
  }
  if (horizon < 1) throw ConfigurationError("horizon must be at least 1");
  if (replicates > kMaxIndex + 1) {
    throw ConfigurationError("replicates must fit the 32-bit replicate id range");
  }
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::clamp(std::min(center - half, p), 0.0, 1.0),
          std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

double ExtinctionEstimate::explosion_frequency() const {
  const auto n = replicates();
  return n == 0 ? 0.0 : static_cast<double>(n_exploded) / static_cast<double>(n);
}

ExtinctionEstimate estimate_extinction(const ProcessSpec& spec, const McConfig& mc) {
  mc.validate();
  spec.validate();
  const Universe base(mc.base_seed, spec.laws);
  std::vector<OutcomeKind> outcomes(mc.replicates);
  parallel_for(mc.replicates, mc.threads, [&](std::uint64_t i) {
    outcomes[i] = simulate(spec, base.derive_replicate(replicate_index(i))).outcome.kind;
  });
  std::uint64_t extinct = 0, alive = 0, exploded = 0;
  for (auto o : outcomes) {
    switch (o) {
      case OutcomeKind::Extinct:
        ++extinct;
        break;
      case OutcomeKind::AliveAtHorizon:
        ++alive;
        break;
      case OutcomeKind::Exploded:
        ++exploded;
        break;
    }
  }
  return estimate_from_counts(extinct, alive, exploded, mc.confidence);
}

// ---------------------------------------------------------------------------

bool SafeHavenReport::pass() const {
  return monotone &&
         std::all_of(rows.begin(), rows.end(), [](const SafeHavenRow& r) { return r.pass; });
}

SafeHavenReport safe_haven_check(const LawTriple& triple, const std::vector<std::uint64_t>& l_values,
                                 const McConfig& mc) {
  const double m = triple.offspring.mean();
  const double r = triple.resource.mean();
  if (!(m > 1.0) || !(effective_mean_wf(triple.claim, r, m) > 1.0)) {
    throw PreconditionError("safe-haven check needs the wf-survival regime (m F(tau) > 1)");
  }
  SafeHavenReport report;
  const auto wf = PriorityPolicy::weakest_first();
  report.single = estimate_extinction(make_spec(triple, wf, 1, mc), mc);
  for (auto l : l_values) {
    SafeHavenRow row;
    row.initial_size = l;
    row.estimate = l == 1 ? report.single : estimate_extinction(make_spec(triple, wf, l, mc), mc);
    row.bound = std::pow(report.single.ci_high, static_cast<double>(l));
    row.pass = row.estimate.ci_low <= row.bound;
    report.rows.push_back(row);
  }
  report.monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double prev = report.rows[i - 1].estimate.p_hat;
    const double next = report.rows[i].estimate.p_hat;
    if (next > prev || (next == prev && prev > 0.0)) report.monotone = false;
  }
  return report;
}

// ---------------------------------------------------------------------------

DominanceReport dominance_check(const PriorityPolicy& policy, const LawTriple& triple,
                                const McConfig& mc) {
  mc.validate();
  const Universe base(mc.base_seed, triple);
  const std::vector<ProcessSpec> specs{make_spec(triple, policy, 1, mc),
                                       make_spec(triple, PriorityPolicy::weakest_first(), 1, mc)};
  std::vector<std::uint64_t> compared(mc.replicates, 0);
  std::vector<std::uint64_t> violations(mc.replicates, 0);
  parallel_for(mc.replicates, mc.threads, [&](std::uint64_t i) {
    const auto trajs = simulate_coupled(specs, base.derive_replicate(replicate_index(i)));
    const auto& gamma = trajs[0];
    const auto& w = trajs[1];
    for (std::uint64_t n = 0; n <= mc.horizon; ++n) {
      if (!gamma.size_known(n) || !w.size_known(n)) continue;
      ++compared[i];
      if (gamma.size_at(n) > w.size_at(n)) ++violations[i];
    }
  });
  DominanceReport report;
  report.policy = policy.name();
  report.replicates = mc.replicates;
  for (std::uint64_t i = 0; i < mc.replicates; ++i) {
    report.generations_compared += compared[i];
    report.violations += violations[i];
  }
  return report;
}

// ---------------------------------------------------------------------------

std::optional<double> growth_target(const PriorityPolicy& policy, const LawTriple& triple,
                                    const SolverConfig& cfg) {
  const double m = triple.offspring.mean();
  const double r = triple.resource.mean();
  const auto& claim = triple.claim;
  if (!(m > 1.0)) return std::nullopt;
  switch (policy.kind()) {
    case PolicyKind::WeakestFirst:
      return effective_mean_wf(claim, r, m, cfg);
    case PolicyKind::StrongestFirst:
      if (!claim.bounded()) return std::nullopt;
      return effective_mean_sf(claim, r, m, cfg);
    case PolicyKind::FirstComeFirstServed:
    case PolicyKind::CoinFlip:
      return std::min(m, r / claim.mean());
    default:
      return std::nullopt;
  }
}

EnvelopeReport envelope_check(const PriorityPolicy& policy, const LawTriple& triple,
                              const McConfig& mc, std::uint64_t min_size, double slack) {
  mc.validate();
  const double m = triple.offspring.mean();
  const double r = triple.resource.mean();
  if (!(m > 1.0)) throw PreconditionError("envelope check needs m > 1");
  const Universe base(mc.base_seed, triple);
  const auto spec = make_spec(triple, policy, 1, mc);

  std::vector<std::vector<double>> per_replicate(mc.replicates);
  parallel_for(mc.replicates, mc.threads, [&](std::uint64_t i) {
    const auto traj = simulate(spec, base.derive_replicate(replicate_index(i)));
    if (traj.outcome.kind == OutcomeKind::Extinct) return;
    for (std::size_t n = 0; n + 1 < traj.sizes.size(); ++n) {
      if (traj.sizes[n] >= min_size) per_replicate[i].push_back(traj.growth_ratios[n]);
    }
  });

  EnvelopeReport report;
  report.policy = policy.name();
  report.slack = slack;
  report.upper = effective_mean_wf(triple.claim, r, m);
  report.lower = triple.claim.bounded() ? effective_mean_sf(triple.claim, r, m) : 0.0;

  std::vector<double> ratios;
  for (const auto& rs : per_replicate) {
    if (!rs.empty()) ++report.growth.n_contributing;
    ratios.insert(ratios.end(), rs.begin(), rs.end());
  }
  if (ratios.empty()) {
    throw InsufficientSurvivors(fmt::format(
        "no {} trajectory reached size {} within {} generations", policy.name(), min_size,
        mc.horizon));
  }
  auto& g = report.growth;
  g.n_ratios = ratios.size();
  g.mean_ratio = mean_of(ratios);
  double ss = 0.0;
  std::uint64_t inside = 0;
  for (double x : ratios) {
    ss += (x - g.mean_ratio) * (x - g.mean_ratio);
    if (x >= report.lower - slack && x <= report.upper + slack) ++inside;
  }
  g.dispersion = ratios.size() > 1 ? std::sqrt(ss / static_cast<double>(ratios.size() - 1)) : 0.0;
  report.fraction_inside = static_cast<double>(inside) / static_cast<double>(ratios.size());
  g.target = growth_target(policy, triple);
  if (g.target) report.relative_error = std::fabs(g.mean_ratio / *g.target - 1.0);
  return report;
}

// ---------------------------------------------------------------------------

SuperadditivityReport superadditivity_check(const LawTriple& triple, std::uint64_t l,
                                            std::uint64_t generations, const McConfig& mc,
                                            double level) {
  mc.validate();
  if (l < 1) throw ConfigurationError("superadditivity check needs L >= 1");
  if (generations < 1) throw ConfigurationError("superadditivity check needs generations >= 1");
  if ((l + 1) * mc.replicates > kMaxIndex + 1) {
    throw ConfigurationError("L * replicates exceeds the replicate id range");
  }
  const Universe base(mc.base_seed, triple);
  const auto wf = PriorityPolicy::weakest_first();
  const std::uint64_t cap = mc.explosion_cap;
  McConfig short_run = mc;
  short_run.horizon = generations;

  const auto size_at_end = [&](const Trajectory& t) -> std::uint64_t {
    if (t.size_known(generations)) return std::min(t.size_at(generations), cap);
    return cap;  // hit the cap before the last generation
  };

  const auto spec_l = make_spec(triple, wf, l, short_run);
  const auto spec_1 = make_spec(triple, wf, 1, short_run);
  std::vector<std::uint64_t> single(mc.replicates);
  std::vector<std::uint64_t> summed(mc.replicates);
  std::vector<std::uint64_t> copy_zeros(mc.replicates);
  parallel_for(mc.replicates, mc.threads, [&](std::uint64_t i) {
    single[i] = size_at_end(simulate(spec_l, base.derive_replicate(replicate_index(i))));
    std::uint64_t total = 0;
    std::uint64_t zeros = 0;
    for (std::uint64_t j = 0; j < l; ++j) {
      // With L = 1 the single-founder copy is the process itself.
      const std::uint64_t id = l == 1 ? i : (j + 1) * mc.replicates + i;
      const auto size = size_at_end(simulate(spec_1, base.derive_replicate(replicate_index(id))));
      total += size;
      if (size == 0) ++zeros;
    }
    summed[i] = std::min(total, cap);
    copy_zeros[i] = zeros;
  });

  SuperadditivityReport report;
  report.initial_size = l;
  report.generations = generations;

  std::sort(single.begin(), single.end());
  std::sort(summed.begin(), summed.end());
  const double n1 = static_cast<double>(single.size());
  const double n2 = static_cast<double>(summed.size());
  double excess = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < single.size() || ib < summed.size()) {
    std::uint64_t k;
    if (ib >= summed.size() || (ia < single.size() && single[ia] <= summed[ib])) {
      k = single[ia];
    } else {
      k = summed[ib];
    }
    while (ia < single.size() && single[ia] == k) ++ia;
    while (ib < summed.size() && summed[ib] == k) ++ib;
    excess = std::max(excess, static_cast<double>(ia) / n1 - static_cast<double>(ib) / n2);
  }
  report.max_cdf_excess = excess;
  report.critical_value = std::sqrt(-std::log(level) / 2.0 * (n1 + n2) / (n1 * n2));
  report.dominance_pass = excess <= report.critical_value;

  const auto zeros_l =
      static_cast<std::uint64_t>(std::count(single.begin(), single.end(), std::uint64_t{0}));
  std::uint64_t zeros_1 = 0;
  for (auto z : copy_zeros) zeros_1 += z;
  const std::uint64_t trials_1 = mc.replicates * l;
  report.zero_from_l =
      estimate_from_counts(zeros_l, mc.replicates - zeros_l, 0, mc.confidence);
  report.zero_from_one = estimate_from_counts(zeros_1, trials_1 - zeros_1, 0, mc.confidence);
  report.zero_bound_pass =
      report.zero_from_l.ci_low <=
      std::pow(report.zero_from_one.ci_high, static_cast<double>(l));
  return report;
}

// ---------------------------------------------------------------------------

void check_counterexample_feasible(const LawTriple& triple) {
  if (!(triple.offspring.probability(3) > 0.0)) {
    throw PreconditionError("counterexample search needs an offspring law with p_3 > 0");
  }
  const auto& claim = triple.claim;
  const auto& res = triple.resource;
  if (!claim.continuous()) {
    throw PreconditionError("counterexample search needs continuous claims");
  }
  const double claim_lo = claim.support_min();
  const double claim_hi = claim.support_max();
  const double res_lo = res.support_min();
  const double res_hi = res.support_max();
  // Generation 0: x1 + x3 < R < x1 + x2 for three ordered claims.
  // Generation 1: three claims fit one individual's resources, three other
  // claims each exceed two individuals' resources.
  const bool feasible = res_hi > 2.0 * claim_lo && res_lo < 2.0 * claim_hi &&
                        3.0 * claim_lo < res_hi && claim_hi > 2.0 * res_lo;
  if (!feasible) {
    throw PreconditionError(
        "claim and resource supports make the two-generation reversal a null event");
  }
}

CounterexampleResult replay_counterexample(const LawTriple& triple, Seed seed,
                                           std::uint32_t replicate_id) {
  const Universe u = Universe(seed, triple).derive_replicate(replicate_id);
  const std::vector<ProcessSpec> specs{
      ProcessSpec{triple, PriorityPolicy::counterexample(), 1, 2, kDefaultExplosionCap},
      ProcessSpec{triple, PriorityPolicy::strongest_first(), 1, 2, kDefaultExplosionCap}};
  auto trajs = simulate_coupled(specs, u);
  CounterexampleResult result;
  result.seed = seed;
  result.replicate_id = replicate_id;
  result.policy_trajectory = std::move(trajs[0]);
  result.sf_trajectory = std::move(trajs[1]);
  const auto& g = result.policy_trajectory;
  const auto& s = result.sf_trajectory;
  result.found = g.size_known(2) && s.size_known(2) && g.size_at(2) == 0 && s.size_at(2) > 0;
  return result;
}

CounterexampleResult counterexample_search(const LawTriple& triple, const McConfig& mc,
                                           std::uint64_t budget) {
  check_counterexample_feasible(triple);
  if (budget > kMaxIndex + 1) throw ConfigurationError("search budget exceeds the id range");
  constexpr std::uint64_t kBlock = 1 << 14;
  std::vector<char> hit(kBlock);
  for (std::uint64_t start = 0; start < budget; start += kBlock) {
    const std::uint64_t len = std::min(kBlock, budget - start);
    std::fill(hit.begin(), hit.end(), 0);
    parallel_for(len, mc.threads, [&](std::uint64_t j) {
      hit[j] = replay_counterexample(triple, mc.base_seed,
                                     replicate_index(start + j)).found ? 1 : 0;
    });
    for (std::uint64_t j = 0; j < len; ++j) {
      if (hit[j]) {
        auto result = replay_counterexample(triple, mc.base_seed, replicate_index(start + j));
        result.scanned = start + j + 1;
        return result;
      }
    }
  }
  CounterexampleResult none;
  none.seed = mc.base_seed;
  none.scanned = budget;
  return none;
}

// ---------------------------------------------------------------------------

MonotonicityProbe sf_monotonicity_probe(const LawTriple& triple,
                                        const std::vector<std::uint64_t>& t_values,
                                        const McConfig& mc) {
  mc.validate();
  if (!triple.claim.bounded() || !triple.resource.bounded()) {
    throw PreconditionError("the monotonicity probe needs bounded laws");
  }
  for (std::size_t i = 1; i < t_values.size(); ++i) {
    if (t_values[i] <= t_values[i - 1]) {
      throw ConfigurationError("t values must be strictly increasing");
    }
  }
  const Universe base(mc.base_seed, triple);
  const std::size_t nt = t_values.size();
  std::vector<std::vector<std::uint64_t>> counts(mc.replicates, std::vector<std::uint64_t>(nt));
  parallel_for(mc.replicates, mc.threads, [&](std::uint64_t i) {
    const auto u = base.derive_replicate(replicate_index(i));
    std::uint64_t offspring = 0;
    double resources = 0.0;
    std::uint64_t individuals = 0;
    std::vector<double> claims;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      for (; individuals < t_values[ti]; ++individuals) {
        offspring += u.offspring_at(0, individuals + 1);
        resources += u.resource_at(0, individuals + 1);
      }
      if (offspring > kMaxIndex) throw ConfigurationError("offspring count beyond the index cap");
      while (claims.size() < offspring) claims.push_back(u.claim_at(0, claims.size() + 1));
      counts[i][ti] = count_sf(claims, resources);
    }
  });

  MonotonicityProbe probe;
  std::uint64_t v_max = 0;
  for (const auto& row : counts) {
    for (auto c : row) v_max = std::max(v_max, c);
  }
  // cells[ti * v_max + (v - 1)] for v in 1..v_max
  for (std::size_t ti = 0; ti < nt; ++ti) {
    for (std::uint64_t v = 1; v <= v_max; ++v) {
      std::uint64_t hits = 0;
      for (const auto& row : counts) hits += row[ti] >= v ? 1 : 0;
      MonotonicityCell cell;
      cell.t = t_values[ti];
      cell.v = v;
      cell.p_hat = static_cast<double>(hits) / static_cast<double>(mc.replicates);
      cell.ci = wilson_interval(hits, mc.replicates, mc.confidence);
      probe.cells.push_back(cell);
    }
  }
  for (std::size_t ti = 1; ti < nt; ++ti) {
    for (std::uint64_t v = 1; v <= v_max; ++v) {
      const auto& prev = probe.cells[(ti - 1) * v_max + (v - 1)];
      const auto& next = probe.cells[ti * v_max + (v - 1)];
      if (next.ci.high < prev.ci.low) {
        probe.violations.push_back({prev.t, next.t, v});
      }
    }
  }
  return probe;
}

}  // namespace rdbp
