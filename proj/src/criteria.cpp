#include "rdbp/criteria.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "rdbp/errors.hpp"
#include "rdbp/special_functions.hpp"

namespace rdbp {

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::WeakestFirst:
      return "wf";
    case ProcessKind::StrongestFirst:
      return "sf";
    case ProcessKind::Fcfs:
      return "fcfs";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::AlmostSureExtinction:
      return "AlmostSureExtinction";
    case Verdict::PositiveSurvival:
      return "PositiveSurvival";
    case Verdict::Critical:
      return "Critical";
    case Verdict::Inapplicable:
      return "Inapplicable";
  }
  return "Unknown";
}

namespace {

void check_solver_args(double r, double m) {
  if (!(m > 1.0) || !std::isfinite(m)) {
    throw DomainError(fmt::format("reproduction mean m={} must exceed 1", m));
  }
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DomainError(fmt::format("resource mean r={} must be non-negative", r));
  }
}

// Target r/m clipped to mu so that r == m mu survives rounding in r/m.
double partial_moment_target(const ClaimLaw& claim, double r, double m) {
  const double mu = claim.mean();
  if (r > m * mu) {
    throw DomainError(fmt::format(
        "r={} exceeds m*mu={}: the partial-moment equation has no solution", r, m * mu));
  }
  return std::min(r / m, mu);
}

Classification verdict_from_quantity(double q, std::string_view label) {
  Classification c;
  c.decisive_quantity = q;
  if (std::fabs(q - 1.0) <= kCriticalBand) {
    c.verdict = Verdict::Critical;
    c.basis = fmt::format("{} = 1 within {:g}: critical case, not resolved", label, kCriticalBand);
  } else if (q < 1.0) {
    c.verdict = Verdict::AlmostSureExtinction;
    c.basis = fmt::format("{} < 1: extinction almost surely", label);
  } else {
    c.verdict = Verdict::PositiveSurvival;
    c.basis = fmt::format("{} > 1: positive survival probability", label);
  }
  return c;
}

Classification inapplicable(std::string reason) {
  return {Verdict::Inapplicable, std::move(reason), std::nullopt};
}

// Regularity preconditions shared by the wf and sf criteria; empty when met.
std::optional<std::string> criterion_precondition_failure(ProcessKind kind,
                                                          const LawTriple& triple) {
  const auto reg = validate_regularity(triple);
  if (!reg.m_gt_1) return "reproduction mean m must exceed 1";
  if (!reg.p0_pos) return "offspring law needs p_0 > 0";
  if (!reg.pk_pos_some_k_ge_2) return "offspring law needs p_k > 0 for some k >= 2";
  if (kind != ProcessKind::Fcfs && !triple.claim.continuous()) {
    return "claim law has an atom; the criterion needs a continuous F";
  }
  if (kind == ProcessKind::StrongestFirst && !triple.claim.bounded()) {
    return "claims are unbounded; the sf criterion needs bounded claims";
  }
  return std::nullopt;
}

template <class F>
double bisect_increasing(F&& g, double lo, double hi, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double solve_tau(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg) {
  check_solver_args(r, m);
  const double target = partial_moment_target(claim, r, m);
  if (target == 0.0) return 0.0;

  double hi = claim.support_max();
  if (!std::isfinite(hi)) {
    hi = claim.mean();
    for (int grow = 0; claim.lower_partial_moment(hi) < target; ++grow) {
      if (grow > 2000) throw ConvergenceError("solve_tau: could not bracket the root");
      hi *= 2.0;
    }
  }
  double lo = 0.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double value = claim.lower_partial_moment(mid);
    if (value < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!claim.continuous()) return hi;
  // Run the bracket down to adjacent doubles, then keep the closer end.
  const double res_lo = std::fabs(claim.lower_partial_moment(lo) - target);
  const double res_hi = std::fabs(claim.lower_partial_moment(hi) - target);
  if (std::min(res_lo, res_hi) > cfg.abs_tol) {
    throw ConvergenceError(fmt::format("solve_tau did not converge (r={}, m={})", r, m));
  }
  return res_lo < res_hi ? lo : hi;
}

double solve_theta(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg) {
  check_solver_args(r, m);
  if (!claim.bounded()) {
    throw UnboundedClaimError("solve_theta needs a claim law with bounded support");
  }
  const double target = partial_moment_target(claim, r, m);
  double lo = 0.0;
  double hi = claim.support_max();
  if (target == 0.0) return hi;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double value = claim.upper_partial_moment(mid);
    if (value > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!claim.continuous()) return lo;
  const double res_lo = std::fabs(claim.upper_partial_moment(lo) - target);
  const double res_hi = std::fabs(claim.upper_partial_moment(hi) - target);
  if (std::min(res_lo, res_hi) > cfg.abs_tol) {
    throw ConvergenceError(fmt::format("solve_theta did not converge (r={}, m={})", r, m));
  }
  return res_lo < res_hi ? lo : hi;
}

double effective_mean_wf(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg) {
  check_solver_args(r, m);
  if (r >= m * claim.mean()) return m;
  return m * claim.cdf(solve_tau(claim, r, m, cfg));
}

double effective_mean_sf(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg) {
  check_solver_args(r, m);
  if (!claim.bounded()) {
    throw UnboundedClaimError("the sf effective mean needs a claim law with bounded support");
  }
  if (r >= m * claim.mean()) return m;
  return m * (1.0 - claim.cdf(solve_theta(claim, r, m, cfg)));
}

Classification classify(ProcessKind kind, const LawTriple& triple, const SolverConfig& cfg) {
  if (auto failure = criterion_precondition_failure(kind, triple)) {
    return inapplicable(std::move(*failure));
  }
  const double m = triple.offspring.mean();
  const double r = triple.resource.mean();
  const auto& claim = triple.claim;
  const double mu = claim.mean();

  if (kind == ProcessKind::Fcfs) {
    Classification c;
    c.decisive_quantity = r / mu;
    if (std::fabs(r - mu) <= kCriticalBand) {
      c.verdict = Verdict::Critical;
      c.basis = "fcfs: r = mu: critical case, not resolved";
    } else if (r < mu) {
      c.verdict = Verdict::AlmostSureExtinction;
      c.basis = "fcfs: r < mu: extinction almost surely";
    } else {
      c.verdict = Verdict::PositiveSurvival;
      c.basis = "fcfs: r > mu: positive survival probability";
    }
    return c;
  }

  if (r > m * mu) {
    return {Verdict::PositiveSurvival,
            fmt::format("{}: r > m*mu: positive survival probability", to_string(kind)), m};
  }
  if (kind == ProcessKind::WeakestFirst) {
    return verdict_from_quantity(effective_mean_wf(claim, r, m, cfg), "wf: m*F(tau)");
  }
  return verdict_from_quantity(effective_mean_sf(claim, r, m, cfg), "sf: m*(1-F(theta))");
}

std::optional<Classification> moment_shortcut(ProcessKind kind, const LawTriple& triple,
                                              const SolverConfig&) {
  if (kind == ProcessKind::Fcfs) return std::nullopt;
  if (criterion_precondition_failure(kind, triple)) return std::nullopt;
  const double m = triple.offspring.mean();
  const double r = triple.resource.mean();
  const double mu = triple.claim.mean();
  const double var = triple.claim.variance();

  if (kind == ProcessKind::WeakestFirst) {
    if (mu < r) {
      return Classification{Verdict::PositiveSurvival, "wf moment condition: mu < r", r / mu};
    }
    if (r <= m * mu * (1.0 - std::sqrt(1.0 - 1.0 / m))) {
      const double bound = (m * mu - r) * (m * mu - r) / (m * (m - 1.0)) - mu * mu;
      if (var < bound) {
        return Classification{Verdict::AlmostSureExtinction,
                              "wf moment condition: r <= m*mu*(1-sqrt(1-1/m)) and "
                              "Var X < (m*mu-r)^2/(m(m-1)) - mu^2",
                              var};
      }
    }
    return std::nullopt;
  }

  if (r < mu) {
    return Classification{Verdict::AlmostSureExtinction, "sf moment condition: r < mu", r / mu};
  }
  if (r >= mu * std::sqrt(m)) {
    const double bound = r * r / m - mu * mu;
    if (var < bound) {
      return Classification{Verdict::PositiveSurvival,
                            "sf moment condition: r >= mu*sqrt(m) and Var X < r^2/m - mu^2", var};
    }
  }
  return std::nullopt;
}

double critical_r(ProcessKind kind, const ClaimLaw& claim, double m, const SolverConfig& cfg) {
  check_solver_args(0.0, m);
  const double mu = claim.mean();
  if (kind == ProcessKind::Fcfs) return mu;
  if (kind == ProcessKind::StrongestFirst && !claim.bounded()) {
    throw UnboundedClaimError("the sf critical curve needs a claim law with bounded support");
  }
  const auto excess = [&](double r) {
    return (kind == ProcessKind::WeakestFirst ? effective_mean_wf(claim, r, m, cfg)
                                              : effective_mean_sf(claim, r, m, cfg)) -
           1.0;
  };
  return bisect_increasing(excess, 0.0, m * mu, cfg.max_iter);
}

double closed_form_critical(const ClaimLaw& claim, ProcessKind kind, double m) {
  check_solver_args(0.0, m);
  switch (claim.kind()) {
    case LawKind::Uniform: {
      const double d = claim.d();
      switch (kind) {
        case ProcessKind::WeakestFirst:
          return d / (2.0 * m);
        case ProcessKind::StrongestFirst:
          return d * (1.0 - 1.0 / (2.0 * m));
        case ProcessKind::Fcfs:
          return d / 2.0;
      }
      break;
    }
    case LawKind::ScaledBeta: {
      const double a = claim.alpha();
      const double b = claim.beta();
      const double front = claim.scale() * a * m / (a + b);
      switch (kind) {
        case ProcessKind::WeakestFirst:
          return front * special::reg_inc_beta(
                             a + 1.0, b, special::inverse_reg_inc_beta(a, b, 1.0 / m));
        case ProcessKind::StrongestFirst:
          return front * special::reg_inc_beta(
                             b, a + 1.0, special::inverse_reg_inc_beta(b, a, 1.0 / m));
        case ProcessKind::Fcfs:
          return claim.mean();
      }
      break;
    }
    case LawKind::Exponential:
      switch (kind) {
        case ProcessKind::WeakestFirst:
          return (1.0 - (m - 1.0) * std::log(m / (m - 1.0))) / claim.rate();
        case ProcessKind::Fcfs:
          return claim.mean();
        case ProcessKind::StrongestFirst:
          throw UnsupportedKind("no sf closed form for unbounded exponential claims");
      }
      break;
    case LawKind::Constant:
      break;
  }
  throw UnsupportedKind(
      fmt::format("no closed-form critical value for {} claims", to_string(claim.kind())));
}

double exponential_tau_closed_form(double rate, double r, double m) {
  check_solver_args(r, m);
  if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
  if (r >= m / rate) {
    throw DomainError("exponential tau exists only for r < m / lambda");
  }
  const double z = -(rate / std::numbers::e) * (1.0 / rate - r / m);
  return -(1.0 + special::lambert_w_minus1(z)) / rate;
}

double beta_asymptotic_critical(double a, double b, ProcessKind kind, double m) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta parameters must be positive");
  if (!(m > 0.0)) throw DomainError("m must be positive");
  switch (kind) {
    case ProcessKind::WeakestFirst:
      return a / (a + 1.0) * std::pow(a * special::beta(a, b) / m, 1.0 / a);
    case ProcessKind::StrongestFirst:
      return 1.0 - b / (b + 1.0) * std::pow(b * special::beta(b, a) / m, 1.0 / b);
    case ProcessKind::Fcfs:
      return a / (a + b);
  }
  return 0.0;
}

std::vector<CurveRow> critical_curve(const ClaimLaw& claim, const std::vector<double>& m_grid,
                                     const SolverConfig& cfg) {
  std::vector<CurveRow> rows;
  rows.reserve(m_grid.size());
  for (double m : m_grid) {
    CurveRow row;
    row.m = m;
    row.r_wc = critical_r(ProcessKind::WeakestFirst, claim, m, cfg);
    row.r_uc = critical_r(ProcessKind::Fcfs, claim, m, cfg);
    if (claim.bounded()) row.r_sc = critical_r(ProcessKind::StrongestFirst, claim, m, cfg);
    rows.push_back(row);
  }
  return rows;
}

CriticalReport critical_report(const LawTriple& triple, const SolverConfig& cfg) {
  CriticalReport rep;
  const auto& claim = triple.claim;
  rep.m = triple.offspring.mean();
  rep.r = triple.resource.mean();
  rep.mu = claim.mean();
  rep.r_uc = rep.mu;

  if (rep.m > 1.0) {
    const bool solvable = rep.r <= rep.m * rep.mu;
    if (solvable) rep.tau = solve_tau(claim, rep.r, rep.m, cfg);
    rep.effective_mean_wf = effective_mean_wf(claim, rep.r, rep.m, cfg);
    rep.r_wc = critical_r(ProcessKind::WeakestFirst, claim, rep.m, cfg);
    if (claim.bounded()) {
      if (solvable) rep.theta = solve_theta(claim, rep.r, rep.m, cfg);
      rep.effective_mean_sf = effective_mean_sf(claim, rep.r, rep.m, cfg);
      rep.r_sc = critical_r(ProcessKind::StrongestFirst, claim, rep.m, cfg);
    }
  }
  rep.wf = classify(ProcessKind::WeakestFirst, triple, cfg);
  rep.sf = classify(ProcessKind::StrongestFirst, triple, cfg);
  rep.fcfs = classify(ProcessKind::Fcfs, triple, cfg);
  rep.wf_shortcut = moment_shortcut(ProcessKind::WeakestFirst, triple, cfg);
  rep.sf_shortcut = moment_shortcut(ProcessKind::StrongestFirst, triple, cfg);
  return rep;
}

}  // namespace rdbp
