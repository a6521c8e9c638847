#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdbp/distributions.hpp"

namespace rdbp {

struct SolverConfig {
  double abs_tol = 1e-10;
  int max_iter = 200;
};

/// Verdicts whose decisive quantity lies within this band of 1 are Critical.
inline constexpr double kCriticalBand = 1e-9;

enum class ProcessKind { WeakestFirst, StrongestFirst, Fcfs };

std::string_view to_string(ProcessKind kind);

enum class Verdict { AlmostSureExtinction, PositiveSurvival, Critical, Inapplicable };

std::string_view to_string(Verdict verdict);

struct Classification {
  Verdict verdict = Verdict::Inapplicable;
  /// Which criterion clause fired, or why none applies.
  std::string basis;
  /// The quantity compared against 1 (or r against mu for fcfs), if any.
  std::optional<double> decisive_quantity;
};

/// Truncation level tau with  int_0^tau x dF(x) = r / m.
///
/// Bisection on the monotone lower partial moment over [0, b]; for
/// unbounded claims the upper end is doubled until it brackets. For a claim
/// law with an atom the equation may have no exact root, and the smallest t
/// with partial moment >= r / m is returned. Throws DomainError if
/// r > m * mu or the arguments are out of range.
double solve_tau(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg = {});

/// Truncation level theta with  int_theta^b x dF(x) = r / m.
/// Throws UnboundedClaimError for exponential claims.
double solve_theta(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg = {});

/// m F(tau); m when r >= m mu (F(tau) := 1 beyond the solvable range).
double effective_mean_wf(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg = {});

/// m (1 - F(theta)); m when r >= m mu.
double effective_mean_sf(const ClaimLaw& claim, double r, double m, const SolverConfig& cfg = {});

/// Extinction/survival verdict for the wf-, sf- or fcfs-process on `triple`,
/// with m and r taken from the offspring and resource laws.
Classification classify(ProcessKind kind, const LawTriple& triple, const SolverConfig& cfg = {});

/// Verdict from the two-moment sufficient conditions, when one applies.
/// Only wf and sf have such conditions; fcfs always yields nullopt.
std::optional<Classification> moment_shortcut(ProcessKind kind, const LawTriple& triple,
                                              const SolverConfig& cfg = {});

/// Critical mean resource production: mu for fcfs, otherwise the root in r
/// of effective_mean(r) = 1 on (0, m mu], by bisection.
double critical_r(ProcessKind kind, const ClaimLaw& claim, double m, const SolverConfig& cfg = {});

/// Closed-form critical resource production for uniform, scaled beta and
/// (wf only) exponential claims. Throws UnsupportedKind otherwise.
double closed_form_critical(const ClaimLaw& claim, ProcessKind kind, double m);

/// Closed-form tau for exponential claims through the lower Lambert W
/// branch: tau = -(1 + W_{-1}(-(lambda / e)(1 / lambda - r / m))) / lambda.
double exponential_tau_closed_form(double rate, double r, double m);

/// Leading large-m behaviour of the critical values for Beta(a, b) claims
/// on (0, 1):
///   wf: a / (a + 1) * (a B(a, b) / m)^(1/a)
///   sf: 1 - b / (b + 1) * (b B(b, a) / m)^(1/b)
/// fcfs returns mu = a / (a + b).
double beta_asymptotic_critical(double a, double b, ProcessKind kind, double m);

struct CurveRow {
  double m = 0.0;
  double r_wc = 0.0;
  double r_uc = 0.0;
  /// Absent for unbounded claims, where the sf criterion does not apply.
  std::optional<double> r_sc;
};

/// One row (m, r_wc, r_uc, r_sc) per grid point; every m must exceed 1.
std::vector<CurveRow> critical_curve(const ClaimLaw& claim, const std::vector<double>& m_grid,
                                     const SolverConfig& cfg = {});

struct CriticalReport {
  double m = 0.0;
  double r = 0.0;
  double mu = 0.0;
  std::optional<double> tau;
  std::optional<double> theta;
  std::optional<double> effective_mean_wf;
  std::optional<double> effective_mean_sf;
  std::optional<double> r_wc;
  double r_uc = 0.0;
  std::optional<double> r_sc;
  Classification wf;
  Classification sf;
  Classification fcfs;
  std::optional<Classification> wf_shortcut;
  std::optional<Classification> sf_shortcut;
};

/// Everything the criteria module can say about one law triple. Solver
/// quantities are left empty where their preconditions fail (m <= 1,
/// r > m mu, unbounded claims); the verdicts then say why.
CriticalReport critical_report(const LawTriple& triple, const SolverConfig& cfg = {});

}  // namespace rdbp
