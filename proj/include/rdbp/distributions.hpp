#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdbp {

/// Offspring law (p_0, ..., p_K) with finite support.
class OffspringLaw {
 public:
  /// Throws DomainError unless the probabilities are non-negative and sum
  /// to one within 1e-12.
  explicit OffspringLaw(std::vector<double> probabilities);

  /// Point mass at `k` offspring.
  static OffspringLaw point_mass(std::size_t k);

  std::span<const double> probabilities() const { return probabilities_; }
  double probability(std::size_t k) const {
    return k < probabilities_.size() ? probabilities_[k] : 0.0;
  }
  std::size_t max_offspring() const { return probabilities_.size() - 1; }

  double mean() const;
  double variance() const;

  /// Inverse-CDF draw from a uniform deviate in (0, 1).
  std::uint64_t sample(double u) const;

  friend bool operator==(const OffspringLaw&, const OffspringLaw&) = default;

 private:
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

enum class LawKind { Uniform, ScaledBeta, Exponential, Constant };

std::string_view to_string(LawKind kind);

/// One-dimensional non-negative law shared by claims and resources.
///
/// Moments and partial moments use closed forms per kind; continuous kinds
/// are sampled by inverse CDF.
class ScalarLaw {
 public:
  LawKind kind() const { return kind_; }

  double mean() const;
  double variance() const;
  double cdf(double x) const;
  /// Generalized inverse of the CDF at u in (0, 1).
  double quantile(double u) const;

  /// Integral of x dF(x) over [0, t].
  double lower_partial_moment(double t) const;
  /// Integral of x dF(x) over (t, b]; equals mean() - lower_partial_moment(t).
  double upper_partial_moment(double t) const;

  double support_min() const;
  /// Upper end of the support; +infinity for exponential laws.
  double support_max() const;
  bool bounded() const { return kind_ != LawKind::Exponential; }
  bool continuous() const { return kind_ != LawKind::Constant; }

  // Parameter accessors; only those relevant to kind() are meaningful.
  double lo() const { return p0_; }
  double hi() const { return p1_; }
  double alpha() const { return p0_; }
  double beta() const { return p1_; }
  double scale() const { return p2_; }
  double rate() const { return p0_; }
  double value() const { return p0_; }

  friend bool operator==(const ScalarLaw&, const ScalarLaw&) = default;

 protected:
  ScalarLaw(LawKind kind, double p0, double p1, double p2);

  static ScalarLaw make_uniform(double lo, double hi);
  static ScalarLaw make_scaled_beta(double a, double b, double scale);
  static ScalarLaw make_exponential(double rate);
  static ScalarLaw make_constant(double value);

 private:
  LawKind kind_;
  double p0_;
  double p1_;
  double p2_;
};

/// Law F of individual resource claims.
class ClaimLaw : public ScalarLaw {
 public:
  /// uniform(0, d)
  static ClaimLaw uniform(double d);
  /// scale * Beta(a, b)
  static ClaimLaw scaled_beta(double a, double b, double scale = 1.0);
  static ClaimLaw exponential(double rate);
  static ClaimLaw constant(double c);

  /// Upper support bound b (the `d` of uniform(0, d)).
  double d() const { return hi(); }

 private:
  explicit ClaimLaw(ScalarLaw law) : ScalarLaw(law) {}
};

/// Law of per-individual resource production.
class ResourceLaw : public ScalarLaw {
 public:
  static ResourceLaw uniform(double lo, double hi);
  static ResourceLaw constant(double r);
  static ResourceLaw scaled_beta(double a, double b, double scale = 1.0);

 private:
  explicit ResourceLaw(ScalarLaw law) : ScalarLaw(law) {}
};

struct LawTriple {
  OffspringLaw offspring;
  ClaimLaw claim;
  ResourceLaw resource;

  friend bool operator==(const LawTriple&, const LawTriple&) = default;
};

/// Per-assumption flags of the model's regularity conditions.
struct RegularityReport {
  bool m_gt_1 = false;
  bool p0_pos = false;
  bool pk_pos_some_k_ge_2 = false;
  /// Sufficient condition F(r/k) > 0 for some k >= 2 with p_k > 0, standing
  /// in for the reachability assumption, which is not a property of the
  /// laws alone.
  bool reachability_proxy = false;
  bool finite_variance = false;
  bool all_bounded = false;

  bool all() const {
    return m_gt_1 && p0_pos && pk_pos_some_k_ge_2 && reachability_proxy &&
           finite_variance && all_bounded;
  }
};

RegularityReport validate_regularity(const LawTriple& triple);

}  // namespace rdbp
