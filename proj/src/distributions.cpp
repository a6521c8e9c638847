#include "rdbp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "rdbp/errors.hpp"
#include "rdbp/special_functions.hpp"

namespace rdbp {

// ---------------------------------------------------------------------------
// OffspringLaw

OffspringLaw::OffspringLaw(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) {
    throw DomainError("offspring law needs at least one probability");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < probabilities_.size(); ++k) {
    const double p = probabilities_[k];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError(fmt::format("offspring probability p_{} = {} is not a probability", k, p));
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw DomainError(fmt::format("offspring probabilities sum to {:.17g}, not 1", total));
  }
  while (probabilities_.size() > 1 && probabilities_.back() == 0.0) {
    probabilities_.pop_back();
  }
  cumulative_.resize(probabilities_.size());
  std::partial_sum(probabilities_.begin(), probabilities_.end(), cumulative_.begin());
  cumulative_.back() = 1.0;
}

OffspringLaw OffspringLaw::point_mass(std::size_t k) {
  std::vector<double> p(k + 1, 0.0);
  p[k] = 1.0;
  return OffspringLaw(std::move(p));
}

double OffspringLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probabilities_.size(); ++k) {
    m += static_cast<double>(k) * probabilities_[k];
  }
  return m;
}

double OffspringLaw::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < probabilities_.size(); ++k) {
    const double dk = static_cast<double>(k) - m;
    v += dk * dk * probabilities_[k];
  }
  return v;
}

std::uint64_t OffspringLaw::sample(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = static_cast<std::uint64_t>(it - cumulative_.begin());
  // Zero-probability cells cannot be hit even when u lands on a flat step.
  return std::min<std::uint64_t>(k, probabilities_.size() - 1);
}

// ---------------------------------------------------------------------------
// ScalarLaw

std::string_view to_string(LawKind kind) {
  switch (kind) {
    case LawKind::Uniform:
      return "uniform";
    case LawKind::ScaledBeta:
      return "scaled_beta";
    case LawKind::Exponential:
      return "exponential";
    case LawKind::Constant:
      return "constant";
  }
  return "unknown";
}

ScalarLaw::ScalarLaw(LawKind kind, double p0, double p1, double p2)
    : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}

ScalarLaw ScalarLaw::make_uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw DomainError(fmt::format("uniform law needs 0 <= lo < hi < inf, got ({}, {})", lo, hi));
  }
  return {LawKind::Uniform, lo, hi, 0.0};
}

ScalarLaw ScalarLaw::make_scaled_beta(double a, double b, double scale) {
  if (!(a > 0.0) || !(b > 0.0) || !(scale > 0.0) || !std::isfinite(a) ||
      !std::isfinite(b) || !std::isfinite(scale)) {
    throw DomainError(fmt::format("scaled beta law needs a, b, scale > 0, got ({}, {}, {})", a, b, scale));
  }
  return {LawKind::ScaledBeta, a, b, scale};
}

ScalarLaw ScalarLaw::make_exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError(fmt::format("exponential law needs rate > 0, got {}", rate));
  }
  return {LawKind::Exponential, rate, 0.0, 0.0};
}

ScalarLaw ScalarLaw::make_constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("constant law needs a finite value >= 0, got {}", value));
  }
  return {LawKind::Constant, value, 0.0, 0.0};
}

double ScalarLaw::mean() const {
  switch (kind_) {
    case LawKind::Uniform:
      return 0.5 * (p0_ + p1_);
    case LawKind::ScaledBeta:
      return p2_ * p0_ / (p0_ + p1_);
    case LawKind::Exponential:
      return 1.0 / p0_;
    case LawKind::Constant:
      return p0_;
  }
  return 0.0;
}

double ScalarLaw::variance() const {
  switch (kind_) {
    case LawKind::Uniform: {
      const double w = p1_ - p0_;
      return w * w / 12.0;
    }
    case LawKind::ScaledBeta: {
      const double s = p0_ + p1_;
      return p2_ * p2_ * p0_ * p1_ / (s * s * (s + 1.0));
    }
    case LawKind::Exponential:
      return 1.0 / (p0_ * p0_);
    case LawKind::Constant:
      return 0.0;
  }
  return 0.0;
}

double ScalarLaw::cdf(double x) const {
  switch (kind_) {
    case LawKind::Uniform:
      if (x <= p0_) return 0.0;
      if (x >= p1_) return 1.0;
      return (x - p0_) / (p1_ - p0_);
    case LawKind::ScaledBeta:
      if (x <= 0.0) return 0.0;
      if (x >= p2_) return 1.0;
      return special::reg_inc_beta(p0_, p1_, x / p2_);
    case LawKind::Exponential:
      if (x <= 0.0) return 0.0;
      return -std::expm1(-p0_ * x);
    case LawKind::Constant:
      return x >= p0_ ? 1.0 : 0.0;
  }
  return 0.0;
}

double ScalarLaw::quantile(double u) const {
  switch (kind_) {
    case LawKind::Uniform:
      return p0_ + u * (p1_ - p0_);
    case LawKind::ScaledBeta:
      return p2_ * special::inverse_reg_inc_beta(p0_, p1_, u);
    case LawKind::Exponential:
      return -std::log1p(-u) / p0_;
    case LawKind::Constant:
      return p0_;
  }
  return 0.0;
}

double ScalarLaw::lower_partial_moment(double t) const {
  switch (kind_) {
    case LawKind::Uniform: {
      if (t <= p0_) return 0.0;
      const double x = std::min(t, p1_);
      return (x * x - p0_ * p0_) / (2.0 * (p1_ - p0_));
    }
    case LawKind::ScaledBeta: {
      if (t <= 0.0) return 0.0;
      if (t >= p2_) return mean();
      // x dF(x) for Beta(a, b) is mu times the Beta(a + 1, b) density.
      return mean() * special::reg_inc_beta(p0_ + 1.0, p1_, t / p2_);
    }
    case LawKind::Exponential: {
      if (t <= 0.0) return 0.0;
      const double lt = p0_ * t;
      return (-std::expm1(-lt) - lt * std::exp(-lt)) / p0_;
    }
    case LawKind::Constant:
      return t >= p0_ ? p0_ : 0.0;
  }
  return 0.0;
}

double ScalarLaw::upper_partial_moment(double t) const {
  if (kind_ == LawKind::Exponential && t > 0.0) {
    // Direct form avoids cancellation in the far tail.
    return (t + 1.0 / p0_) * std::exp(-p0_ * t);
  }
  return mean() - lower_partial_moment(t);
}

double ScalarLaw::support_min() const {
  switch (kind_) {
    case LawKind::Uniform:
      return p0_;
    case LawKind::Constant:
      return p0_;
    default:
      return 0.0;
  }
}

double ScalarLaw::support_max() const {
  switch (kind_) {
    case LawKind::Uniform:
      return p1_;
    case LawKind::ScaledBeta:
      return p2_;
    case LawKind::Exponential:
      return std::numeric_limits<double>::infinity();
    case LawKind::Constant:
      return p0_;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// ClaimLaw / ResourceLaw

ClaimLaw ClaimLaw::uniform(double d) { return ClaimLaw(make_uniform(0.0, d)); }

ClaimLaw ClaimLaw::scaled_beta(double a, double b, double scale) {
  return ClaimLaw(make_scaled_beta(a, b, scale));
}

ClaimLaw ClaimLaw::exponential(double rate) { return ClaimLaw(make_exponential(rate)); }

ClaimLaw ClaimLaw::constant(double c) {
  if (!(c > 0.0)) {
    throw DomainError(fmt::format("constant claim must be positive, got {}", c));
  }
  return ClaimLaw(make_constant(c));
}

ResourceLaw ResourceLaw::uniform(double lo, double hi) {
  return ResourceLaw(make_uniform(lo, hi));
}

ResourceLaw ResourceLaw::constant(double r) { return ResourceLaw(make_constant(r)); }

ResourceLaw ResourceLaw::scaled_beta(double a, double b, double scale) {
  return ResourceLaw(make_scaled_beta(a, b, scale));
}

// ---------------------------------------------------------------------------

RegularityReport validate_regularity(const LawTriple& triple) {
  RegularityReport report;
  const auto& off = triple.offspring;
  const double m = off.mean();
  const double r = triple.resource.mean();

  report.m_gt_1 = m > 1.0;
  report.p0_pos = off.probability(0) > 0.0;
  for (std::size_t k = 2; k <= off.max_offspring(); ++k) {
    if (off.probability(k) > 0.0) {
      report.pk_pos_some_k_ge_2 = true;
      if (triple.claim.cdf(r / static_cast<double>(k)) > 0.0) {
        report.reachability_proxy = true;
      }
    }
  }
  // Finite offspring support and the shipped claim/resource kinds all have
  // finite second moments.
  report.finite_variance = std::isfinite(off.variance()) &&
                           std::isfinite(triple.claim.variance()) &&
                           std::isfinite(triple.resource.variance());
  report.all_bounded = triple.claim.bounded() && triple.resource.bounded();
  return report;
}

}  // namespace rdbp
