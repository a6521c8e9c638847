#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rdbp::testing {

/// Adaptive Simpson quadrature; the oracle for partial moments.
template <class F>
double simpson(F&& f, double a, double b, double eps = 1e-13, int depth = 50) {
  const auto rec = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi,
                       double whole, double tol, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
      return left + right + (left + right - whole) / 15.0;
    }
    return self(self, lo, mid, flo, flm, fmid, left, tol / 2.0, d - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, tol / 2.0, d - 1);
  };
  // Fixed panels first so a narrow peak cannot slip between the first nodes.
  constexpr int kPanels = 64;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + (b - a) * i / kPanels;
    const double hi = a + (b - a) * (i + 1) / kPanels;
    const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += rec(rec, lo, hi, flo, fm, fhi, whole, eps / kPanels, depth);
  }
  return total;
}

/// Random integer claim strings, the form used by the brute-force oracles.
inline std::vector<double> integer_claims(std::mt19937_64& rng, std::size_t len, int max_claim) {
  std::uniform_int_distribution<int> d(1, max_claim);
  std::vector<double> out(len);
  for (auto& x : out) x = d(rng);
  return out;
}

inline std::vector<double> real_claims(std::mt19937_64& rng, std::size_t len, double max_claim) {
  std::uniform_real_distribution<double> d(0.0, max_claim);
  std::vector<double> out(len);
  for (auto& x : out) x = d(rng);
  return out;
}

/// Greedy prefix count of `claims` taken in the order `perm`.
inline std::uint64_t prefix_count(const std::vector<double>& claims,
                                  const std::vector<std::size_t>& perm, double s) {
  double used = 0.0;
  std::uint64_t n = 0;
  for (auto i : perm) {
    if (used + claims[i] > s) break;
    used += claims[i];
    ++n;
  }
  return n;
}

}  // namespace rdbp::testing
