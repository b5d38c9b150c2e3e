#pragma once

// Special-function evaluators for the exit-time formulas with killing rate
// 1/3: the golden constants, the unilateral q-hypergeometric series Q(q;p),
// and the series Theta and Theta-tilde.

#include <cmath>
#include <cstddef>
#include <string>

#include "rwdre/error.hpp"

namespace rwdre {

// Roots of z + 1/z = 3.
struct GoldenConstants {
  static constexpr double kSqrt5 = 2.2360679774997896964;
  static constexpr double gamma = 2.6180339887498948482;      // (3 + sqrt 5) / 2
  static constexpr double gamma_bar = 0.3819660112501051518;  // (3 - sqrt 5) / 2
};

struct SeriesTruncation {
  double relative_tolerance = 1e-14;
  std::size_t max_terms = 100000;
};

// Sums term(k) for k = first, first+1, ... and stops once a term is below
// relative_tolerance times the running sum. `term` must decay geometrically.
template <typename TermFn>
double sum_series(TermFn&& term, std::size_t first, const SeriesTruncation& trunc, const char* what) {
  double sum = 0.0;
  double compensation = 0.0;
  for (std::size_t k = first; k < first + trunc.max_terms; ++k) {
    const double t = term(k);
    // Kahan summation keeps the long tails of slowly decaying series honest.
    const double y = t - compensation;
    const double s = sum + y;
    compensation = (s - sum) - y;
    sum = s;
    if (std::abs(t) <= trunc.relative_tolerance * std::abs(sum) || t == 0.0) return sum;
  }
  throw NonConvergence(std::string(what) + ": no convergence within max_terms");
}

// Q(q;p) = 1 + 2 sum_{k>=1} p^k / (q^k + 1), for q > 1 and 0 <= p < 1.
inline double q_hyper_Q(double q, double p, const SeriesTruncation& trunc = {}) {
  if (!(q > 1.0)) throw InvalidInput("q_hyper_Q: q must exceed 1");
  if (!(p >= 0.0 && p < 1.0)) throw InvalidInput("q_hyper_Q: p must lie in [0,1)");
  if (p == 0.0) return 1.0;
  const double ratio = p / q;
  // p^k / (q^k + 1) = (p/q)^k / (1 + q^-k)
  auto term = [&](std::size_t k) {
    const double kd = static_cast<double>(k);
    return std::pow(ratio, kd) / (1.0 + std::pow(q, -kd));
  };
  return 1.0 + 2.0 * sum_series(term, 1, trunc, "q_hyper_Q");
}

// Theta(z) = sum_{n>=0} z^n / (gamma^(2n+1) + 1), convergent for |z| < gamma^2.
inline double theta(double z, const SeriesTruncation& trunc = {}) {
  constexpr double g = GoldenConstants::gamma;
  if (!(std::abs(z) < g * g)) throw NonConvergence("theta: diverges for |z| >= gamma^2");
  const double ratio = z / (g * g);
  // z^n / (gamma^(2n+1) + 1) = (z/gamma^2)^n / (gamma + gamma^-2n)
  auto term = [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::pow(ratio, nd) / (g + std::pow(g, -2.0 * nd));
  };
  return sum_series(term, 0, trunc, "theta");
}

// Theta~(z) = sum_{n>=0} z^n / (gamma^(2n+1) (1 - 2 gamma) - gamma + 2),
// convergent for |z| < gamma^2. Every denominator is negative.
inline double theta_tilde(double z, const SeriesTruncation& trunc = {}) {
  constexpr double g = GoldenConstants::gamma;
  if (!(std::abs(z) < g * g)) throw NonConvergence("theta_tilde: diverges for |z| >= gamma^2");
  const double ratio = z / (g * g);
  auto term = [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::pow(ratio, nd) / (g * (1.0 - 2.0 * g) + (2.0 - g) * std::pow(g, -2.0 * nd));
  };
  return sum_series(term, 0, trunc, "theta_tilde");
}

// Denominator of the n-th Theta~ term, exposed for the sign invariant.
inline double theta_tilde_denominator(std::size_t n) {
  constexpr double g = GoldenConstants::gamma;
  return std::pow(g, 2.0 * static_cast<double>(n) + 1.0) * (1.0 - 2.0 * g) - g + 2.0;
}

}  // namespace rwdre
