#pragma once

// Brute-force verifiers that share no algebra with the closed forms:
// tridiagonal solves for exit times and exit probabilities on a segment,
// E[T] by enumerating the geometric gap configurations of the environment,
// the renewal-factor decomposition, and exact path enumeration of the
// Feynman-Kac sum for SWE_LR.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/analytic_speeds.hpp"
#include "rwdre/env_model.hpp"
#include "rwdre/error.hpp"

namespace rwdre {

// A nearest-neighbour chain on sites 0..n. From free site k the walk moves
// left with probability left[k], right with right[k], and is killed with the
// remaining probability. Sites with a fixed value are absorbing.
struct LineChain {
  std::vector<double> left;
  std::vector<double> right;
  std::vector<std::optional<double>> fixed;

  explicit LineChain(std::size_t sites) : left(sites, 0.0), right(sites, 0.0), fixed(sites) {}
  std::size_t size() const { return left.size(); }
};

// Solves u_k = source + left_k u_{k-1} + right_k u_{k+1} on free sites and
// u_k = fixed_k on absorbing ones, by Gaussian elimination on the
// tridiagonal system.
inline std::vector<double> solve_line_chain(const LineChain& chain, double source) {
  const std::size_t n = chain.size();
  if (n == 0) return {};
  std::vector<double> c(n, 0.0), d(n, 0.0), u(n, 0.0);
  double prev_c = 0.0, prev_d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double a = 0.0, b = 1.0, cc = 0.0, rhs = 0.0;
    if (chain.fixed[k]) {
      rhs = *chain.fixed[k];
    } else {
      a = k > 0 ? -chain.left[k] : 0.0;
      cc = k + 1 < n ? -chain.right[k] : 0.0;
      rhs = source;
    }
    const double pivot = b - a * prev_c;
    if (std::abs(pivot) < 1e-300) throw NonConvergence("solve_line_chain: singular system");
    c[k] = cc / pivot;
    d[k] = (rhs - a * prev_d) / pivot;
    prev_c = c[k];
    prev_d = d[k];
  }
  u[n - 1] = d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) u[k] = d[k] - c[k] * u[k + 1];
  return u;
}

inline double line_chain_residual(const LineChain& chain, double source, const std::vector<double>& u) {
  double worst = 0.0;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    double expect = 0.0;
    if (chain.fixed[k]) {
      expect = *chain.fixed[k];
    } else {
      expect = source;
      if (k > 0) expect += chain.left[k] * u[k - 1];
      if (k + 1 < chain.size()) expect += chain.right[k] * u[k + 1];
    }
    worst = std::max(worst, std::abs(u[k] - expect));
  }
  return worst;
}

// Boundary-value problem on [0, n]: interior sites step left and right with
// probability s each (killed with 1 - 2s), the right end absorbs.
struct BvpSpec {
  struct Left {
    enum class Kind { kAbsorb, kReflect, kReflectProb };
    Kind kind = Kind::kAbsorb;
    double value = 0.0;         // kAbsorb: exit-time boundary value
    double survive = 1.0;       // kReflectProb: reflect with this, else die

    static Left absorb(double c) { return {Kind::kAbsorb, c, 1.0}; }
    static Left reflect() { return {Kind::kReflect, 0.0, 1.0}; }
    static Left reflect_prob(double r) { return {Kind::kReflectProb, 0.0, r}; }
  };

  int n = 1;
  double s = 0.5;
  Left left = Left::absorb(0.0);
  double right_value = 0.0;  // exit-time value at n

  void validate() const {
    if (n < 1) throw InvalidInput("BvpSpec: n must be >= 1");
    if (!(s > 0.0 && s <= 0.5)) throw InvalidInput("BvpSpec: s must lie in (0, 1/2]");
    if (left.kind == Left::Kind::kReflectProb && !(left.survive >= 0.0 && left.survive <= 1.0)) {
      throw InvalidInput("BvpSpec: reflect probability must lie in [0,1]");
    }
  }
};

struct BvpSolution {
  std::vector<double> values;  // indexed 0..n
  double max_residual = 0.0;
};

namespace detail {

// The chain for a BvpSpec; `for_probability` switches the absorbing values
// to the indicator of exiting at n.
inline LineChain bvp_chain(const BvpSpec& spec, bool for_probability) {
  spec.validate();
  const std::size_t sites = static_cast<std::size_t>(spec.n) + 1;
  LineChain chain(sites);
  for (std::size_t k = 1; k + 1 < sites; ++k) {
    chain.left[k] = spec.s;
    chain.right[k] = spec.s;
  }
  switch (spec.left.kind) {
    case BvpSpec::Left::Kind::kAbsorb:
      chain.fixed[0] = for_probability ? 0.0 : spec.left.value;
      break;
    case BvpSpec::Left::Kind::kReflect:
      chain.right[0] = 1.0;
      break;
    case BvpSpec::Left::Kind::kReflectProb:
      chain.right[0] = spec.left.survive;
      break;
  }
  chain.fixed[sites - 1] = for_probability ? 1.0 : spec.right_value;
  return chain;
}

}  // namespace detail

// Expected time until death or absorption from each starting site.
inline BvpSolution solve_exit_time(const BvpSpec& spec) {
  const LineChain chain = detail::bvp_chain(spec, false);
  BvpSolution sol;
  sol.values = solve_line_chain(chain, 1.0);
  sol.max_residual = line_chain_residual(chain, 1.0, sol.values);
  return sol;
}

// Probability of being absorbed at n (rather than killed or absorbed at 0).
inline BvpSolution solve_exit_prob(const BvpSpec& spec) {
  const LineChain chain = detail::bvp_chain(spec, true);
  BvpSolution sol;
  sol.values = solve_line_chain(chain, 0.0);
  sol.max_residual = line_chain_residual(chain, 0.0, sol.values);
  return sol;
}

// ---------------------------------------------------------------------------
// Environment enumeration

struct EnumerationPolicy {
  // Stop once a bound on the contribution of all longer configurations
  // (their probability times a bound on their mean) falls below this.
  double tail_tolerance = 1e-13;
  std::size_t max_length = 200000;
};

struct EnumerationResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::size_t max_length = 0;  // longest gap enumerated
};

namespace detail {

// Adds contribution(n) for n = first, first+1, ... and stops when the
// remainder sum_{m>n} tail_term(m) is below the policy tolerance.
inline EnumerationResult enumerate_gaps(std::size_t first, const std::function<double(std::size_t)>& contribution,
                                        const std::function<double(std::size_t)>& tail_term,
                                        const EnumerationPolicy& policy) {
  EnumerationResult result;
  for (std::size_t n = first; n < first + policy.max_length; ++n) {
    result.value += contribution(n);
    if (tail_term(n + 1) >= policy.tail_tolerance) continue;
    double remainder = 0.0;
    for (std::size_t m = n + 1; m < n + 1 + policy.max_length; ++m) {
      const double t = tail_term(m);
      remainder += t;
      if (t <= 1e-18 * remainder || t < 1e-300) break;
    }
    if (remainder < policy.tail_tolerance) {
      result.error_bound = remainder;
      result.max_length = n;
      return result;
    }
  }
  throw NonConvergence("environment enumeration exceeded max_length");
}

inline double sum_range(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t k = lo; k < hi; ++k) s += v[k];
  return s;
}

}  // namespace detail

struct RenewalFactorEnumeration {
  RenewalFactorValues factors;
  double expected_time = 0.0;
  double error_bound = 0.0;
};

// E[S0], E[S1|A0], P(A0), P(A1|A0) for the interval-renewal models, each
// summed over delimiter gaps n with per-gap exit times and exit
// probabilities from solve_exit_time / solve_exit_prob.
inline RenewalFactorEnumeration renewal_factors(const ModelId& model, const EnumerationPolicy& policy = {}) {
  const double p = model.p();
  double delimiter = 0.0;  // probability that a site is an interval delimiter
  BvpSpec base;
  double time_bound_scale = 0.0;
  switch (model.kind()) {
    case ModelKind::kNeLr:
      delimiter = p;
      base.s = 0.5;
      base.left = BvpSpec::Left::reflect_prob(0.5);
      break;
    case ModelKind::kSweRight:
      delimiter = 1.0 - p;
      base.s = 1.0 / 3.0;
      base.left = BvpSpec::Left::reflect();
      time_bound_scale = 8.0;
      break;
    case ModelKind::kSweSw:
      // Mirror image (SWE, SE): the delimiter steps east or dies.
      delimiter = 1.0 - p;
      base.s = 1.0 / 3.0;
      base.left = BvpSpec::Left::reflect_prob(0.5);
      time_bound_scale = 8.0;
      break;
    default:
      throw Unsupported(std::string(model.name()) + ": no renewal-factor oracle");
  }
  const double d = delimiter, e = 1.0 - d;
  auto time_bound = [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    return time_bound_scale > 0.0 ? time_bound_scale : (nd + 1.0) * (nd + 1.0);
  };
  auto spec_for = [&](std::size_t n) {
    BvpSpec s = base;
    s.n = static_cast<int>(n);
    return s;
  };

  // One pass per gap length computes all four sums at once.
  struct Sums {
    double es0 = 0, es1 = 0, pa0 = 0, pa1 = 0;
  } sums;
  auto contribution = [&](std::size_t n) {
    const BvpSolution f = solve_exit_time(spec_for(n));
    const BvpSolution g = solve_exit_prob(spec_for(n));
    const double w_start = d * d * std::pow(e, static_cast<double>(n) - 1.0);
    const double w_gap = d * std::pow(e, static_cast<double>(n) - 1.0);
    sums.es0 += w_start * detail::sum_range(f.values, 0, n);
    sums.pa0 += w_start * detail::sum_range(g.values, 0, n);
    sums.es1 += w_gap * f.values[0];
    sums.pa1 += w_gap * g.values[0];
    return 0.0;
  };
  // Per-gap bound on any of the four summands, times its probability weight.
  auto tail = [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    return d * std::pow(e, nd - 1.0) * (d * nd + 1.0) * time_bound(n);
  };
  const EnumerationResult run = detail::enumerate_gaps(1, contribution, tail, policy);

  RenewalFactorEnumeration out;
  out.factors = {sums.es0, sums.es1, sums.pa0, sums.pa1};
  out.expected_time = out.factors.assembled_time();
  // First-order propagation of the common truncation bound through
  // A + B C / (1 - D).
  const double one_minus_d = 1.0 - sums.pa1;
  const double eb = run.error_bound;
  out.error_bound = eb * (1.0 + std::abs(sums.pa0 / one_minus_d) + std::abs(sums.es1 / one_minus_d) +
                          std::abs(sums.es1 * sums.pa0 / (one_minus_d * one_minus_d)));
  return out;
}

// E[T] by enumerating the environment around the origin. Each configuration's
// mean comes from a tridiagonal solve, never from a closed form.
inline EnumerationResult exact_ET_by_env_enumeration(const ModelId& model, const EnumerationPolicy& policy = {}) {
  const double p = model.p();
  const double q = 1.0 - p;
  switch (model.kind()) {
    case ModelKind::kLrUp: {
      // Origin up-arrow: T = 1. Otherwise up-arrows at both ends of a run of
      // n - 1 two-way sites, T = 1 + exit time from the origin's position.
      double total = q;
      auto contribution = [&](std::size_t n) {
        if (n < 2) return 0.0;
        BvpSpec spec;
        spec.n = static_cast<int>(n);
        spec.s = 0.5;
        const BvpSolution f = solve_exit_time(spec);
        const double w = std::pow(p, static_cast<double>(n) - 1.0) * q * q;
        double s = 0.0;
        for (std::size_t k = 1; k < n; ++k) s += 1.0 + f.values[k];
        return w * s;
      };
      auto tail = [&](std::size_t n) {
        const double nd = static_cast<double>(n);
        return (nd - 1.0) * std::pow(p, nd - 1.0) * q * q * (1.0 + nd * nd / 4.0);
      };
      EnumerationResult r = detail::enumerate_gaps(2, contribution, tail, policy);
      r.value += total;
      return r;
    }
    case ModelKind::kLrRight: {
      // One cycle between consecutive right-arrows at gap m: reflecting walk
      // from 0 to m.
      auto contribution = [&](std::size_t m) {
        BvpSpec spec;
        spec.n = static_cast<int>(m);
        spec.s = 0.5;
        spec.left = BvpSpec::Left::reflect();
        return std::pow(p, static_cast<double>(m) - 1.0) * q * solve_exit_time(spec).values[0];
      };
      auto tail = [&](std::size_t m) {
        const double md = static_cast<double>(m);
        return std::pow(p, md - 1.0) * q * md * md;
      };
      return detail::enumerate_gaps(1, contribution, tail, policy);
    }
    case ModelKind::kNeLr:
    case ModelKind::kSweRight:
    case ModelKind::kSweSw: {
      const RenewalFactorEnumeration rf = renewal_factors(model, policy);
      return {rf.expected_time, rf.error_bound, 0};
    }
    case ModelKind::kNeLeft:
    case ModelKind::kNeAlphaLeft: {
      const double alpha = model.kind() == ModelKind::kNeLeft ? 0.5 : model.alpha();
      // Scenario A: left-arrows on sites -i+1..0 and NE_alpha at -i.
      // Scenario B: NE_alpha on sites 0..j-1 and a left-arrow at j.
      auto contribution = [&](std::size_t n) {
        LineChain a(n + 1);
        a.right[0] = alpha;
        for (std::size_t k = 1; k <= n; ++k) a.left[k] = 1.0;
        LineChain b(n + 1);
        for (std::size_t k = 0; k < n; ++k) b.right[k] = alpha;
        b.left[n] = 1.0;
        const double nd = static_cast<double>(n);
        return p * std::pow(q, nd) * solve_line_chain(a, 1.0)[n] + q * std::pow(p, nd) * solve_line_chain(b, 1.0)[0];
      };
      auto tail = [&](std::size_t n) {
        const double nd = static_cast<double>(n);
        return (p * std::pow(q, nd) + q * std::pow(p, nd)) * (nd + 1.0 + 2.0 * alpha / (1.0 - alpha));
      };
      return detail::enumerate_gaps(1, contribution, tail, policy);
    }
    case ModelKind::kSweDown: {
      // Origin down-arrow: T = 1. Otherwise down-arrows at both ends of a run
      // of n - 1 three-way sites.
      auto contribution = [&](std::size_t n) {
        if (n < 2) return 0.0;
        BvpSpec spec;
        spec.n = static_cast<int>(n);
        spec.s = 1.0 / 3.0;
        spec.left = BvpSpec::Left::absorb(1.0);
        spec.right_value = 1.0;
        const BvpSolution f = solve_exit_time(spec);
        return std::pow(p, static_cast<double>(n) - 1.0) * q * q * detail::sum_range(f.values, 1, n);
      };
      auto tail = [&](std::size_t n) {
        const double nd = static_cast<double>(n);
        return 3.0 * (nd - 1.0) * std::pow(p, nd - 1.0) * q * q;
      };
      EnumerationResult r = detail::enumerate_gaps(2, contribution, tail, policy);
      r.value += q;
      return r;
    }
    default:
      throw Unsupported(std::string(model.name()) + ": no enumeration oracle");
  }
}

// ---------------------------------------------------------------------------
// Feynman-Kac path enumeration for SWE_LR

inline constexpr int kMaxFeynmanKacDepth = 26;

struct FeynmanKacResult {
  std::vector<double> terms;  // P(T > k) for k = 0..k_max
  double partial_sum = 0.0;   // sum of terms
  double tail_estimate = 0.0; // extrapolated remainder; heuristic, not a bound

  double estimate() const { return partial_sum + tail_estimate; }
};

namespace detail {

struct FkWalker {
  std::vector<long double> factor;  // q + p (2/3)^c
  std::vector<int> visits;          // indexed by site + offset
  std::vector<long double> depth_sums;
  int k_max = 0;
  int center = 0;

  void run(int depth, int pos, long double prod) {
    depth_sums[static_cast<std::size_t>(depth)] += prod;
    if (depth == k_max) return;
    int& c = visits[static_cast<std::size_t>(pos + center)];
    const long double next = prod * factor[static_cast<std::size_t>(c + 1)] / factor[static_cast<std::size_t>(c)];
    ++c;
    run(depth + 1, pos - 1, next);
    run(depth + 1, pos + 1, next);
    --c;
  }
};

// Extrapolates P(T > k) beyond the last computed term by fitting
// log t_k = a - c k^b through the terms at K-8, K-4 and K (survival among
// traps decays like a stretched exponential), falling back to a geometric
// fit of the last two terms when the three-point fit has no solution.
inline double stretched_tail(const std::vector<double>& t) {
  const int K = static_cast<int>(t.size()) - 1;
  if (K < 2) return 0.0;
  auto geometric = [&] {
    const double ratio = t[K] / t[K - 1];
    return ratio > 0.0 && ratio < 1.0 ? t[K] * ratio / (1.0 - ratio) : 0.0;
  };
  if (K < 12 || t[K] <= 0.0 || t[K - 4] <= 0.0 || t[K - 8] <= 0.0) return geometric();
  const double k1 = K - 8, k2 = K - 4, k3 = K;
  const double l1 = std::log(t[K - 8]), l2 = std::log(t[K - 4]), l3 = std::log(t[K]);
  auto mismatch = [&](double b) {
    return (l2 - l1) / (std::pow(k2, b) - std::pow(k1, b)) - (l3 - l2) / (std::pow(k3, b) - std::pow(k2, b));
  };
  double lo = 0.05, hi = 3.0;
  if (mismatch(lo) * mismatch(hi) > 0.0) return geometric();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mismatch(lo) * mismatch(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double b = 0.5 * (lo + hi);
  const double c = -(l3 - l2) / (std::pow(k3, b) - std::pow(k2, b));
  if (!(c > 0.0)) return geometric();
  const double a = l3 + c * std::pow(k3, b);
  double tail = 0.0;
  for (long k = K + 1; k < 10'000'000; ++k) {
    const double term = std::exp(a - c * std::pow(static_cast<double>(k), b));
    tail += term;
    if (term < 1e-17 * tail) break;
  }
  return tail;
}

}  // namespace detail

// E[T] = sum_{k>=0} P(T > k) for SWE_LR, where
// P(T > k) = 2^-k sum over simple-random-walk paths of length k of
// prod_j (q + p (2/3)^{N_j(k)}), N_j(k) the visits to j before time k.
// Paths are enumerated depth-first so every prefix is shared.
inline FeynmanKacResult feynman_kac_ET(double p, int k_max) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("feynman_kac_ET: p must lie in (0,1]");
  if (k_max < 1) throw InvalidInput("feynman_kac_ET: k_max must be >= 1");
  if (k_max > kMaxFeynmanKacDepth) throw InvalidInput("feynman_kac_ET: k_max too large (2^k paths)");
  const long double q = 1.0L - p;
  detail::FkWalker walker;
  walker.k_max = k_max;
  walker.center = k_max + 1;
  walker.visits.assign(static_cast<std::size_t>(2 * k_max + 3), 0);
  walker.depth_sums.assign(static_cast<std::size_t>(k_max + 1), 0.0L);
  for (int c = 0; c <= k_max + 1; ++c) walker.factor.push_back(q + p * std::pow(2.0L / 3.0L, c));
  walker.run(0, 0, 1.0L);

  FeynmanKacResult out;
  long double scale = 1.0L, sum = 0.0L;
  for (int k = 0; k <= k_max; ++k) {
    const long double term = walker.depth_sums[static_cast<std::size_t>(k)] * scale;
    out.terms.push_back(static_cast<double>(term));
    sum += term;
    scale /= 2.0L;
  }
  out.partial_sum = static_cast<double>(sum);
  out.tail_estimate = detail::stretched_tail(out.terms);
  return out;
}

// (E[T](q) - E[T](0)) / q from partial sums at the same depth, so the
// truncation error cancels to first order in q.
inline double feynman_kac_slope(double q, int k_max) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("feynman_kac_slope: q must lie in (0,1)");
  return (feynman_kac_ET(1.0 - q, k_max).partial_sum - feynman_kac_ET(1.0, k_max).partial_sum) / q;
}

// Local-time profiles of all 2^k paths of length k: the sorted visit counts
// of the visited sites, with the number of paths sharing each profile.
using LocalTimeProfiles = std::map<std::vector<int>, std::uint64_t>;

inline LocalTimeProfiles local_time_profiles(int k) {
  if (k < 0 || k > 22) throw InvalidInput("local_time_profiles: k must lie in [0,22]");
  LocalTimeProfiles out;
  std::vector<int> visits(static_cast<std::size_t>(2 * k + 3), 0);
  const int center = k + 1;
  std::function<void(int, int)> rec = [&](int depth, int pos) {
    if (depth == k) {
      std::vector<int> profile;
      for (int c : visits) {
        if (c > 0) profile.push_back(c);
      }
      std::sort(profile.rbegin(), profile.rend());
      ++out[profile];
      return;
    }
    ++visits[static_cast<std::size_t>(pos + center)];
    rec(depth + 1, pos - 1);
    rec(depth + 1, pos + 1);
    --visits[static_cast<std::size_t>(pos + center)];
  };
  rec(0, 0);
  return out;
}

// P(T > k) for SWE_LR evaluated from grouped profiles.
inline double feynman_kac_term(double p, int k, const LocalTimeProfiles& profiles) {
  const double q = 1.0 - p;
  long double total = 0.0L;
  for (const auto& [profile, count] : profiles) {
    long double w = static_cast<long double>(count);
    for (int c : profile) w *= q + p * std::pow(2.0L / 3.0L, c);
    total += w;
  }
  return static_cast<double>(total / std::pow(2.0L, k));
}

// Solves f_j = 1 + (2/3)(f_{j+1} + f_{j-1})/2 for j != 0 and
// f_0 = 1 + (f_1 + f_{-1})/2 on [-window, window] with f = 3 at both ends.
// Returns f_{-window..window}.
inline std::vector<double> first_order_profile(int window) {
  if (window < 1) throw InvalidInput("first_order_profile: window must be >= 1");
  const std::size_t sites = static_cast<std::size_t>(2 * window + 1);
  LineChain chain(sites);
  for (std::size_t k = 1; k + 1 < sites; ++k) {
    const double w = (k == static_cast<std::size_t>(window)) ? 0.5 : 1.0 / 3.0;
    chain.left[k] = w;
    chain.right[k] = w;
  }
  chain.fixed[0] = 3.0;
  chain.fixed[sites - 1] = 3.0;
  return solve_line_chain(chain, 1.0);
}

// First-order coefficient of E[T] in q = 1 - p for SWE_LR: sum_j (f_j - 3),
// on a window doubled until the sum is insensitive to the boundary.
inline double first_order_coefficient() {
  auto coefficient = [](int window) {
    double s = 0.0;
    for (double f : first_order_profile(window)) s += f - 3.0;
    return s;
  };
  int window = 8;
  double current = coefficient(window);
  while (window <= (1 << 14)) {
    const double next = coefficient(2 * window);
    if (std::abs(next - current) < 1e-13) return next;
    current = next;
    window *= 2;
  }
  throw NonConvergence("first_order_coefficient: window too small");
}

}  // namespace rwdre
