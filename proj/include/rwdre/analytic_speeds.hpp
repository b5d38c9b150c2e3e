#pragma once

// Closed-form mean renewal times and velocities for the explicitly solvable
// catalog models, plus the martingale bookkeeping that ties E[T], the
// expected visit counts per site type, and the velocity together.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/env_model.hpp"
#include "rwdre/error.hpp"
#include "rwdre/series.hpp"

namespace rwdre {

// Decomposition E[T] = E[S0] + E[S1|A0] P(A0) / (1 - P(A1|A0)) over the
// intervals between consecutive delimiter sites.
struct RenewalFactorValues {
  double es0 = 0.0;
  double es1_given_a0 = 0.0;
  double p_a0 = 0.0;
  double p_a1_given_a0 = 0.0;

  double assembled_time() const { return es0 + es1_given_a0 * p_a0 / (1.0 - p_a1_given_a0); }
};

struct SpeedResult {
  Vec2 velocity;
  double expected_time = 1.0;
  // Expected number of steps taken from each atom's sites before T, in
  // catalog atom order. Empty when the split is not determined.
  std::vector<double> visits;
  std::optional<RenewalFactorValues> factors;
  // Three-valued model quantities.
  std::optional<double> eta, xi, a, expected_delta;
  // NE_ALPHA_LEFT: W = (1 - alpha) E[T] and the NE_alpha site fraction 1/W.
  std::optional<double> w, pi1;
};

namespace detail {

inline SpeedResult finish(Vec2 v, double expected_time, std::vector<double> visits) {
  SpeedResult r;
  r.velocity = v;
  r.expected_time = expected_time;
  r.visits = std::move(visits);
  return r;
}

// 1 - p + p log p, with the series sum_{k>=2} e^k / (k (k-1)) in e = 1 - p
// near p = 1 where the direct form cancels.
inline double ne_lr_gap(double p) {
  const double e = 1.0 - p;
  if (e < 1e-4) {
    double sum = 0.0, power = e * e;
    for (int k = 2; k < 40; ++k) {
      sum += power / (k * (k - 1.0));
      power *= e;
    }
    return sum;
  }
  return e + p * std::log(p);
}

}  // namespace detail

// v1 of NE_ALPHA_LEFT written so that it is finite on the closed range
// alpha in [0,1]: v1(0) = p - 1 and v1(1) = 0.
inline double ne_alpha_left_v1(double alpha, double p) {
  return (1.0 + alpha) / (alpha + (1.0 - alpha) * (p + 1.0 / p - 1.0) + (1.0 - p) / (1.0 - p * alpha)) - 1.0;
}

// W = (1 - alpha) E[T] for NE_ALPHA_LEFT, finite on alpha in [0,1].
inline double ne_alpha_left_w(double alpha, double p) {
  return p + 1.0 / p - 1.0 + alpha * (2.0 - (p + 1.0 / p)) + (1.0 - p) / (1.0 - alpha * p);
}

// v1 of NE_NW, finite on the closed range p in [0,1].
inline double ne_nw_v1(double p) { return (2.0 * p - 1.0) * (p * p - p + 6.0) / (6.0 * (2.0 - p) * (1.0 + p)); }

inline SpeedResult speed(const ModelId& model, const SeriesTruncation& trunc = {}) {
  constexpr double g = GoldenConstants::gamma;
  constexpr double s5 = GoldenConstants::kSqrt5;
  const double p = model.p();
  const double q = 1.0 - p;
  SpeedResult r;

  switch (model.kind()) {
    case ModelKind::kUpRight: {
      const double et = 1.0 / p;
      r = detail::finish({q, p}, et, {1.0, et - 1.0});
      break;
    }
    case ModelKind::kLrUp: {
      const double et = 1.0 + p / (q * q);
      r = detail::finish({0.0, 1.0 / et}, et, {et - 1.0, 1.0});
      break;
    }
    case ModelKind::kLrRight: {
      // Cycles between consecutive right-arrow sites: the gap M is geometric
      // and the cycle takes M^2 steps on average.
      const double mean_gap = 1.0 / q;
      const double et = (1.0 + p) / (q * q);
      r = detail::finish({q / (1.0 + p), 0.0}, et, {et - mean_gap, mean_gap});
      break;
    }
    case ModelKind::kNeUp: {
      const double et = 1.0 / (1.0 - p / 2.0);
      r = detail::finish({p / 2.0, 1.0 - p / 2.0}, et, {p * et, q * et});
      break;
    }
    case ModelKind::kNeNw: {
      const double v1 = ne_nw_v1(p);
      const double mean_y = 2.0 * v1;
      r = detail::finish({v1, 0.5}, 2.0, {1.0 + mean_y, 1.0 - mean_y});
      break;
    }
    case ModelKind::kNeLr: {
      const double gap = detail::ne_lr_gap(p);
      const double et = 1.0 / (p * p) + q * q / (2.0 * p * gap);
      r = detail::finish({1.0 / et, 1.0 / et}, et, {2.0, et - 2.0});
      r.factors = RenewalFactorValues{1.0 / (p * p), 1.0 / p, 0.5, 1.0 - gap / (q * q)};
      break;
    }
    case ModelKind::kNeLeft: {
      const double et = (2.0 + 3.0 * p - 2.0 * p * p - p * p * p) / (p * (2.0 - p));
      r = detail::finish({-1.0 + 3.0 / et, 1.0 / et}, et, {2.0, et - 2.0});
      break;
    }
    case ModelKind::kSweDown: {
      auto term = [&](std::size_t k) {
        const double kd = static_cast<double>(k);
        return std::pow(p / g, kd) / (1.0 + std::pow(g, -kd));
      };
      const double tail = sum_series(term, 2, trunc, "SWE_DOWN series");
      const double et = 1.0 + 2.0 * p - 4.0 * p * q / (g - 1.0) + 4.0 * q * q * (g + 1.0) / (p * (g - 1.0)) * tail;
      r = detail::finish({0.0, -1.0 / et}, et, {1.5 * (et - 1.0), 0.5 * (3.0 - et)});
      break;
    }
    case ModelKind::kSweRight: {
      const double th_p = theta(p, trunc);
      const double th_pg = theta(p * g, trunc);
      const double bracket = 3.0 + s5 - q * (5.0 + s5) * th_p;
      const double et = 4.0 - p - (5.0 + s5) / 2.0 * q * q * th_pg +
                        q * bracket * bracket / ((3.0 + s5) * (2.0 - q * (5.0 + s5) * th_pg));
      r = detail::finish({1.0 - 3.0 / et, -1.0 / et}, et, {3.0, et - 3.0});
      RenewalFactorValues f;
      f.es0 = 3.0 + 2.0 * q / g + 2.0 * q * q / g * ((3.0 * g - 2.0) * th_p - (8.0 * g - 2.0) * th_pg);
      f.es1_given_a0 = 3.0 - 3.0 * q * (1.0 + g) * th_pg + g / (g - 1.0) - q * (1.0 + g) / (g - 1.0) * th_p;
      f.p_a0 = q / (g - 1.0) + q * q * (g + 1.0) * (th_pg - th_p / (g - 1.0));
      f.p_a1_given_a0 = q * (g + 1.0) * th_pg;
      r.factors = f;
      break;
    }
    case ModelKind::kSweSw: {
      // Computed for the mirror image (SWE, SE); E[T] is reflection invariant.
      const double t_p = theta_tilde(p, trunc);
      const double t_pg = theta_tilde(p * g, trunc);
      const double t_pgg = theta_tilde(p * g * g, trunc);
      const double g2 = g * g, g3 = g2 * g;
      RenewalFactorValues f;
      f.es0 = 3.0 + q * q / (g - 1.0) *
                        ((g3 + 6.0 * g2 - 3.0 * g) * t_pgg + (3.0 * g3 - 7.0 * g2 - 7.0 * g + 3.0) * t_pg -
                         (3.0 * g2 - 6.0 * g - 1.0) * t_p);
      f.es1_given_a0 = 3.0 + q * (g2 * t_pgg + 3.0 * (g2 - 1.0) * t_pg - t_p);
      f.p_a0 = q * q / (g - 1.0) *
               (g * (1.0 - 2.0 * g) * t_pgg - (g3 - 2.0 * g2 - 2.0 * g + 1.0) * t_pg + g * (g - 2.0) * t_p);
      f.p_a1_given_a0 = q * (1.0 - g2) * t_pg;
      const double et = f.assembled_time();
      r = detail::finish({1.0 - 3.0 / et, -1.0 / et}, et, {3.0 * et - 6.0, 6.0 - 2.0 * et});
      r.factors = f;
      break;
    }
    case ModelKind::kNeAlphaLeft: {
      const double al = model.alpha();
      const double et = al / (1.0 - al) + p + q / p + q / ((1.0 - al) * (1.0 - p * al));
      const double n1 = 1.0 / (1.0 - al);
      r = detail::finish({(1.0 + al) / (1.0 - al) / et - 1.0, 1.0 / et}, et, {n1, et - n1});
      r.w = (1.0 - al) * et;
      r.pi1 = 1.0 / *r.w;
      break;
    }
    case ModelKind::kNeAlphaBetaLeft: {
      const double al = model.alpha(), be = model.beta(), mix = model.q();
      const double eta = mix * al + (1.0 - mix) * be;
      const double xi = mix * al / (1.0 - al) + (1.0 - mix) * be / (1.0 - be);
      const double a = q * eta;
      const double delta = q * q * eta / (1.0 - a) - p / q;
      const double et = p * (1.0 + 2.0 * xi) + p / q + q / (1.0 - a) * (1.0 + 2.0 * p * xi);
      r = detail::finish({delta / et, 1.0 / et}, et, {});
      r.eta = eta;
      r.xi = xi;
      r.a = a;
      r.expected_delta = delta;
      break;
    }
    default:
      throw Unsupported(std::string(model.name()) + ": no closed form");
  }

  if (!std::isfinite(r.expected_time) || !std::isfinite(r.velocity.x) || !std::isfinite(r.velocity.y)) {
    throw NonConvergence(std::string(model.name()) + ": closed form evaluated to a non-finite value");
  }
  return r;
}

inline bool has_closed_form(ModelKind kind) { return model_spec(kind).closed_form == ClosedForm::kExact; }

struct MartingaleResiduals {
  // v^[j] E[T] - sum_i (drift_i)_j visits_i, for j = 1, 2.
  std::array<double, 2> coordinate{};
  // sum_i visits_i - E[T].
  double partition = 0.0;

  double max_abs() const {
    return std::max({std::abs(coordinate[0]), std::abs(coordinate[1]), std::abs(partition)});
  }
};

// Checks the closed-form velocity against the mean drifts of the catalog
// atoms weighted by the expected visit counts.
inline MartingaleResiduals martingale_check(const ModelId& model) {
  const SpeedResult r = speed(model);
  const EnvironmentLaw law = catalog(model);
  if (r.visits.size() != law.size()) {
    throw Unsupported(std::string(model.name()) + ": visit counts not available");
  }
  MartingaleResiduals res;
  double total = 0.0;
  Vec2 acc;
  for (std::size_t i = 0; i < law.size(); ++i) {
    const Vec2 drift = law[i].law.drift();
    acc.x += drift.x * r.visits[i];
    acc.y += drift.y * r.visits[i];
    total += r.visits[i];
  }
  res.coordinate[0] = r.velocity.x * r.expected_time - acc.x;
  res.coordinate[1] = r.velocity.y * r.expected_time - acc.y;
  res.partition = total - r.expected_time;
  return res;
}

// SWE_LR has no closed form. These are the first-order prediction as the
// two-way sites vanish (q = 1 - p -> 0) and the leading term as p -> 0.
struct SweLrAsymptotics {
  double small_q;
  double small_p;
};

inline SweLrAsymptotics swe_lr_asymptotics(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("swe_lr_asymptotics: p must lie in (0,1]");
  constexpr double s5 = GoldenConstants::kSqrt5;
  return {3.0 + (5.0 + s5) / 2.0 * (1.0 - p), 3.0 / (2.0 * p * p)};
}

}  // namespace rwdre
