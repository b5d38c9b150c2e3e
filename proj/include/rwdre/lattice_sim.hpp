#pragma once

// Quenched simulation of the walk in a lazily realized IID environment,
// renewal-cycle sampling, and ratio estimation of the velocity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>
#include <variant>
#include <vector>

#include "rwdre/env_model.hpp"
#include "rwdre/error.hpp"

namespace rwdre {

inline constexpr std::size_t kMaxAtoms = 4;
inline constexpr std::uint64_t kDefaultSeed = 0xD1CE;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Precomputed cumulative tables for sampling atoms and steps.
class LawSampler {
 public:
  explicit LawSampler(const EnvironmentLaw& law) : atom_count_(law.size()) {
    if (law.size() > kMaxAtoms) throw InvalidInput("at most 4 atoms supported");
    double acc = 0.0;
    for (std::size_t i = 0; i < law.size(); ++i) {
      acc += law[i].probability;
      atom_cdf_[i] = acc;
      double dacc = 0.0;
      auto& table = steps_[i];
      for (Direction d : kAllDirections) {
        const double w = law[i].law.weight(d);
        if (w <= 0.0) continue;
        dacc += w;
        table.cdf[table.count] = dacc;
        table.dirs[table.count] = d;
        ++table.count;
      }
      table.cdf[table.count - 1] = 1.0;
    }
    atom_cdf_[atom_count_ - 1] = 1.0;
  }

  std::size_t atom_count() const { return atom_count_; }

  std::size_t pick_atom(double u) const {
    std::size_t i = 0;
    while (i + 1 < atom_count_ && u >= atom_cdf_[i]) ++i;
    return i;
  }

  Direction pick_step(std::size_t atom, double u) const {
    const auto& t = steps_[atom];
    std::size_t k = 0;
    while (k + 1 < t.count && u >= t.cdf[k]) ++k;
    return t.dirs[k];
  }

 private:
  struct StepTable {
    std::array<double, 4> cdf{};
    std::array<Direction, 4> dirs{};
    std::size_t count = 0;
  };

  std::size_t atom_count_;
  std::array<double, kMaxAtoms> atom_cdf_{};
  std::array<StepTable, kMaxAtoms> steps_{};
};

// A quenched environment: the atom at site (x,y) is a pure function of
// (seed, region, x, y) through a counter-based hash, so sites are realized
// on demand and never stored. Distinct regions are independent environments.
class EnvRealization {
 public:
  EnvRealization(const LawSampler& sampler, std::uint64_t seed, std::uint64_t region = 0)
      : sampler_(&sampler), key_(mix64(mix64(seed) ^ (region * 0xD6E8FEB86659FD93ull))) {}

  // Forces the origin to carry a fixed atom (used by anchored cycles).
  void pin_origin(std::size_t atom) { pinned_origin_ = atom; }

  std::size_t atom_at(std::int64_t x, std::int64_t y) const {
    if (pinned_origin_ && x == 0 && y == 0) return *pinned_origin_;
    const std::uint64_t h = mix64(key_ ^ mix64(static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull ^
                                               mix64(static_cast<std::uint64_t>(y))));
    return sampler_->pick_atom(to_unit(h));
  }

  const LawSampler& sampler() const { return *sampler_; }

 private:
  const LawSampler* sampler_;
  std::uint64_t key_;
  std::optional<std::size_t> pinned_origin_;
};

struct WalkState {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t steps = 0;
};

// One step of the walk from the site law at the current position.
template <typename Urbg>
WalkState step(const WalkState& state, const EnvRealization& env, Urbg& rng) {
  const std::size_t atom = env.atom_at(state.x, state.y);
  const Direction d = env.sampler().pick_step(atom, to_unit(rng()));
  const Offset o = offset(d);
  return {state.x + o.dx, state.y + o.dy, state.steps + 1};
}

struct RenewalSample {
  std::int64_t duration = 0;  // T
  std::int64_t dx = 0;        // X_T
  std::int64_t dy = 0;
  // Steps taken from each atom's sites before T.
  std::array<std::int64_t, kMaxAtoms> visits{};
};

struct CycleTimeout {
  std::int64_t steps = 0;
};

using CycleOutcome = std::variant<RenewalSample, CycleTimeout>;

// Walks from the origin of a fresh environment region until the cycle ends
// (first step along the renewal direction, or arrival at the next anchor).
template <typename Urbg>
CycleOutcome run_renewal_cycle(const RenewalScheme& scheme, EnvRealization env, Urbg& rng, std::int64_t max_steps) {
  if (max_steps < 1) throw InvalidInput("max_steps must be >= 1");
  RenewalSample sample;
  WalkState state;
  const LawSampler& sampler = env.sampler();
  if (scheme.kind == RenewalScheme::Kind::kAnchor) env.pin_origin(scheme.anchor_atom);

  while (state.steps < max_steps) {
    const std::size_t atom = env.atom_at(state.x, state.y);
    const Direction d = sampler.pick_step(atom, to_unit(rng()));
    ++sample.visits[atom];
    const Offset o = offset(d);
    state = {state.x + o.dx, state.y + o.dy, state.steps + 1};

    bool done = false;
    if (scheme.kind == RenewalScheme::Kind::kDirection) {
      done = d == scheme.direction;
    } else {
      done = (state.x != 0 || state.y != 0) && env.atom_at(state.x, state.y) == scheme.anchor_atom;
    }
    if (done) {
      sample.duration = state.steps;
      sample.dx = state.x;
      sample.dy = state.y;
      return sample;
    }
  }
  return CycleTimeout{state.steps};
}

struct SpeedEstimate {
  Vec2 velocity;
  Vec2 standard_error;
  double mean_duration = 0.0;  // estimate of E[T]
  double duration_se = 0.0;
  std::vector<double> mean_visits;  // per atom, per cycle
  std::size_t n_cycles = 0;         // completed cycles (or replicas)
  std::size_t timeouts = 0;
  std::int64_t total_steps = 0;     // all steps simulated, timeouts included
  std::uint64_t seed = 0;
  bool heavy_tail_warning = false;  // timeout fraction above 1%
  bool from_renewal = true;         // false: independent-trajectory estimate
};

struct SimulationOptions {
  std::int64_t max_steps = 1'000'000;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Default per-cycle budget: at least 1e6 and at least 100 / p^2.
inline std::int64_t default_max_steps(double p) {
  const double scaled = std::ceil(100.0 / (p * p));
  return std::max<std::int64_t>(1'000'000, static_cast<std::int64_t>(std::min(scaled, 1e12)));
}

namespace detail {

inline std::uint64_t cycle_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed ^ 0x5851F42D4C957F2Dull) + index);
}

// Runs body(i) for i in [0, n) over a fixed partition into contiguous blocks.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  unsigned t = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(1, n / 64)));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t block = (n + t - 1) / t;
  for (unsigned w = 0; w < t; ++w) {
    const std::size_t lo = w * block, hi = std::min(n, lo + block);
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Ratio estimator sum(X)/sum(T) with delta-method standard errors. Samples
// are reduced in index order, so the result does not depend on threading.
inline SpeedEstimate reduce_cycles(const std::vector<CycleOutcome>& outcomes, std::size_t atom_count,
                                   std::uint64_t seed) {
  SpeedEstimate est;
  est.seed = seed;
  std::int64_t sum_t = 0, sum_x = 0, sum_y = 0;
  std::array<std::int64_t, kMaxAtoms> sum_visits{};
  for (const CycleOutcome& o : outcomes) {
    if (const auto* s = std::get_if<RenewalSample>(&o)) {
      ++est.n_cycles;
      sum_t += s->duration;
      sum_x += s->dx;
      sum_y += s->dy;
      for (std::size_t i = 0; i < kMaxAtoms; ++i) sum_visits[i] += s->visits[i];
      est.total_steps += s->duration;
    } else {
      ++est.timeouts;
      est.total_steps += std::get<CycleTimeout>(o).steps;
    }
  }
  const std::size_t total = outcomes.size();
  est.heavy_tail_warning = total > 0 && static_cast<double>(est.timeouts) > 0.01 * static_cast<double>(total);
  if (est.n_cycles == 0) throw NonConvergence("every renewal cycle timed out");

  const double n = static_cast<double>(est.n_cycles);
  const double mt = static_cast<double>(sum_t) / n;
  const double mx = static_cast<double>(sum_x) / n;
  const double my = static_cast<double>(sum_y) / n;
  est.velocity = {mx / mt, my / mt};
  est.mean_duration = mt;
  for (std::size_t i = 0; i < atom_count; ++i) est.mean_visits.push_back(static_cast<double>(sum_visits[i]) / n);

  // Centered second moments in a second pass.
  double vtt = 0.0, vxx = 0.0, vyy = 0.0, cxt = 0.0, cyt = 0.0;
  for (const CycleOutcome& o : outcomes) {
    if (const auto* s = std::get_if<RenewalSample>(&o)) {
      const double dt = static_cast<double>(s->duration) - mt;
      const double dx = static_cast<double>(s->dx) - mx;
      const double dy = static_cast<double>(s->dy) - my;
      vtt += dt * dt;
      vxx += dx * dx;
      vyy += dy * dy;
      cxt += dx * dt;
      cyt += dy * dt;
    }
  }
  const double denom = n > 1 ? n - 1 : 1;
  vtt /= denom;
  vxx /= denom;
  vyy /= denom;
  cxt /= denom;
  cyt /= denom;
  auto ratio_var = [&](double vnum, double cov, double v) {
    return std::max(0.0, (vnum - 2.0 * v * cov + v * v * vtt) / (mt * mt * n));
  };
  est.standard_error = {std::sqrt(ratio_var(vxx, cxt, est.velocity.x)),
                        std::sqrt(ratio_var(vyy, cyt, est.velocity.y))};
  est.duration_se = std::sqrt(vtt / n);
  return est;
}

}  // namespace detail

// Runs n_cycles independent cycles. Cycle i uses environment region i and its
// own step stream, both derived from `seed`.
inline std::vector<CycleOutcome> sample_cycles(const EnvironmentLaw& law, const RenewalScheme& scheme,
                                               std::size_t n_cycles, std::uint64_t seed,
                                               const SimulationOptions& opts = {}) {
  const LawSampler sampler(law);
  std::vector<CycleOutcome> outcomes(n_cycles);
  detail::parallel_for(n_cycles, opts.threads, [&](std::size_t i) {
    std::mt19937_64 rng(detail::cycle_seed(seed, i));
    EnvRealization env(sampler, seed, i + 1);
    outcomes[i] = run_renewal_cycle(scheme, env, rng, opts.max_steps);
  });
  return outcomes;
}

inline SpeedEstimate estimate_speed(const EnvironmentLaw& law, std::size_t n_cycles, std::uint64_t seed,
                                    const SimulationOptions& opts = {}) {
  if (!check_unstuck(law)) throw Unsupported("walk gets stuck on a finite set of sites");
  const auto scheme = renewal_scheme(law);
  if (!scheme) throw Unsupported("no renewal direction");
  if (n_cycles < 2) throw InvalidInput("need at least two cycles");
  return detail::reduce_cycles(sample_cycles(law, *scheme, n_cycles, seed, opts), law.size(), seed);
}

inline SpeedEstimate estimate_speed(const ModelId& model, std::size_t n_cycles, std::uint64_t seed,
                                    std::optional<std::int64_t> max_steps = std::nullopt, unsigned threads = 0) {
  SimulationOptions opts;
  opts.max_steps = max_steps.value_or(default_max_steps(model.p()));
  opts.threads = threads;
  return estimate_speed(catalog(model), n_cycles, seed, opts);
}

// Velocity estimate for laws without a renewal structure: the mean of
// X_L / L over independent replicas, each in its own environment region.
inline SpeedEstimate estimate_speed_trajectories(const EnvironmentLaw& law, std::size_t replicas,
                                                 std::int64_t steps_per_replica, std::uint64_t seed,
                                                 unsigned threads = 0) {
  if (!check_unstuck(law)) throw Unsupported("walk gets stuck on a finite set of sites");
  if (replicas < 2 || steps_per_replica < 1) throw InvalidInput("need >= 2 replicas of >= 1 step");
  const LawSampler sampler(law);
  std::vector<std::array<std::int64_t, 2>> ends(replicas);
  detail::parallel_for(replicas, threads, [&](std::size_t i) {
    std::mt19937_64 rng(detail::cycle_seed(seed, i));
    EnvRealization env(sampler, seed, i + 1);
    WalkState s;
    while (s.steps < steps_per_replica) s = step(s, env, rng);
    ends[i] = {s.x, s.y};
  });
  SpeedEstimate est;
  est.seed = seed;
  est.from_renewal = false;
  est.n_cycles = replicas;
  est.total_steps = static_cast<std::int64_t>(replicas) * steps_per_replica;
  const double n = static_cast<double>(replicas), len = static_cast<double>(steps_per_replica);
  double mx = 0.0, my = 0.0;
  for (const auto& e : ends) {
    mx += static_cast<double>(e[0]) / len;
    my += static_cast<double>(e[1]) / len;
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0;
  for (const auto& e : ends) {
    vx += std::pow(static_cast<double>(e[0]) / len - mx, 2);
    vy += std::pow(static_cast<double>(e[1]) / len - my, 2);
  }
  est.velocity = {mx, my};
  est.standard_error = {std::sqrt(vx / (n - 1) / n), std::sqrt(vy / (n - 1) / n)};
  return est;
}

// Heuristic trap detection: the walk is declared stuck when no new site was
// discovered during the final 90% of the run.
struct StuckReport {
  std::size_t visited_sites = 0;   // distinct sites over the whole run
  std::size_t trapping_sites = 0;  // distinct sites visited in the final window
  std::int64_t last_new_site_step = 0;
  std::int64_t steps = 0;
  bool stuck = false;
  bool heuristic = true;
};

inline StuckReport detect_stuck(const EnvironmentLaw& law, std::uint64_t seed, std::int64_t max_steps) {
  if (max_steps < 10) throw InvalidInput("detect_stuck needs max_steps >= 10");
  const LawSampler sampler(law);
  EnvRealization env(sampler, seed, 0);
  std::mt19937_64 rng(detail::cycle_seed(seed, 0));
  auto pack = [](const WalkState& s) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
           static_cast<std::uint32_t>(s.y);
  };
  std::unordered_set<std::uint64_t> visited{pack(WalkState{})};
  std::unordered_set<std::uint64_t> window;
  const std::int64_t window_start = max_steps / 10;
  StuckReport report;
  WalkState s;
  if (window_start == 0) window.insert(pack(s));
  while (s.steps < max_steps) {
    s = step(s, env, rng);
    const std::uint64_t key = pack(s);
    if (visited.insert(key).second) report.last_new_site_step = s.steps;
    if (s.steps >= window_start) window.insert(key);
  }
  report.steps = s.steps;
  report.visited_sites = visited.size();
  report.trapping_sites = window.size();
  report.stuck = report.last_new_site_step < window_start;
  return report;
}

inline StuckReport detect_stuck(const ModelId& model, std::uint64_t seed, std::int64_t max_steps = 100'000) {
  return detect_stuck(catalog(model), seed, max_steps);
}

}  // namespace rwdre
