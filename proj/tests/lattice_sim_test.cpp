#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rwdre/analytic_speeds.hpp"
#include "rwdre/lattice_sim.hpp"

namespace rwdre {
namespace {

using D = Direction;

ModelId model(ModelKind kind, double p, double alpha = 0.7) { return ModelId(kind, ModelParams{p, alpha}); }

EnvironmentLaw single(ArrowSet arrows) { return EnvironmentLaw({{uniform_site_law(arrows), 1.0, ""}}); }

TEST(Step, DeterministicSite) {
  const EnvironmentLaw law = single({D::kNorth});
  const LawSampler sampler(law);
  const EnvRealization env(sampler, 1);
  std::mt19937_64 rng(7);
  const WalkState s = step(WalkState{}, env, rng);
  EXPECT_EQ(s.x, 0);
  EXPECT_EQ(s.y, 1);
  EXPECT_EQ(s.steps, 1);
}

TEST(Step, FrequencyAndParity) {
  const EnvironmentLaw law = single({D::kNorth, D::kEast});
  const LawSampler sampler(law);
  const EnvRealization env(sampler, 3);
  std::mt19937_64 rng(11);
  WalkState s;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    s = step(s, env, rng);
    ASSERT_EQ((s.x + s.y + s.steps) % 2, 0);
  }
  const double freq = static_cast<double>(s.y) / n;
  EXPECT_NEAR(freq, 0.5, 3.0 * std::sqrt(0.25 / n));
}

TEST(EnvRealization, Reproducible) {
  const EnvironmentLaw law = catalog(model(ModelKind::kSweLr, 0.3));
  const LawSampler sampler(law);
  const EnvRealization a(sampler, 42, 5), b(sampler, 42, 5), c(sampler, 42, 6);
  int differ = 0, ones = 0;
  const int side = 100;
  for (int x = -side / 2; x < side / 2; ++x) {
    for (int y = -side / 2; y < side / 2; ++y) {
      ASSERT_EQ(a.atom_at(x, y), b.atom_at(x, y));
      differ += a.atom_at(x, y) != c.atom_at(x, y);
      ones += a.atom_at(x, y) == 0;
    }
  }
  const double n = side * side;
  EXPECT_GT(differ, 0);
  EXPECT_NEAR(ones / n, 0.3, 3.0 * std::sqrt(0.21 / n));
}

TEST(RenewalCycle, UpRightGeometric) {
  const ModelId m = model(ModelKind::kUpRight, 0.3);
  const EnvironmentLaw law = catalog(m);
  const auto outcomes = sample_cycles(law, *renewal_scheme(law), 50000, 9);
  int ones = 0;
  for (const auto& o : outcomes) ones += std::get<RenewalSample>(o).duration == 1;
  const double n = static_cast<double>(outcomes.size());
  EXPECT_NEAR(ones / n, 0.3, 3.0 * std::sqrt(0.21 / n));
}

TEST(RenewalCycle, AlwaysUp) {
  const EnvironmentLaw law = single({D::kNorth});
  for (const auto& o : sample_cycles(law, *renewal_scheme(law), 100, 1)) {
    const auto& s = std::get<RenewalSample>(o);
    EXPECT_EQ(s.duration, 1);
    EXPECT_EQ(s.dx, 0);
    EXPECT_EQ(s.dy, 1);
  }
}

TEST(RenewalCycle, TimeoutReported) {
  const ModelId m = model(ModelKind::kLrUp, 0.9);
  SimulationOptions opts;
  opts.max_steps = 3;
  const SpeedEstimate e = estimate_speed(catalog(m), 2000, 5, opts);
  EXPECT_GT(e.timeouts, 0u);
  EXPECT_TRUE(e.heavy_tail_warning);
  EXPECT_EQ(e.n_cycles + e.timeouts, 2000u);
}

TEST(RenewalCycle, HorizontalModelsRiseByOne) {
  for (ModelKind kind : {ModelKind::kLrUp, ModelKind::kNeNw, ModelKind::kNeLr, ModelKind::kNeLeft,
                         ModelKind::kSweDown, ModelKind::kSweRight, ModelKind::kSweSw, ModelKind::kSweLr,
                         ModelKind::kNeAlphaLeft, ModelKind::kNeAlphaBetaLeft}) {
    const ModelId m(kind, ModelParams{0.4, 0.6, 0.2, 0.5});
    const EnvironmentLaw law = catalog(m);
    const RenewalScheme scheme = *renewal_scheme(law);
    ASSERT_EQ(scheme.kind, RenewalScheme::Kind::kDirection);
    const Offset e = offset(scheme.direction);
    for (const auto& o : sample_cycles(law, scheme, 2000, 17)) {
      const auto& s = std::get<RenewalSample>(o);
      ASSERT_EQ(s.dx * e.dx + s.dy * e.dy, 1) << model_name(kind);
    }
  }
}

TEST(EstimateSpeed, NeNwMeanTime) {
  const SpeedEstimate e = estimate_speed(model(ModelKind::kNeNw, 0.75), 100000, kDefaultSeed);
  EXPECT_NEAR(e.mean_duration, 2.0, 3.0 * e.duration_se);
}

TEST(EstimateSpeed, UpRight) {
  const SpeedEstimate e = estimate_speed(model(ModelKind::kUpRight, 0.5), 100000, kDefaultSeed);
  EXPECT_NEAR(e.velocity.x, 0.5, 3.0 * e.standard_error.x);
  EXPECT_NEAR(e.velocity.y, 0.5, 3.0 * e.standard_error.y);
}

TEST(EstimateSpeed, NeLrDiagonal) {
  const SpeedEstimate e = estimate_speed(model(ModelKind::kNeLr, 0.5), 100000, kDefaultSeed);
  EXPECT_LE(std::abs(e.velocity.x - e.velocity.y), 3.0 * (e.standard_error.x + e.standard_error.y));
}

TEST(EstimateSpeed, LrUpdownSymmetric) {
  const EnvironmentLaw law = catalog(model(ModelKind::kLrUpdown, 0.5));
  EXPECT_THROW(estimate_speed(law, 100, 1), Unsupported);
  const SpeedEstimate e = estimate_speed_trajectories(law, 5000, 1000, kDefaultSeed);
  EXPECT_FALSE(e.from_renewal);
  EXPECT_NEAR(e.velocity.x, 0.0, 3.0 * e.standard_error.x);
  EXPECT_NEAR(e.velocity.y, 0.0, 3.0 * e.standard_error.y);
}

TEST(EstimateSpeed, StuckRejected) {
  EXPECT_THROW(estimate_speed(model(ModelKind::kUpDown, 0.5), 100, 1), Unsupported);
}

TEST(EstimateSpeed, ReproducibleAcrossThreadCounts) {
  const ModelId m = model(ModelKind::kSweSw, 0.4);
  const SpeedEstimate a = estimate_speed(m, 20000, 77, std::nullopt, 1);
  const SpeedEstimate b = estimate_speed(m, 20000, 77, std::nullopt, 4);
  const SpeedEstimate c = estimate_speed(m, 20000, 78, std::nullopt, 4);
  EXPECT_EQ(a.velocity.x, b.velocity.x);
  EXPECT_EQ(a.velocity.y, b.velocity.y);
  EXPECT_EQ(a.standard_error.x, b.standard_error.x);
  EXPECT_EQ(a.total_steps, b.total_steps);
  EXPECT_NE(a.total_steps, c.total_steps);
}

TEST(EstimateSpeed, DurationsAccountForAllSteps) {
  const ModelId m = model(ModelKind::kNeLeft, 0.3);
  const EnvironmentLaw law = catalog(m);
  const auto outcomes = sample_cycles(law, *renewal_scheme(law), 5000, 3);
  std::int64_t sum = 0;
  for (const auto& o : outcomes) sum += std::get<RenewalSample>(o).duration;
  const SpeedEstimate e = estimate_speed(law, 5000, 3);
  EXPECT_EQ(e.total_steps, sum);
  EXPECT_EQ(e.timeouts, 0u);
}

TEST(EstimateSpeed, SpeedBoundedByOne) {
  for (const ModelSpec& spec : kModelSpecs) {
    const ModelId m(spec.kind, ModelParams{0.35, 0.6, 0.3, 0.5});
    const EnvironmentLaw law = catalog(m);
    if (!check_unstuck(law) || !renewal_scheme(law)) continue;
    const SpeedEstimate e = estimate_speed(m, 2000, 5);
    EXPECT_LE(std::abs(e.velocity.x) + std::abs(e.velocity.y),
              1.0 + 3.0 * (e.standard_error.x + e.standard_error.y))
        << spec.name;
  }
}

// Per-atom step counts match the martingale visit counts.
TEST(EstimateSpeed, VisitCountsMatchAnalytic) {
  for (ModelKind kind : {ModelKind::kNeLeft, ModelKind::kSweRight, ModelKind::kSweSw, ModelKind::kNeAlphaLeft,
                         ModelKind::kLrRight, ModelKind::kSweDown}) {
    const ModelId m = model(kind, 0.5);
    const SpeedEstimate e = estimate_speed(m, 200000, 21);
    const SpeedResult a = speed(m);
    for (std::size_t i = 0; i < a.visits.size(); ++i) {
      EXPECT_NEAR(e.mean_visits[i], a.visits[i], 0.02 * a.expected_time) << model_name(kind) << " atom " << i;
    }
  }
}

// Time to leave the initial two-way stretch alone gives
// E[T] >= sum_{j,k>=1} p^2 q^{j+k-1} jk = q / p^2, and each of the (on
// average three) visits to a three-way site adds O(1/p).
TEST(EstimateSpeed, SweLrSmallP) {
  for (double p : {0.05, 0.02}) {
    const SpeedEstimate e = estimate_speed(model(ModelKind::kSweLr, p), 10000, kDefaultSeed);
    const double q = 1.0 - p;
    EXPECT_EQ(e.timeouts, 0u);
    EXPECT_GT(e.mean_duration + 3.0 * e.duration_se, q / (p * p));
    EXPECT_LT(e.mean_duration - 3.0 * e.duration_se, q / (p * p) + 10.0 / p);
  }
}

TEST(DetectStuck, UpDownTrapsOnTwoSites) {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 0xD1CEull}) {
    const StuckReport r = detect_stuck(model(ModelKind::kUpDown, 0.5), seed);
    EXPECT_TRUE(r.stuck);
    EXPECT_EQ(r.trapping_sites, 2u);
  }
}

TEST(DetectStuck, TransientModels) {
  const StuckReport ur = detect_stuck(model(ModelKind::kUpRight, 0.5), 1, 10000);
  EXPECT_FALSE(ur.stuck);
  EXPECT_EQ(ur.visited_sites, 10001u);
  const StuckReport lr = detect_stuck(model(ModelKind::kSweLr, 0.5), 1, 1'000'000);
  EXPECT_FALSE(lr.stuck);
  EXPECT_GT(lr.visited_sites, 1000u);
}

}  // namespace
}  // namespace rwdre
