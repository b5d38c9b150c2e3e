#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rwdre/analytic_speeds.hpp"

namespace rwdre {
namespace {

ModelId model(ModelKind kind, double p, double alpha = 0.7, double beta = 0.3, double q = 0.4) {
  return ModelId(kind, ModelParams{p, alpha, beta, q});
}

const std::vector<ModelKind> kClosedForms = {
    ModelKind::kUpRight, ModelKind::kLrUp,     ModelKind::kLrRight,  ModelKind::kNeUp,
    ModelKind::kNeNw,    ModelKind::kNeLr,     ModelKind::kNeLeft,   ModelKind::kSweDown,
    ModelKind::kSweRight, ModelKind::kSweSw,   ModelKind::kNeAlphaLeft, ModelKind::kNeAlphaBetaLeft};

TEST(Speed, TableValues) {
  const SpeedResult lr = speed(model(ModelKind::kLrRight, 0.5));
  EXPECT_NEAR(lr.velocity.x, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(lr.velocity.y, 0.0);

  const SpeedResult nw = speed(model(ModelKind::kNeNw, 0.5));
  EXPECT_EQ(nw.velocity.x, 0.0);
  EXPECT_EQ(nw.velocity.y, 0.5);

  const SpeedResult ur = speed(model(ModelKind::kUpRight, 0.3));
  EXPECT_NEAR(ur.velocity.x, 0.7, 1e-15);
  EXPECT_NEAR(ur.velocity.y, 0.3, 1e-15);

  EXPECT_NEAR(speed(model(ModelKind::kLrUp, 0.5)).expected_time, 3.0, 1e-14);
  EXPECT_NEAR(speed(model(ModelKind::kNeUp, 0.4)).velocity.x, 0.2, 1e-15);
}

TEST(Speed, NeLrNearOne) {
  const double p = 1.0 - 1e-4;
  const SpeedResult r = speed(model(ModelKind::kNeLr, p));
  EXPECT_NEAR(r.velocity.x, 0.5, 1e-3);
  EXPECT_EQ(r.velocity.x, r.velocity.y);
  // The guarded series and the direct expression agree where both are accurate.
  const double pp = 1.0 - 2e-4;
  const double direct = 1.0 / (pp * pp) + (1.0 - pp) * (1.0 - pp) / (2.0 * pp * (1.0 - pp + pp * std::log(pp)));
  EXPECT_NEAR(speed(model(ModelKind::kNeLr, pp)).expected_time, direct, 1e-6);
  const SpeedResult closer = speed(model(ModelKind::kNeLr, 1.0 - 1e-9));
  EXPECT_NEAR(closer.velocity.x, 0.5, 1e-8);
}

TEST(Speed, Invariants) {
  for (ModelKind kind : kClosedForms) {
    for (double p = 0.1; p < 0.95; p += 0.1) {
      const SpeedResult r = speed(model(kind, p));
      EXPECT_GE(r.expected_time, 1.0);
      EXPECT_LE(std::abs(r.velocity.x) + std::abs(r.velocity.y), 1.0 + 1e-12);
      if (!r.visits.empty()) {
        double total = 0.0;
        for (double v : r.visits) total += v;
        EXPECT_NEAR(total, r.expected_time, 1e-10 * r.expected_time);
      }
    }
  }
}

TEST(Speed, SweMartingaleRelation) {
  for (int i = 1; i <= 20; ++i) {
    const double p = i / 21.0;
    for (ModelKind kind : {ModelKind::kSweRight, ModelKind::kSweSw}) {
      const SpeedResult r = speed(model(kind, p));
      EXPECT_NEAR(r.velocity.x, 1.0 + 3.0 * r.velocity.y, 1e-14);
      EXPECT_LT(r.velocity.y, 0.0);
    }
    const SpeedResult ne = speed(model(ModelKind::kNeLr, p));
    EXPECT_EQ(ne.velocity.x, ne.velocity.y);
  }
}

TEST(Speed, AlphaHalfReducesToNeLeft) {
  for (double p = 0.01; p < 1.0; p += 0.01) {
    EXPECT_NEAR(speed(model(ModelKind::kNeAlphaLeft, p, 0.5)).expected_time,
                speed(model(ModelKind::kNeLeft, p)).expected_time, 1e-12)
        << "p=" << p;
  }
}

// With alpha = beta the three-valued model is NE_ALPHA_LEFT with the atom
// probabilities swapped.
TEST(Speed, EqualAlphaBetaReducesToTwoValued) {
  for (double p : {0.2, 0.5, 0.8}) {
    for (double al : {0.1, 0.5, 0.9}) {
      for (double q : {0.25, 0.75}) {
        const SpeedResult three = speed(model(ModelKind::kNeAlphaBetaLeft, p, al, al, q));
        const SpeedResult two = speed(model(ModelKind::kNeAlphaLeft, 1.0 - p, al));
        EXPECT_NEAR(three.expected_time, two.expected_time, 1e-12);
        EXPECT_NEAR(three.velocity.x, two.velocity.x, 1e-12);
        EXPECT_NEAR(three.velocity.y, two.velocity.y, 1e-12);
      }
    }
  }
}

TEST(Speed, NeAlphaLeftMonotoneTime) {
  for (double p = 0.05; p < 0.96; p += 0.05) {
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double et = speed(model(ModelKind::kNeAlphaLeft, p, i / 100.0)).expected_time;
      EXPECT_GT(et, prev);
      prev = et;
    }
  }
  for (double al = 0.05; al < 0.96; al += 0.05) {
    double prev = INFINITY;
    for (int i = 1; i < 100; ++i) {
      const double et = speed(model(ModelKind::kNeAlphaLeft, i / 100.0, al)).expected_time;
      EXPECT_LT(et, prev);
      prev = et;
    }
  }
}

TEST(Speed, NeAlphaLeftInteriorMaximum) {
  auto v1 = [](double al, double p) { return ne_alpha_left_v1(al, p); };
  double best = -1.0, at = -1.0;
  for (int i = 0; i <= 100; ++i) {
    if (v1(i / 100.0, 0.6) > best) {
      best = v1(i / 100.0, 0.6);
      at = i / 100.0;
    }
  }
  EXPECT_GT(best, 0.0);
  EXPECT_GT(at, 0.0);
  EXPECT_LT(at, 1.0);
  for (int i = 1; i <= 100; ++i) EXPECT_GE(v1(i / 100.0, 0.4), v1((i - 1) / 100.0, 0.4));
  // The closed-range helper agrees with speed() inside the range.
  EXPECT_NEAR(v1(0.3, 0.6), speed(model(ModelKind::kNeAlphaLeft, 0.6, 0.3)).velocity.x, 1e-14);
}

TEST(Speed, WEndpoints) {
  for (double p : {0.2, 0.5, 0.8}) {
    EXPECT_NEAR(ne_alpha_left_w(0.0, p), 1.0 / p, 1e-12);
    EXPECT_NEAR(ne_alpha_left_w(1.0, p), 2.0, 1e-12);
    const SpeedResult r = speed(model(ModelKind::kNeAlphaLeft, p, 0.4));
    EXPECT_NEAR(*r.w, ne_alpha_left_w(0.4, p), 1e-12);
    EXPECT_NEAR(*r.pi1, 1.0 / *r.w, 1e-15);
  }
  EXPECT_NEAR(ne_alpha_left_w(0.0, 0.5), ne_alpha_left_w(1.0, 0.5), 1e-12);
}

TEST(Speed, ThreeValuedIntermediates) {
  const SpeedResult r = speed(model(ModelKind::kNeAlphaBetaLeft, 0.3, 0.6, 0.2, 0.25));
  const double eta = 0.25 * 0.6 + 0.75 * 0.2;
  EXPECT_NEAR(*r.eta, eta, 1e-15);
  EXPECT_NEAR(*r.xi, 0.25 * 0.6 / 0.4 + 0.75 * 0.2 / 0.8, 1e-15);
  EXPECT_NEAR(*r.a, 0.7 * eta, 1e-15);
  EXPECT_NEAR(r.velocity.x * r.expected_time, *r.expected_delta, 1e-14);
}

TEST(Speed, FactorsAssemble) {
  for (ModelKind kind : {ModelKind::kNeLr, ModelKind::kSweSw}) {
    const SpeedResult r = speed(model(kind, 0.35));
    ASSERT_TRUE(r.factors.has_value());
    EXPECT_NEAR(r.factors->assembled_time(), r.expected_time, 1e-12);
  }
  // SWE_RIGHT: the simplified E[T] equals the assembled factors.
  for (double p : {0.1, 0.4, 0.9}) {
    const SpeedResult r = speed(model(ModelKind::kSweRight, p));
    EXPECT_NEAR(r.factors->assembled_time(), r.expected_time, 1e-10);
  }
}

TEST(Speed, NoClosedForm) {
  EXPECT_THROW(speed(model(ModelKind::kNeSw, 0.5)), Unsupported);
  EXPECT_THROW(speed(model(ModelKind::kSweLr, 0.5)), Unsupported);
  EXPECT_FALSE(has_closed_form(ModelKind::kUpDown));
  EXPECT_TRUE(has_closed_form(ModelKind::kSweSw));
}

TEST(Martingale, Residuals) {
  for (ModelKind kind : kClosedForms) {
    if (kind == ModelKind::kNeAlphaBetaLeft) continue;
    for (double p : {0.2, 0.5, 0.8}) {
      EXPECT_LT(martingale_check(model(kind, p)).max_abs(), 1e-10) << model_name(kind) << " p=" << p;
    }
  }
  EXPECT_THROW(martingale_check(model(ModelKind::kNeAlphaBetaLeft, 0.5)), Unsupported);
}

TEST(Martingale, VisitCounts) {
  EXPECT_DOUBLE_EQ(speed(model(ModelKind::kSweRight, 0.3)).visits[0], 3.0);
  EXPECT_DOUBLE_EQ(speed(model(ModelKind::kNeLeft, 0.3)).visits[0], 2.0);
  EXPECT_NEAR(speed(model(ModelKind::kNeAlphaLeft, 0.3, 0.8)).visits[0], 5.0, 1e-14);
}

TEST(SweLrAsymptotics, Values) {
  const SweLrAsymptotics a = swe_lr_asymptotics(1.0);
  EXPECT_DOUBLE_EQ(a.small_q, 3.0);
  EXPECT_NEAR((swe_lr_asymptotics(0.9).small_q - 3.0) / 0.1, 3.6180339887498949, 1e-12);
  EXPECT_NEAR(swe_lr_asymptotics(0.02).small_p, 3750.0, 1e-9);
}

}  // namespace
}  // namespace rwdre
