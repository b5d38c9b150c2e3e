#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rwdre/cli.hpp"

namespace rwdre {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Models, Listing) {
  const auto rows = list_models();
  ASSERT_EQ(rows.size(), 25u);
  int stuck = 0;
  for (const auto& r : rows) {
    if (r.name == "UP_DOWN") {
      EXPECT_FALSE(r.unstuck);
    } else if (r.name == "NE_SW") {
      EXPECT_EQ(r.closed_form, "no closed form");
    } else if (r.name == "NE_NW") {
      EXPECT_EQ(r.renewal, "N");
    } else if (r.name == "LR_RIGHT") {
      EXPECT_EQ(r.renewal, "anchor E");
    } else if (r.name == "NE_ALPHA_BETA_LEFT") {
      EXPECT_EQ(r.arity, 4);
    }
    stuck += !r.unstuck;
  }
  EXPECT_EQ(stuck, 1);
  const std::string text = format_model_listing(rows);
  EXPECT_NE(text.find("stuck"), std::string::npos);
}

TEST(Csv, HeaderAndEmptyFields) {
  EXPECT_EQ(to_csv({}),
            "model,p,alpha,beta,q,param_swept,param_value,v1_analytic,v2_analytic,ET_analytic,v1_sim,v2_sim,se1,se2,"
            "n_cycles,seed,pass\n");
  ComparisonRow r;
  r.model = "NE_NW";
  r.params.p = 0.75;
  r.v1_analytic = 0.5;
  EXPECT_EQ(csv_row(r), "NE_NW,0.75,,,,,,0.5,,,,,,,,,");
}

TEST(Csv, RoundTripPrecision) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(SpeedCommand, Modes) {
  SpeedRequest req;
  req.cycles = 20000;
  const ComparisonRow lr = compute_speed(ModelId("LR_RIGHT", {0.5}), req);
  ASSERT_TRUE(lr.pass.has_value());
  EXPECT_TRUE(*lr.pass);
  EXPECT_NEAR(*lr.et_oracle, *lr.et_analytic, 1e-10);

  req.mode = SpeedMode::kAnalytic;
  EXPECT_THROW(compute_speed(ModelId("NE_SW", {0.5}), req), Unsupported);
  const ComparisonRow an = compute_speed(ModelId("NE_NW", {0.75}), req);
  EXPECT_FALSE(an.v1_sim.has_value());

  req.mode = SpeedMode::kSimulate;
  EXPECT_THROW(compute_speed(ModelId("UP_DOWN", {0.5}), req), Unsupported);
  const ComparisonRow sw = compute_speed(ModelId("NE_SW", {0.3}), req);
  EXPECT_TRUE(sw.v1_sim.has_value());
  EXPECT_FALSE(sw.pass.has_value());
}

TEST(SpeedCommand, SymmetricModelWithoutRenewal) {
  SpeedRequest req;
  req.cycles = 50000;
  const ComparisonRow r = compute_speed(ModelId("LR_UPDOWN", {0.5}), req);
  EXPECT_FALSE(r.from_renewal);
  EXPECT_TRUE(*r.pass);
}

TEST(Sweep, Grid) {
  const auto grid = sweep_grid(0.5, 1.0, 0.1);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid.front(), 0.5);
  EXPECT_EQ(grid.back(), 1.0);
  EXPECT_THROW(sweep_grid(1.0, 0.5, 0.1), InvalidInput);
  EXPECT_THROW(sweep_grid(0.0, 1.0, 0.0), InvalidInput);
  EXPECT_THROW(sweep_grid(0.0, 1.0, 1e-5), InvalidInput);
}

TEST(Sweep, NeNwShape) {
  SweepSpec s;
  s.model = "NE_NW";
  s.from = 0.5;
  s.to = 1.0;
  s.step = 0.01;
  const auto rows = run_sweep(s);
  ASSERT_EQ(rows.size(), 51u);
  for (const auto& r : rows) {
    const double p = *r.param_value, v1 = *r.v1_analytic;
    EXPECT_GE(v1, -1e-12);
    EXPECT_LE(v1, p - 0.5 + 1e-12);
    const bool endpoint = p == 0.5 || p == 1.0;
    if (!endpoint) {
      EXPECT_LT(v1, p - 0.5 - 1e-12);
    }
  }
  EXPECT_NEAR(*rows.back().v1_analytic, 0.5, 1e-15);
}

TEST(Sweep, WEndpointsAgreeAtHalf) {
  SweepSpec s;
  s.model = "NE_ALPHA_LEFT";
  s.param = "alpha";
  s.from = 0.0;
  s.to = 1.0;
  s.step = 0.05;
  s.fixed.p = 0.5;
  const auto rows = run_sweep(s);
  const CurvePoint lo = evaluate_curve(ModelKind::kNeAlphaLeft, rows.front().params);
  const CurvePoint hi = evaluate_curve(ModelKind::kNeAlphaLeft, rows.back().params);
  EXPECT_NEAR(*lo.w, 2.0, 1e-12);
  EXPECT_NEAR(*hi.w, 2.0, 1e-12);
  EXPECT_FALSE(rows.back().et_analytic.has_value());
}

TEST(Sweep, DeterministicCsv) {
  SweepSpec s;
  s.model = "SWE_RIGHT";
  s.from = 0.2;
  s.to = 0.8;
  s.step = 0.2;
  s.cycles = 3000;
  s.seed = 5;
  const std::string a = to_csv(run_sweep(s));
  s.threads = 1;
  const std::string b = to_csv(run_sweep(s));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find(",true"), std::string::npos);
}

TEST(Sweep, AtomicWrite) {
  const fs::path dir = fs::temp_directory_path() / "rwdre_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / "out.csv";
  write_file_atomic(out, "a,b\n");
  EXPECT_EQ(slurp(out), "a,b\n");
  EXPECT_FALSE(fs::exists(dir / "out.csv.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "x.csv", "x"), Error);
  EXPECT_FALSE(fs::exists(dir / "missing"));
  fs::remove_all(dir);
}

TEST(Sweep, JsonLines) {
  ComparisonRow r;
  r.model = "UP_RIGHT";
  r.params.p = 0.3;
  r.pass = true;
  const std::string line = to_json_lines({r});
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["model"], "UP_RIGHT");
  EXPECT_TRUE(j["alpha"].is_null());
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j.size(), 17u);
}

TEST(Scan, NeAlphaLeftVerdicts) {
  const auto grid = sweep_grid(0.0, 1.0, 0.01);
  const ScanReport low = scan_nonmonotone("NE_ALPHA_LEFT", Quantity::kV1, "alpha", grid, {0.4});
  EXPECT_TRUE(low.monotone);
  EXPECT_EQ(low.direction, 1);
  const ScanReport high = scan_nonmonotone("NE_ALPHA_LEFT", Quantity::kV1, "alpha", grid, {0.6});
  EXPECT_FALSE(high.monotone);
  const auto top = high.interior_max();
  ASSERT_TRUE(top.has_value());
  EXPECT_GT(top->value, 0.0);
  EXPECT_GT(top->location, 0.0);
  EXPECT_LT(top->location, 1.0);
}

TEST(Scan, ExtremaOfKnownSequence) {
  const ScanReport r = scan_values({0, 1, 2, 3, 4, 5}, {0, 2, 2, 1, 3, 3});
  ASSERT_EQ(r.extrema.size(), 2u);
  EXPECT_TRUE(r.extrema[0].is_max);
  EXPECT_EQ(r.extrema[0].location, 2.0);
  EXPECT_FALSE(r.extrema[1].is_max);
  EXPECT_EQ(r.extrema[1].location, 3.0);
  EXPECT_TRUE(scan_values({0, 1, 2}, {1, 1, 1}).monotone);
}

TEST(Scan, ThreeValuedWitness) {
  const auto hit = find_nonmonotone_alpha_beta();
  ASSERT_TRUE(hit.has_value());
  EXPECT_FALSE(hit->scan.monotone);
  EXPECT_FALSE(hit->scan.extrema.empty());
}

TEST(Scan, NeedsClosedForm) {
  EXPECT_THROW(scan_nonmonotone("SWE_LR", Quantity::kV1, "p", {0.1, 0.2}, {}), Unsupported);
}

TEST(OracleVerify, AllPass) {
  for (const CheckResult& c : oracle_verify()) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}

}  // namespace
}  // namespace rwdre
