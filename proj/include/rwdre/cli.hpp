#pragma once

// Library side of the rwdre command-line tool: catalog listing, analytic /
// simulated / compared speeds, parameter sweeps with CSV and JSON output,
// non-monotonicity scans and the oracle self-check.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwdre/analytic_speeds.hpp"
#include "rwdre/env_model.hpp"
#include "rwdre/error.hpp"
#include "rwdre/lattice_sim.hpp"
#include "rwdre/oracle.hpp"
#include "rwdre/series.hpp"

namespace rwdre {

// ---------------------------------------------------------------------------
// Catalog listing

struct ModelListing {
  std::string name;
  int arity = 1;            // number of model parameters
  std::string closed_form;  // "closed form", "symmetry", "no closed form"
  std::string renewal;      // "N", "S", "E", "W", "anchor E", or "none"
  bool unstuck = true;
};

inline std::string closed_form_label(ClosedForm c) {
  switch (c) {
    case ClosedForm::kExact:
      return "closed form";
    case ClosedForm::kSymmetry:
      return "symmetry";
    case ClosedForm::kNone:
      return "no closed form";
  }
  return "";
}

// Any parameter values give the same arrow sets, so structure is read off
// a representative point.
inline ModelId representative(ModelKind kind) {
  ModelParams params;
  params.p = 0.5;
  params.alpha = 0.5;
  params.beta = 0.5;
  params.q = 0.5;
  return ModelId(kind, params);
}

inline std::vector<ModelListing> list_models() {
  std::vector<ModelListing> out;
  for (const ModelSpec& spec : kModelSpecs) {
    const EnvironmentLaw law = catalog(representative(spec.kind));
    ModelListing row;
    row.name = std::string(spec.name);
    row.arity = 1 + (spec.uses_alpha ? 1 : 0) + (spec.uses_beta_q ? 2 : 0);
    row.closed_form = closed_form_label(spec.closed_form);
    row.unstuck = check_unstuck(law);
    if (!row.unstuck) {
      row.renewal = "none";
    } else if (const auto scheme = renewal_scheme(law)) {
      const std::string letter(1, direction_letter(scheme->direction));
      row.renewal = scheme->kind == RenewalScheme::Kind::kDirection ? letter : "anchor " + letter;
    } else {
      row.renewal = "none";
    }
    out.push_back(row);
  }
  return out;
}

inline std::string format_model_listing(const std::vector<ModelListing>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %-6s %-15s %-9s %s\n", "model", "params", "closed_form", "renewal", "status");
  os << line;
  for (const ModelListing& r : rows) {
    std::snprintf(line, sizeof line, "%-20s %-6d %-15s %-9s %s\n", r.name.c_str(), r.arity, r.closed_form.c_str(),
                  r.renewal.c_str(), r.unstuck ? "unstuck" : "stuck");
    os << line;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Comparison rows

struct ComparisonRow {
  std::string model;
  ModelParams params;
  std::string param_swept;
  std::optional<double> param_value;
  std::optional<double> v1_analytic, v2_analytic, et_analytic;
  std::optional<double> v1_sim, v2_sim, se1, se2;
  std::optional<std::size_t> n_cycles;
  std::optional<std::uint64_t> seed;
  std::optional<bool> pass;

  // Reported in text output only.
  std::optional<double> et_oracle, et_sim, et_sim_se;
  std::size_t timeouts = 0;
  bool heavy_tail_warning = false;
  bool from_renewal = true;
};

inline bool within_three_se(double estimate, double se, double exact) {
  return std::abs(estimate - exact) <= 3.0 * se;
}

// Independent trajectories stand in for renewal cycles when the law has
// none; each replica runs this many steps.
inline constexpr std::int64_t kTrajectorySteps = 1000;

// Simulated velocity of any unstuck catalog model.
inline SpeedEstimate simulate(const ModelId& model, std::size_t cycles, std::uint64_t seed,
                              std::optional<std::int64_t> max_steps = std::nullopt, unsigned threads = 0) {
  const EnvironmentLaw law = catalog(model);
  if (!check_unstuck(law)) throw Unsupported(std::string(model.name()) + " is stuck on finitely many sites");
  if (renewal_scheme(law)) return estimate_speed(model, cycles, seed, max_steps, threads);
  return estimate_speed_trajectories(law, std::max<std::size_t>(2, cycles / 10), kTrajectorySteps, seed, threads);
}

inline bool oracle_supported(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLrUp:
    case ModelKind::kLrRight:
    case ModelKind::kNeLr:
    case ModelKind::kNeLeft:
    case ModelKind::kSweDown:
    case ModelKind::kSweRight:
    case ModelKind::kSweSw:
    case ModelKind::kNeAlphaLeft:
      return true;
    default:
      return false;
  }
}

inline void fill_analytic(ComparisonRow& row, const ModelId& model) {
  switch (model_spec(model.kind()).closed_form) {
    case ClosedForm::kExact: {
      const SpeedResult r = speed(model);
      row.v1_analytic = r.velocity.x;
      row.v2_analytic = r.velocity.y;
      row.et_analytic = r.expected_time;
      break;
    }
    case ClosedForm::kSymmetry:
      row.v1_analytic = 0.0;
      row.v2_analytic = 0.0;
      break;
    case ClosedForm::kNone:
      break;
  }
}

inline void fill_simulated(ComparisonRow& row, const SpeedEstimate& est) {
  row.v1_sim = est.velocity.x;
  row.v2_sim = est.velocity.y;
  row.se1 = est.standard_error.x;
  row.se2 = est.standard_error.y;
  row.n_cycles = est.n_cycles;
  row.seed = est.seed;
  row.timeouts = est.timeouts;
  row.heavy_tail_warning = est.heavy_tail_warning;
  row.from_renewal = est.from_renewal;
  if (est.from_renewal) {
    row.et_sim = est.mean_duration;
    row.et_sim_se = est.duration_se;
  }
  if (row.v1_analytic && row.v2_analytic) {
    row.pass = within_three_se(*row.v1_sim, *row.se1, *row.v1_analytic) &&
               within_three_se(*row.v2_sim, *row.se2, *row.v2_analytic);
  }
}

enum class SpeedMode { kAnalytic, kSimulate, kCompare };

inline SpeedMode parse_speed_mode(const std::string& s) {
  if (s == "analytic") return SpeedMode::kAnalytic;
  if (s == "simulate") return SpeedMode::kSimulate;
  if (s == "compare") return SpeedMode::kCompare;
  throw InvalidInput("unknown mode: " + s);
}

struct SpeedRequest {
  SpeedMode mode = SpeedMode::kCompare;
  std::size_t cycles = 100000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::int64_t> max_steps;
  unsigned threads = 0;
};

// Throws Unsupported when the mode cannot be served (no closed form in
// analytic/compare mode, stuck model in simulate/compare mode).
inline ComparisonRow compute_speed(const ModelId& model, const SpeedRequest& req) {
  ComparisonRow row;
  row.model = std::string(model.name());
  row.params = model.params();
  const ClosedForm cf = model_spec(model.kind()).closed_form;
  if (req.mode != SpeedMode::kSimulate) {
    if (cf == ClosedForm::kNone) throw Unsupported(row.model + " has no closed form");
    fill_analytic(row, model);
    if (oracle_supported(model.kind())) row.et_oracle = exact_ET_by_env_enumeration(model).value;
  }
  if (req.mode != SpeedMode::kAnalytic) {
    fill_simulated(row, simulate(model, req.cycles, req.seed, req.max_steps, req.threads));
  }
  if (req.mode == SpeedMode::kSimulate) row.pass.reset();
  return row;
}

// ---------------------------------------------------------------------------
// CSV / JSON

inline constexpr const char* kCsvHeader =
    "model,p,alpha,beta,q,param_swept,param_value,v1_analytic,v2_analytic,ET_analytic,v1_sim,v2_sim,se1,se2,"
    "n_cycles,seed,pass";

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace detail

inline std::string csv_row(const ComparisonRow& r) {
  using detail::csv_field;
  std::string out = r.model;
  for (const std::string& f :
       {csv_field(r.params.p), csv_field(r.params.alpha), csv_field(r.params.beta), csv_field(r.params.q)}) {
    out += "," + f;
  }
  out += "," + r.param_swept + "," + csv_field(r.param_value);
  for (const auto& v : {r.v1_analytic, r.v2_analytic, r.et_analytic, r.v1_sim, r.v2_sim, r.se1, r.se2}) {
    out += "," + csv_field(v);
  }
  out += "," + (r.n_cycles ? std::to_string(*r.n_cycles) : std::string());
  out += "," + (r.seed ? std::to_string(*r.seed) : std::string());
  out += "," + (r.pass ? std::string(*r.pass ? "true" : "false") : std::string());
  return out;
}

inline std::string to_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const ComparisonRow& r : rows) out += csv_row(r) + "\n";
  return out;
}

inline nlohmann::ordered_json to_json(const ComparisonRow& r) {
  auto opt = [](const auto& v) -> nlohmann::ordered_json {
    if (v) return *v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["p"] = r.params.p;
  j["alpha"] = opt(r.params.alpha);
  j["beta"] = opt(r.params.beta);
  j["q"] = opt(r.params.q);
  j["param_swept"] = r.param_swept.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.param_swept);
  j["param_value"] = opt(r.param_value);
  j["v1_analytic"] = opt(r.v1_analytic);
  j["v2_analytic"] = opt(r.v2_analytic);
  j["ET_analytic"] = opt(r.et_analytic);
  j["v1_sim"] = opt(r.v1_sim);
  j["v2_sim"] = opt(r.v2_sim);
  j["se1"] = opt(r.se1);
  j["se2"] = opt(r.se2);
  j["n_cycles"] = opt(r.n_cycles);
  j["seed"] = opt(r.seed);
  j["pass"] = opt(r.pass);
  return j;
}

// One JSON object per line.
inline std::string to_json_lines(const std::vector<ComparisonRow>& rows) {
  std::string out;
  for (const ComparisonRow& r : rows) out += to_json(r).dump() + "\n";
  return out;
}

// Writes to a sibling temporary file and renames it over `path`, so a
// failed run never leaves a partial file behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  std::string model;
  std::string param = "p";  // p, alpha, beta or q
  double from = 0.0;
  double to = 1.0;
  double step = 0.01;
  ModelParams fixed;
  std::size_t cycles = 0;  // 0: analytic only
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::int64_t> max_steps;
  unsigned threads = 0;
};

inline constexpr std::size_t kMaxGridPoints = 10000;

// Grid from, from + step, ..., ending exactly at `to`.
inline std::vector<double> sweep_grid(double from, double to, double step) {
  if (!(from < to)) throw InvalidInput("sweep: from must be below to");
  if (!(step > 0.0)) throw InvalidInput("sweep: step must be positive");
  const double span = (to - from) / step;
  const auto intervals = static_cast<std::size_t>(std::ceil(span - 1e-9));
  if (intervals + 1 > kMaxGridPoints) throw InvalidInput("sweep: grid exceeds 10^4 points");
  std::vector<double> grid;
  for (std::size_t i = 0; i < intervals; ++i) grid.push_back(from + static_cast<double>(i) * step);
  grid.push_back(to);
  return grid;
}

inline void set_param(ModelParams& params, const std::string& name, double value) {
  if (name == "p") {
    params.p = value;
  } else if (name == "alpha") {
    params.alpha = value;
  } else if (name == "beta") {
    params.beta = value;
  } else if (name == "q") {
    params.q = value;
  } else {
    throw InvalidInput("unknown sweep parameter: " + name);
  }
}

// Closed-form quantities at a parameter point, including the endpoints 0
// and 1 where a closed-range expression exists.
struct CurvePoint {
  std::optional<double> v1, v2, et, w;
};

inline CurvePoint evaluate_curve(ModelKind kind, const ModelParams& params) {
  CurvePoint pt;
  try {
    const ModelId model(kind, params);
    if (model_spec(kind).closed_form == ClosedForm::kSymmetry) {
      pt.v1 = 0.0;
      pt.v2 = 0.0;
      return pt;
    }
    if (!has_closed_form(kind)) return pt;
    const SpeedResult r = speed(model);
    pt.v1 = r.velocity.x;
    pt.v2 = r.velocity.y;
    pt.et = r.expected_time;
    pt.w = r.w;
    return pt;
  } catch (const InvalidInput&) {
  }
  auto in_closed = [](std::optional<double> v) { return v && *v >= 0.0 && *v <= 1.0; };
  auto in_open = [](std::optional<double> v) { return v && *v > 0.0 && *v < 1.0; };
  if (kind == ModelKind::kNeNw && in_closed(params.p)) {
    pt.v1 = ne_nw_v1(params.p);
    pt.v2 = 0.5;
    pt.et = 2.0;
  } else if (kind == ModelKind::kNeAlphaLeft && in_open(params.p) && in_closed(params.alpha)) {
    const double al = *params.alpha, p = params.p;
    pt.w = ne_alpha_left_w(al, p);
    pt.v1 = ne_alpha_left_v1(al, p);
    pt.v2 = (1.0 - al) / *pt.w;
    if (al < 1.0) pt.et = *pt.w / (1.0 - al);
  }
  return pt;
}

inline std::vector<ComparisonRow> run_sweep(const SweepSpec& spec) {
  const ModelKind kind = parse_model_name(spec.model);
  const std::vector<double> grid = sweep_grid(spec.from, spec.to, spec.step);
  std::vector<ComparisonRow> rows(grid.size());
  // Grid points run in parallel; each simulation is single-threaded and rows
  // land in grid order.
  detail::parallel_for(grid.size(), spec.threads, [&](std::size_t i) {
    ComparisonRow& row = rows[i];
    row.model = spec.model;
    row.params = spec.fixed;
    set_param(row.params, spec.param, grid[i]);
    row.param_swept = spec.param;
    row.param_value = grid[i];
    const CurvePoint pt = evaluate_curve(kind, row.params);
    row.v1_analytic = pt.v1;
    row.v2_analytic = pt.v2;
    row.et_analytic = pt.et;
    if (spec.cycles == 0) return;
    try {
      const ModelId model(kind, row.params);
      fill_simulated(row, simulate(model, spec.cycles, spec.seed, spec.max_steps, 1));
    } catch (const InvalidInput&) {
      // endpoint outside the open parameter range: analytic values only
    }
  });
  // Canonicalise the parameters actually used by the model.
  const ModelSpec& ms = model_spec(kind);
  for (ComparisonRow& row : rows) {
    if (!ms.uses_alpha) row.params.alpha.reset();
    if (!ms.uses_beta_q) {
      row.params.beta.reset();
      row.params.q.reset();
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Non-monotonicity scans

enum class Quantity { kV1, kV2, kET, kW };

inline Quantity parse_quantity(const std::string& s) {
  if (s == "v1") return Quantity::kV1;
  if (s == "v2") return Quantity::kV2;
  if (s == "ET") return Quantity::kET;
  if (s == "W") return Quantity::kW;
  throw InvalidInput("unknown quantity: " + s);
}

inline std::optional<double> pick(const CurvePoint& pt, Quantity q) {
  switch (q) {
    case Quantity::kV1:
      return pt.v1;
    case Quantity::kV2:
      return pt.v2;
    case Quantity::kET:
      return pt.et;
    case Quantity::kW:
      return pt.w;
  }
  return std::nullopt;
}

struct Extremum {
  bool is_max = true;
  double location = 0.0;
  double value = 0.0;
};

struct ScanReport {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<Extremum> extrema;  // interior local extrema, in grid order
  bool monotone = true;
  int direction = 0;  // +1 nondecreasing, -1 nonincreasing, 0 constant or mixed

  std::optional<Extremum> interior_max() const {
    std::optional<Extremum> best;
    for (const Extremum& e : extrema) {
      if (e.is_max && (!best || e.value > best->value)) best = e;
    }
    return best;
  }
};

// Differences within this relative size count as flat.
inline constexpr double kFlatTolerance = 1e-13;

inline ScanReport scan_values(std::vector<double> grid, std::vector<double> values) {
  ScanReport report;
  report.grid = std::move(grid);
  report.values = std::move(values);
  const auto& v = report.values;
  int last_sign = 0;
  bool saw_up = false, saw_down = false;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = v[i] - v[i - 1];
    const double scale = std::max({1.0, std::abs(v[i]), std::abs(v[i - 1])});
    const int sign = std::abs(d) <= kFlatTolerance * scale ? 0 : (d > 0 ? 1 : -1);
    if (sign == 0) continue;
    (sign > 0 ? saw_up : saw_down) = true;
    if (last_sign != 0 && sign != last_sign) {
      // The extremum sits at the last point of the previous run.
      const std::size_t at = i - 1;
      report.extrema.push_back({last_sign > 0, report.grid[at], v[at]});
    }
    last_sign = sign;
  }
  report.monotone = !(saw_up && saw_down);
  report.direction = report.monotone ? (saw_up ? 1 : (saw_down ? -1 : 0)) : 0;
  return report;
}

// Evaluates `quantity` of a closed-form model along `param` and reports its
// local extrema. Grid points without a value are skipped.
inline ScanReport scan_nonmonotone(const std::string& model, Quantity quantity, const std::string& param,
                                   const std::vector<double>& grid, const ModelParams& fixed) {
  const ModelKind kind = parse_model_name(model);
  if (!has_closed_form(kind)) throw Unsupported(model + " has no closed form");
  std::vector<double> xs, ys;
  for (double x : grid) {
    ModelParams params = fixed;
    set_param(params, param, x);
    if (const auto y = pick(evaluate_curve(kind, params), quantity)) {
      xs.push_back(x);
      ys.push_back(*y);
    }
  }
  if (xs.size() < 2) throw InvalidInput("scan: fewer than two grid points have a value");
  return scan_values(std::move(xs), std::move(ys));
}

inline std::string format_scan(const ScanReport& r) {
  std::ostringstream os;
  char line[160];
  for (const Extremum& e : r.extrema) {
    std::snprintf(line, sizeof line, "local %s at %.6g: %.17g\n", e.is_max ? "max" : "min", e.location, e.value);
    os << line;
  }
  if (r.monotone) {
    os << "verdict: monotone " << (r.direction > 0 ? "nondecreasing" : r.direction < 0 ? "nonincreasing" : "constant")
       << "\n";
  } else {
    os << "verdict: non-monotone (" << r.extrema.size() << " interior extrema)\n";
  }
  return os.str();
}

// Grid search over (alpha, beta, p) for a point where v1 of
// NE_ALPHA_BETA_LEFT is not monotone in q. Returns the first hit in
// lexicographic grid order.
struct AlphaBetaWitness {
  double alpha = 0.0, beta = 0.0, p = 0.0;
  ScanReport scan;
};

inline std::optional<AlphaBetaWitness> find_nonmonotone_alpha_beta(double grid_step = 0.05, double q_step = 0.01) {
  const std::vector<double> outer = sweep_grid(grid_step, 1.0 - grid_step, grid_step);
  const std::vector<double> qs = sweep_grid(q_step, 1.0 - q_step, q_step);
  for (double al : outer) {
    for (double be : outer) {
      for (double p : outer) {
        ModelParams fixed;
        fixed.p = p;
        fixed.alpha = al;
        fixed.beta = be;
        fixed.q = 0.5;
        ScanReport scan = scan_nonmonotone("NE_ALPHA_BETA_LEFT", Quantity::kV1, "q", qs, fixed);
        if (!scan.monotone) return AlphaBetaWitness{al, be, p, std::move(scan)};
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Oracle self-check

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline double gamma_pow(double k) { return std::pow(GoldenConstants::gamma, k); }

inline CheckResult check_max_error(std::string name, double worst, double tol) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "max error %.3g (tol %.1g)", worst, tol);
  return {std::move(name), worst <= tol, buf};
}

}  // namespace detail

// Maximum deviation of the tridiagonal solves from the closed-form
// solutions, over n = 1..max_n and all sites. One entry per closed form.
inline std::vector<std::pair<std::string, double>> bvp_closed_form_errors(int max_n = 50) {
  using detail::gamma_pow;
  std::vector<std::pair<std::string, double>> out = {
      {"f=(n-k)(k+1)", 0.0}, {"g=(k+1)/(n+1)", 0.0}, {"f, s=1/3, absorb 1 at both ends", 0.0},
      {"g, s=1/3, reflect at 0", 0.0}, {"g, s=1/3, reflect w.p. 1/2 at 0", 0.0}};
  for (int n = 1; n <= max_n; ++n) {
    const double nd = n;
    BvpSpec half;
    half.n = n;
    half.s = 0.5;
    half.left = BvpSpec::Left::reflect_prob(0.5);
    const BvpSolution f0 = solve_exit_time(half), g0 = solve_exit_prob(half);
    BvpSpec absorb;
    absorb.n = n;
    absorb.s = 1.0 / 3.0;
    absorb.left = BvpSpec::Left::absorb(1.0);
    absorb.right_value = 1.0;
    const BvpSolution f1 = solve_exit_time(absorb);
    BvpSpec refl = absorb;
    refl.left = BvpSpec::Left::reflect();
    const BvpSolution g1 = solve_exit_prob(refl);
    BvpSpec half_refl = absorb;
    half_refl.left = BvpSpec::Left::reflect_prob(0.5);
    const BvpSolution g2 = solve_exit_prob(half_refl);
    const double g = GoldenConstants::gamma;
    for (int k = 0; k <= n; ++k) {
      const double kd = k;
      const auto ku = static_cast<std::size_t>(k);
      const double ref[5] = {
          (nd - kd) * (kd + 1.0),
          (kd + 1.0) / (nd + 1.0),
          3.0 - 2.0 * (gamma_pow(kd) + gamma_pow(nd - kd)) / (gamma_pow(nd) + 1.0),
          (gamma_pow(nd - kd) + gamma_pow(nd + kd - 1.0)) / (gamma_pow(2.0 * nd - 1.0) + 1.0),
          (gamma_pow(nd - kd) * (2.0 - g) + gamma_pow(nd + kd - 1.0) * (1.0 - 2.0 * g)) /
              (gamma_pow(2.0 * nd - 1.0) * (1.0 - 2.0 * g) - g + 2.0)};
      const double got[5] = {f0.values[ku], g0.values[ku], f1.values[ku], g1.values[ku], g2.values[ku]};
      // The s=1/3 absorbing form describes interior sites only.
      for (int i = 0; i < 5; ++i) {
        if (i == 2 && (k == 0 || k == n)) continue;
        out[static_cast<std::size_t>(i)].second =
            std::max(out[static_cast<std::size_t>(i)].second, std::abs(got[i] - ref[i]));
      }
    }
  }
  return out;
}

// Theta(z) - (Q(gamma; sqrt z) - Q(gamma^2; z)) / (2 sqrt z).
inline double theta_q_identity_residual(double z) {
  constexpr double g = GoldenConstants::gamma;
  const double rz = std::sqrt(z);
  return theta(z) - (q_hyper_Q(g, rz) - q_hyper_Q(g * g, z)) / (2.0 * rz);
}

inline std::vector<CheckResult> oracle_verify() {
  std::vector<CheckResult> out;
  const std::vector<double> ps = {0.1, 0.3, 0.5, 0.7, 0.9};

  for (const auto& [name, err] : bvp_closed_form_errors(50)) {
    out.push_back(detail::check_max_error("bvp closed form " + name, err, 1e-10));
  }

  double worst = 0.0;
  for (double z : {0.01, 0.1, 0.25, 0.5, 0.9}) worst = std::max(worst, std::abs(theta_q_identity_residual(z)));
  out.push_back(detail::check_max_error("theta-Q identity", worst, 1e-12));

  for (ModelKind kind : {ModelKind::kLrUp, ModelKind::kLrRight, ModelKind::kNeLr, ModelKind::kNeLeft,
                         ModelKind::kSweDown, ModelKind::kSweRight, ModelKind::kSweSw, ModelKind::kNeAlphaLeft}) {
    worst = 0.0;
    for (double p : ps) {
      ModelParams params;
      params.p = p;
      params.alpha = 0.7;
      const ModelId model(kind, params);
      worst = std::max(worst, std::abs(exact_ET_by_env_enumeration(model).value - speed(model).expected_time));
    }
    out.push_back(detail::check_max_error("enumerated E[T] " + std::string(model_name(kind)), worst, 1e-8));
  }

  worst = 0.0;
  for (double p : ps) {
    ModelParams params;
    params.p = p;
    const RenewalFactorValues f = renewal_factors(ModelId(ModelKind::kNeLr, params)).factors;
    worst = std::max({worst, std::abs(f.es0 - 1.0 / (p * p)), std::abs(f.p_a0 - 0.5), std::abs(f.es1_given_a0 - 1.0 / p)});
  }
  out.push_back(detail::check_max_error("NE_LR renewal factors", worst, 1e-10));

  for (ModelKind kind : {ModelKind::kNeLr, ModelKind::kSweRight, ModelKind::kSweSw}) {
    worst = 0.0;
    for (double p : ps) {
      ModelParams params;
      params.p = p;
      const ModelId model(kind, params);
      const RenewalFactorValues a = *speed(model).factors;
      const RenewalFactorValues e = renewal_factors(model).factors;
      worst = std::max({worst, std::abs(a.es0 - e.es0), std::abs(a.es1_given_a0 - e.es1_given_a0),
                        std::abs(a.p_a0 - e.p_a0), std::abs(a.p_a1_given_a0 - e.p_a1_given_a0)});
    }
    out.push_back(detail::check_max_error("renewal factors " + std::string(model_name(kind)), worst, 1e-8));
  }

  for (ModelKind kind : {ModelKind::kNeLeft, ModelKind::kSweRight, ModelKind::kSweSw, ModelKind::kNeAlphaLeft}) {
    worst = 0.0;
    for (double p : {0.2, 0.5, 0.8}) {
      ModelParams params;
      params.p = p;
      params.alpha = 0.7;
      worst = std::max(worst, martingale_check(ModelId(kind, params)).max_abs());
    }
    out.push_back(detail::check_max_error("martingale bookkeeping " + std::string(model_name(kind)), worst, 1e-10));
  }

  constexpr double kSlope = (5.0 + GoldenConstants::kSqrt5) / 2.0;
  out.push_back(detail::check_max_error("first-order coefficient", std::abs(first_order_coefficient() - kSlope), 1e-8));
  {
    const std::vector<double> f = first_order_profile(64);
    const double b = 2.0 / (GoldenConstants::kSqrt5 - 1.0) * GoldenConstants::gamma_bar;
    out.push_back(detail::check_max_error("first-order profile f_1 - 3 = B gamma_bar", std::abs(f[65] - 3.0 - b), 1e-10));
  }
  for (double q : {0.01, 0.02}) {
    const double slope = feynman_kac_slope(q, 24);
    char buf[96];
    std::snprintf(buf, sizeof buf, "slope %.6g vs %.6g (5%% band)", slope, kSlope);
    out.push_back({"Feynman-Kac slope at q=" + format_number(q), std::abs(slope / kSlope - 1.0) <= 0.05, buf});
  }
  return out;
}

}  // namespace rwdre
