// rwdre: speeds of random walks in 2-valued degenerate random environments.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rwdre/rwdre.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitInvalid = 2;

struct ParamFlags {
  double p = 0.5;
  std::optional<double> alpha, beta, q;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--p", p, "probability of the first atom");
    cmd->add_option("--alpha", alpha, "east weight of the NE_alpha site");
    cmd->add_option("--beta", beta, "east weight of the NE_beta site");
    cmd->add_option("--q", q, "mixing weight between NE_alpha and NE_beta");
  }

  rwdre::ModelParams params() const { return {p, alpha, beta, q}; }
};

void print_opt(const char* label, const std::optional<double>& v) {
  if (v) std::printf("%-14s %.12g\n", label, *v);
}

void print_row(const rwdre::ComparisonRow& r) {
  std::printf("%-14s %s\n", "model", r.model.c_str());
  print_opt("p", r.params.p);
  print_opt("alpha", r.params.alpha);
  print_opt("beta", r.params.beta);
  print_opt("q", r.params.q);
  if (r.v1_analytic) std::printf("%-14s (%.12g, %.12g)\n", "v analytic", *r.v1_analytic, *r.v2_analytic);
  print_opt("E[T] analytic", r.et_analytic);
  print_opt("E[T] oracle", r.et_oracle);
  if (r.v1_sim) {
    std::printf("%-14s (%.6g, %.6g) +- (%.2g, %.2g)\n", "v simulated", *r.v1_sim, *r.v2_sim, *r.se1, *r.se2);
    if (r.et_sim) std::printf("%-14s %.6g +- %.2g\n", "E[T] simulated", *r.et_sim, *r.et_sim_se);
    std::printf("%-14s %zu%s\n", r.from_renewal ? "cycles" : "replicas", *r.n_cycles,
                r.from_renewal ? "" : " (no renewal structure; independent trajectories)");
    std::printf("%-14s %llu\n", "seed", static_cast<unsigned long long>(*r.seed));
    if (r.timeouts > 0) std::printf("%-14s %zu\n", "timeouts", r.timeouts);
    if (r.heavy_tail_warning) std::printf("warning: more than 1%% of cycles hit max-steps; estimate is biased\n");
  }
  if (r.pass) std::printf("%-14s %s\n", "result", *r.pass ? "pass" : "FAIL (outside 3 se)");
}

int cmd_speed(const std::string& model_name, const ParamFlags& flags, const std::string& mode, std::size_t cycles,
              std::uint64_t seed, std::optional<std::int64_t> max_steps, unsigned threads, bool json) {
  const rwdre::ModelId model(model_name, flags.params());
  rwdre::SpeedRequest req;
  req.mode = rwdre::parse_speed_mode(mode);
  req.cycles = cycles;
  req.seed = seed;
  req.max_steps = max_steps;
  req.threads = threads;
  if (req.mode != rwdre::SpeedMode::kAnalytic && !rwdre::check_unstuck(rwdre::catalog(model))) {
    const rwdre::StuckReport rep = rwdre::detect_stuck(model, seed);
    std::fprintf(stderr, "%s is stuck: after %lld steps the walk keeps to %zu sites (%zu visited in total)\n",
                 model_name.c_str(), static_cast<long long>(rep.steps), rep.trapping_sites, rep.visited_sites);
    return kExitInvalid;
  }
  const rwdre::ComparisonRow row = rwdre::compute_speed(model, req);
  if (json) {
    std::cout << rwdre::to_json(row).dump() << "\n";
  } else {
    print_row(row);
  }
  return row.pass.value_or(true) ? kExitPass : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speeds of random walks in 2-valued degenerate random environments on Z^2"};
  app.require_subcommand(1);

  bool models_json = false;
  auto* models = app.add_subcommand("models", "list the model catalog");
  models->add_flag("--json", models_json, "one JSON object per model");

  std::string model_name, mode = "compare";
  ParamFlags flags;
  std::size_t cycles = 100000;
  std::uint64_t seed = rwdre::kDefaultSeed;
  std::optional<std::int64_t> max_steps;
  unsigned threads = 0;
  bool json = false;

  auto* speed = app.add_subcommand("speed", "analytic, simulated or compared velocity");
  speed->add_option("--model", model_name, "catalog model name")->required();
  flags.add_to(speed);
  speed->add_option("--mode", mode, "analytic | simulate | compare")
      ->check(CLI::IsMember({"analytic", "simulate", "compare"}));
  speed->add_option("--cycles", cycles, "renewal cycles to simulate");
  speed->add_option("--seed", seed, "master seed");
  speed->add_option("--max-steps", max_steps, "per-cycle step budget (default max(1e6, 100/p^2))");
  speed->add_option("--threads", threads, "worker threads (0: all cores)");
  speed->add_flag("--json", json, "print the row as JSON");

  rwdre::SweepSpec sweep_spec;
  ParamFlags sweep_flags;
  std::string out_path, format = "csv";
  auto* sweep = app.add_subcommand("sweep", "evaluate a model along a parameter grid");
  sweep->add_option("--model", sweep_spec.model, "catalog model name")->required();
  sweep->add_option("--param", sweep_spec.param, "swept parameter")->check(CLI::IsMember({"p", "alpha", "beta", "q"}));
  sweep->add_option("--from", sweep_spec.from)->required();
  sweep->add_option("--to", sweep_spec.to)->required();
  sweep->add_option("--step", sweep_spec.step)->required();
  sweep_flags.add_to(sweep);
  sweep->add_option("--cycles", sweep_spec.cycles, "renewal cycles per grid point (0: analytic only)");
  sweep->add_option("--seed", sweep_spec.seed, "master seed");
  sweep->add_option("--max-steps", sweep_spec.max_steps, "per-cycle step budget");
  sweep->add_option("--threads", sweep_spec.threads, "worker threads (0: all cores)");
  sweep->add_option("--out", out_path, "output file (stdout when omitted)");
  sweep->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string scan_model, quantity = "v1", scan_param = "alpha";
  double scan_from = 0.0, scan_to = 1.0, scan_step = 0.01;
  ParamFlags scan_flags;
  bool find_alpha_beta = false;
  auto* scan = app.add_subcommand("scan", "find local extrema of a closed-form curve");
  scan->add_option("--model", scan_model, "catalog model name");
  scan->add_option("--quantity", quantity, "v1 | v2 | ET | W")->check(CLI::IsMember({"v1", "v2", "ET", "W"}));
  scan->add_option("--param", scan_param)->check(CLI::IsMember({"p", "alpha", "beta", "q"}));
  scan->add_option("--from", scan_from);
  scan->add_option("--to", scan_to);
  scan->add_option("--step", scan_step);
  scan_flags.add_to(scan);
  scan->add_flag("--find-alpha-beta", find_alpha_beta,
                 "search (alpha, beta, p) for NE_ALPHA_BETA_LEFT with v1 non-monotone in q");

  auto* verify = app.add_subcommand("oracle-verify", "check every closed form against the brute-force oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitInvalid;
  }

  try {
    if (*models) {
      const auto rows = rwdre::list_models();
      if (models_json) {
        for (const auto& r : rows) {
          nlohmann::ordered_json j = {{"model", r.name},         {"params", r.arity},
                                      {"closed_form", r.closed_form}, {"renewal", r.renewal},
                                      {"status", r.unstuck ? "unstuck" : "stuck"}};
          std::cout << j.dump() << "\n";
        }
      } else {
        std::cout << rwdre::format_model_listing(rows);
      }
      return kExitPass;
    }
    if (*speed) return cmd_speed(model_name, flags, mode, cycles, seed, max_steps, threads, json);
    if (*sweep) {
      sweep_spec.fixed = sweep_flags.params();
      const auto rows = rwdre::run_sweep(sweep_spec);
      const std::string text = format == "json" ? rwdre::to_json_lines(rows) : rwdre::to_csv(rows);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        rwdre::write_file_atomic(out_path, text);
      }
      return kExitPass;
    }
    if (*scan) {
      if (find_alpha_beta) {
        const auto hit = rwdre::find_nonmonotone_alpha_beta();
        if (!hit) {
          std::printf("no non-monotone point on the grid\n");
          return kExitTolerance;
        }
        std::printf("NE_ALPHA_BETA_LEFT alpha=%.2f beta=%.2f p=%.2f, v1 against q:\n", hit->alpha, hit->beta, hit->p);
        std::cout << rwdre::format_scan(hit->scan);
        return kExitPass;
      }
      if (scan_model.empty()) throw rwdre::InvalidInput("scan needs --model");
      const auto grid = rwdre::sweep_grid(scan_from, scan_to, scan_step);
      const auto report = rwdre::scan_nonmonotone(scan_model, rwdre::parse_quantity(quantity), scan_param, grid,
                                                  scan_flags.params());
      std::cout << rwdre::format_scan(report);
      return kExitPass;
    }
    if (*verify) {
      const auto start = std::chrono::steady_clock::now();
      const auto checks = rwdre::oracle_verify();
      bool all = true;
      for (const auto& c : checks) {
        std::printf("%-4s %-48s %s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.detail.c_str());
        all = all && c.pass;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::printf("%zu checks in %.2f s\n", checks.size(), secs);
      if (!all) {
        for (const auto& c : checks) {
          if (!c.pass) {
            std::fprintf(stderr, "first failing check: %s\n", c.name.c_str());
            break;
          }
        }
        return kExitTolerance;
      }
      return kExitPass;
    }
  } catch (const rwdre::InvalidInput& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitInvalid;
  } catch (const rwdre::Unsupported& e) {
    std::fprintf(stderr, "unsupported: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitPass;
}
