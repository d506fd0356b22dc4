// mmimo: multi-cell massive MIMO pilot allocation / power control simulator.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "mmimo/asymptotics.hpp"
#include "mmimo/channel.hpp"
#include "mmimo/convergence.hpp"
#include "mmimo/metrics.hpp"
#include "mmimo/pilot_allocation.hpp"
#include "mmimo/power_control.hpp"
#include "mmimo/scenario.hpp"
#include "mmimo/table1.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mmimo;

namespace {

struct Common {
  int rf = 1;
  std::string criterion = "random";
  std::string pc = "off";
  double zeta_db = 0.0;
  std::size_t drops = kDeskScaleDrops;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string format = "csv";
  std::string config_path;
  unsigned threads = 0;
  bool paper_scale = false;
  bool interleave = false;
};

void add_common(CLI::App* app, Common& c, bool with_pa_pc) {
  app->add_option("--rf", c.rf, "frequency reuse factor")->check(CLI::IsMember({1, 3}));
  if (with_pa_pc) {
    app->add_option("--criterion", c.criterion, "pilot allocation criterion")
        ->check(CLI::IsMember({"random", "minber", "maxsinr", "minimaxber", "maxminsinr"}));
    app->add_option("--pc", c.pc, "power control")->check(CLI::IsMember({"off", "tpc", "opc"}));
    app->add_option("--zeta-db", c.zeta_db, "target downlink SINR (dB)");
    app->add_flag("--interleave", c.interleave, "re-run allocation after power control");
  }
  app->add_option("--drops", c.drops, "number of independent drops")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--format", c.format, "summary format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--config", c.config_path, "scenario file (key = value)")->check(CLI::ExistingFile);
  app->add_option("--threads", c.threads, "worker threads (0: all cores)");
  app->add_flag("--paper-scale", c.paper_scale, "use the full-scale trial count");
}

ScenarioConfig scenario_from(const Common& c, const CLI::App& app) {
  ScenarioConfig s = c.config_path.empty() ? ScenarioConfig{} : ScenarioConfig::load(c.config_path);
  if (c.config_path.empty() || app.count("--rf")) s.reuse_factor = c.rf;
  if (c.config_path.empty() || app.count("--seed")) s.seed = c.seed;
  s.validate();
  return s;
}

ExperimentConfig experiment_from(const Common& c, const CLI::App& app) {
  ExperimentConfig e;
  e.scenario = scenario_from(c, app);
  e.criterion = *parse_criterion(c.criterion);
  e.pc = *parse_pc_mode(c.pc);
  e.target_db = c.zeta_db;
  e.num_drops = c.paper_scale && !app.count("--drops") ? kPaperScaleDrops : c.drops;
  e.threads = c.threads;
  e.interleave_pa_pc = c.interleave;
  e.validate();
  return e;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", p.string()));
  return f;
}

json scenario_json(const ScenarioConfig& s) {
  return {{"reuse_factor", s.reuse_factor},
          {"radius_m", s.radius_m},
          {"K", s.users_per_cell},
          {"lambda", s.lambda},
          {"shadow_sigma_db", s.shadow_sigma_db},
          {"reference_distance_m", s.reference_distance_m},
          {"exclusion_radius_m", s.exclusion_radius_m},
          {"seed", s.seed}};
}

json experiment_json(const ExperimentConfig& e) {
  return {{"scenario", scenario_json(e.scenario)},
          {"frame",
           {{"bandwidth_hz", e.frame.bandwidth_hz},
            {"symbols_total", e.frame.symbols_total},
            {"symbols_downlink", e.frame.symbols_downlink},
            {"cp_fraction", e.frame.cp_fraction}}},
          {"criterion", to_string(e.criterion)},
          {"pc", to_string(e.pc)},
          {"zeta_db", e.target_db},
          {"pc_iterations", e.pc_iterations},
          {"num_drops", e.num_drops},
          {"gamma_db", e.gamma_db},
          {"phi_db", e.phi_db},
          {"phi_max_db", e.phi_max_db},
          {"sinr_cap_db", e.sinr_cap_db},
          {"max_rounds", e.max_rounds},
          {"report_cell", e.report_cell},
          {"interleave_pa_pc", e.interleave_pa_pc}};
}

void write_manifest(const fs::path& dir, const std::string& command, json config, const std::vector<std::string>& files,
                    double seconds) {
  json m{{"command", command}, {"config", std::move(config)}, {"outputs", files}, {"elapsed_s", seconds}};
  auto f = open_out(dir / "manifest.json");
  f << m.dump(2) << '\n';
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_run(const Common& c, const CLI::App& app, long trace_drop) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = experiment_from(c, app);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const auto s = run_experiment(cfg);

  std::vector<std::string> files;
  if (c.format == "json") {
    auto f = open_out(dir / "metrics.json");
    write_metrics_json(f, s);
    files.push_back("metrics.json");
  } else {
    auto f = open_out(dir / "metrics.csv");
    write_metrics_csv(f, s);
    files.push_back("metrics.csv");
  }
  for (auto [name, samples] : {std::pair{"cdf_ber.csv", &s.ber}, std::pair{"cdf_sinr_db.csv", &s.sinr_db},
                               std::pair{"cdf_rate_mbps.csv", &s.rate_mbps}}) {
    auto f = open_out(dir / name);
    write_cdf_csv(f, *samples);
    files.emplace_back(name);
  }

  if (trace_drop >= 0) {
    const auto layout = generate_layout(cfg.scenario.reuse_factor, cfg.scenario.radius_m);
    const auto idx = static_cast<std::size_t>(trace_drop);
    Rng geo = make_stream(cfg.scenario.seed, idx, 1);
    auto drop = drop_users(layout, cfg.scenario.users_per_cell, geo, cfg.scenario.exclusion_radius_m);
    const auto state = prepare_drop(cfg, layout, idx);
    const auto powers = cfg.initial_powers(layout.cells());
    auto game = best_response_rounds(cfg.criterion, state.beta, powers,
                                     PilotAssignment::identity(layout.cells(), cfg.scenario.users_per_cell),
                                     cfg.max_rounds);
    {
      auto f = open_out(dir / "drop.csv");
      write_drop_csv(f, drop);
      auto g = open_out(dir / "assignment.json");
      write_assignment_json(g, state.assignment);
      auto h = open_out(dir / "game_trace.csv");
      write_game_trace_csv(h, game.trace);
    }
    files.insert(files.end(), {"drop.csv", "assignment.json", "game_trace.csv"});
    if (cfg.pc != PcMode::Off) {
      const auto pc = run_power_control(cfg.pc_config(), state.beta, powers, state.assignment);
      auto f = open_out(dir / "power_trace.csv");
      write_power_trace_csv(f, pc.trace);
      files.emplace_back("power_trace.csv");
    }
  }

  fmt::print("drops {}  mean BER {:.2f}%  BER=0 {:.2f}%  BER>=0.1 {:.2f}%  mean rate {:.2f} Mbps  "
             "95%-likely {:.4f} Mbps\n",
             s.num_drops, s.mean_ber_pct, s.frac_ber_zero_pct, s.frac_ber_ge_0_1_pct, s.mean_rate_mbps,
             s.p5_rate_mbps);
  auto cj = experiment_json(cfg);
  cj["trace_drop"] = trace_drop;
  write_manifest(dir, "run", cj, files, since(t0));
  return 0;
}

int cmd_table1(const Common& c, const CLI::App& app) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t drops = c.paper_scale && !app.count("--drops") ? kPaperScaleDrops : c.drops;
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const auto rows = run_table1(drops, c.seed, c.threads);
  write_table1_text(std::cout, rows);
  {
    auto f = open_out(dir / "table1.csv");
    write_table1_csv(f, rows);
  }
  json cfg = json::array();
  for (const auto& r : rows) cfg.push_back(experiment_json(table1_config(r.spec, drops, c.seed, c.threads)));
  write_manifest(dir, "table1", cfg, {"table1.csv"}, since(t0));
  return 0;
}

int cmd_sweep(const Common& c, const CLI::App& app, double lo, double hi, double step) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = experiment_from(c, app);
  if (cfg.pc == PcMode::Off) cfg.pc = PcMode::Opc;
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("sweep grid needs step > 0 and max >= min");
  std::vector<double> grid;
  for (double z = lo; z <= hi + 1e-9; z += step) grid.push_back(z);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const auto ensemble = build_ensemble(cfg);
  const auto res = sweep_target(grid, ensemble, cfg.initial_powers(generate_layout(cfg.scenario.reuse_factor, cfg.scenario.radius_m).cells()),
                                cfg.pc_config(), cfg.frame, cfg.scenario.reuse_factor, cfg.report_cell, cfg.sinr_cap_db);
  {
    auto f = open_out(dir / "sweep.csv");
    write_sweep_csv(f, res);
  }
  fmt::print("best target {:g} dB\n", res.best_target_db);
  auto cj = experiment_json(cfg);
  cj["grid_db"] = grid;
  cj["best_zeta_db"] = res.best_target_db;
  write_manifest(dir, "sweep-target", cj, {"sweep.csv"}, since(t0));
  return 0;
}

int cmd_convergence(const Common& c, const CLI::App& app, std::vector<std::size_t> antennas, std::size_t frames,
                    std::size_t symbols) {
  const auto t0 = std::chrono::steady_clock::now();
  ConvergenceConfig cfg;
  cfg.scenario = scenario_from(c, app);
  if (c.paper_scale && !app.count("--antennas")) antennas.push_back(16384);
  cfg.antenna_counts = antennas;
  cfg.num_drops = app.count("--drops") ? c.drops : 200;
  cfg.frames = frames;
  cfg.symbols_per_frame = symbols;
  cfg.threads = c.threads;
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const auto rep = run_convergence(cfg);
  {
    auto f = open_out(dir / "convergence.csv");
    write_convergence_csv(f, rep);
  }
  write_convergence_csv(std::cout, rep);
  json cj{{"scenario", scenario_json(cfg.scenario)}, {"antennas", cfg.antenna_counts}, {"num_drops", cfg.num_drops},
          {"frames", cfg.frames}, {"symbols_per_frame", cfg.symbols_per_frame}, {"gamma_db", cfg.gamma_db},
          {"phi_db", cfg.phi_db}};
  write_manifest(dir, "convergence", cj, {"convergence.csv"}, since(t0));
  return 0;
}

int cmd_layout(const Common& c, const CLI::App& app, std::size_t csi_antennas) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = scenario_from(c, app);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const auto layout = generate_layout(s.reuse_factor, s.radius_m);
  Rng geo = make_stream(s.seed, 0, 1);
  Rng fade = make_stream(s.seed, 0, 2);
  const auto drop = drop_users(layout, s.users_per_cell, geo, s.exclusion_radius_m);
  std::vector<std::string> files{"layout.csv", "drop.csv"};
  {
    auto f = open_out(dir / "layout.csv");
    write_layout_csv(f, layout);
    auto g = open_out(dir / "drop.csv");
    write_drop_csv(g, drop);
  }
  if (csi_antennas > 0) {
    const auto beta = compute_beta(layout, drop, s.path_loss(), fade);
    const auto powers = PowerProfile::uniform(layout.cells(), s.users_per_cell, 10.0, 10.0, 10.0);
    Rng link = make_stream(s.seed, 0, 3);
    const auto chan = draw_channel(beta, csi_antennas, link);
    const auto csi = simulate_training(make_pilot_book(s.users_per_cell), chan, powers, link);
    std::ofstream f(dir / "csi.bin", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write csi.bin");
    write_csi_binary(f, csi);
    files.emplace_back("csi.bin");
  }
  json cj{{"scenario", scenario_json(s)}, {"csi_antennas", csi_antennas}};
  write_manifest(dir, "layout", cj, files, since(t0));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cell massive MIMO downlink: pilot allocation, power control and asymptotic metrics"};
  app.require_subcommand(1);

  Common run_opts, table_opts, sweep_opts, conv_opts, layout_opts;
  long trace_drop = -1;
  auto* run = app.add_subcommand("run", "one experiment");
  add_common(run, run_opts, true);
  run->add_option("--trace-drop", trace_drop, "also dump assignment, game and power traces for this drop");

  auto* table = app.add_subcommand("table1", "all eight pilot allocation / power control rows");
  add_common(table, table_opts, false);

  double lo = -10.0, hi = 40.0, step = 1.0;
  auto* sweep = app.add_subcommand("sweep-target", "grid search of the target SINR");
  add_common(sweep, sweep_opts, true);
  sweep_opts.criterion = "maxminsinr";
  sweep_opts.pc = "opc";
  sweep_opts.drops = 1000;
  sweep->add_option("--min-db", lo);
  sweep->add_option("--max-db", hi);
  sweep->add_option("--step-db", step);

  std::vector<std::size_t> antennas{64, 256, 1024, 4096};
  std::size_t frames = 8, symbols = 128;
  auto* conv = app.add_subcommand("convergence", "finite-N MF / ZF against the large-N limit");
  add_common(conv, conv_opts, false);
  conv->add_option("--antennas", antennas);
  conv->add_option("--frames", frames);
  conv->add_option("--symbols", symbols);

  std::size_t csi_antennas = 0;
  auto* lay = app.add_subcommand("layout", "cell layout and one user drop");
  add_common(lay, layout_opts, false);
  lay->add_option("--csi-antennas", csi_antennas, "also dump one CSI estimate with this many antennas");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_opts, *run, trace_drop);
    if (*table) return cmd_table1(table_opts, *table);
    if (*sweep) return cmd_sweep(sweep_opts, *sweep, lo, hi, step);
    if (*conv) return cmd_convergence(conv_opts, *conv, antennas, frames, symbols);
    if (*lay) return cmd_layout(layout_opts, *lay, csi_antennas);
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
