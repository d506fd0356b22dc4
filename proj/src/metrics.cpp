#include "mmimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "mmimo/asymptotics.hpp"
#include "mmimo/errors.hpp"
#include "mmimo/parallel.hpp"
#include "mmimo/rng.hpp"

namespace mmimo {

namespace {

constexpr std::uint64_t kGeometryStream = 1;
constexpr std::uint64_t kFadingStream = 2;

}  // namespace

std::string_view to_string(PcMode m) {
  switch (m) {
    case PcMode::Off:
      return "off";
    case PcMode::Tpc:
      return "tpc";
    case PcMode::Opc:
      return "opc";
  }
  return "unknown";
}

std::optional<PcMode> parse_pc_mode(std::string_view name) {
  for (auto m : {PcMode::Off, PcMode::Tpc, PcMode::Opc}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  frame.validate();
  if (num_drops < 1) throw DomainError("need at least one drop");
  if (pc_iterations < 1) throw DomainError("power control needs at least one iteration");
  if (max_rounds < 1) throw DomainError("need max_rounds >= 1");
  if (report_cell >= 7) throw DomainError("report cell out of range");
}

PowerProfile ExperimentConfig::initial_powers(std::size_t cells) const {
  return PowerProfile::uniform(cells, scenario.users_per_cell, from_db(gamma_db), from_db(phi_db),
                               from_db(phi_max_db));
}

PowerControlConfig ExperimentConfig::pc_config() const {
  PowerControlConfig c;
  c.target_sinr = from_db(target_db);
  c.iterations = pc_iterations;
  c.algorithm = pc == PcMode::Tpc ? PcAlgorithm::TargetTracking : PcAlgorithm::InterferenceAware;
  return c;
}

namespace {

struct Prepared {
  DropState state;
  GameTrace trace;
};

Prepared prepare(const ExperimentConfig& config, const Layout& layout, std::size_t drop_index) {
  Rng geo = make_stream(config.scenario.seed, drop_index, kGeometryStream);
  Rng fade = make_stream(config.scenario.seed, drop_index, kFadingStream);
  const auto drop = drop_users(layout, config.scenario.users_per_cell, geo, config.scenario.exclusion_radius_m);
  auto beta = compute_beta(layout, drop, config.scenario.path_loss(), fade);
  const auto powers = config.initial_powers(layout.cells());
  auto start = PilotAssignment::identity(layout.cells(), config.scenario.users_per_cell);
  if (config.criterion == Criterion::Random) {
    // Users are already dropped in random order, so identity is a random assignment.
    GameTrace trace;
    trace.converged = true;
    trace.changed_per_round.push_back(0);
    return {{std::move(beta), std::move(start)}, std::move(trace)};
  }
  auto game = best_response_rounds(config.criterion, beta, powers, std::move(start), config.max_rounds);
  return {{std::move(beta), std::move(game.assignment)}, std::move(game.trace)};
}

}  // namespace

DropState prepare_drop(const ExperimentConfig& config, const Layout& layout, std::size_t drop_index) {
  return prepare(config, layout, drop_index).state;
}

DropOutcome simulate_drop(const ExperimentConfig& config, const Layout& layout, std::size_t drop_index) {
  auto prep = prepare(config, layout, drop_index);
  DropOutcome out;
  out.game_rounds = prep.trace.rounds();
  out.game_converged = prep.trace.converged;
  out.powers = config.initial_powers(layout.cells());
  if (config.pc != PcMode::Off) {
    const auto full = out.powers;
    out.powers = run_power_control(config.pc_config(), prep.state.beta, full, prep.state.assignment).powers;
    if (config.interleave_pa_pc && config.criterion != Criterion::Random) {
      auto game = best_response_rounds(config.criterion, prep.state.beta, out.powers, prep.state.assignment,
                                       config.max_rounds);
      out.game_rounds += game.trace.rounds();
      out.game_converged = out.game_converged && game.trace.converged;
      prep.state.assignment = std::move(game.assignment);
      out.powers = run_power_control(config.pc_config(), prep.state.beta, full, prep.state.assignment).powers;
    }
  }
  const auto& beta = prep.state.beta;
  const auto alpha = AlphaTable::compute(beta, out.powers, prep.state.assignment);
  const std::size_t cell = config.report_cell;
  for (std::size_t u = 0; u < beta.users(); ++u) {
    const auto a = link_amplitudes(beta, out.powers, prep.state.assignment, alpha, cell, u);
    const double sinr = sinr_from_amplitudes(a);
    out.ber.push_back(ber_from_amplitudes(a.signal, a.interference));
    out.sinr_db.push_back(std::isinf(sinr) ? config.sinr_cap_db : to_db(sinr));
    out.rate.push_back(user_rate(sinr, config.frame, config.scenario.reuse_factor, config.sinr_cap_db));
  }
  out.state = std::move(prep.state);
  return out;
}

MetricsSummary summarize(const std::vector<DropOutcome>& drops) {
  if (drops.empty()) throw ContractViolation("no drops to summarize");
  MetricsSummary s;
  s.num_drops = drops.size();
  NeumaierSum ber_sum, rate_sum, rounds;
  std::size_t zero = 0, high = 0;
  for (const auto& d : drops) {
    rounds.add(static_cast<double>(d.game_rounds));
    if (!d.game_converged) ++s.unconverged_games;
    for (std::size_t u = 0; u < d.ber.size(); ++u) {
      ber_sum.add(d.ber[u]);
      rate_sum.add(d.rate[u]);
      if (d.ber[u] == 0.0) ++zero;
      if (d.ber[u] >= 0.1) ++high;
      s.ber.push_back(d.ber[u]);
      s.sinr_db.push_back(d.sinr_db[u]);
      s.rate_mbps.push_back(d.rate[u] / 1e6);
    }
  }
  const auto n = static_cast<double>(s.ber.size());
  s.mean_ber_pct = 100.0 * ber_sum.value() / n;
  s.frac_ber_zero_pct = 100.0 * static_cast<double>(zero) / n;
  s.frac_ber_ge_0_1_pct = 100.0 * static_cast<double>(high) / n;
  s.frac_ber_mid_pct = 100.0 * static_cast<double>(s.ber.size() - zero - high) / n;
  s.mean_rate_mbps = rate_sum.value() / n / 1e6;
  s.p5_rate_mbps = percentile_nearest_rank(s.rate_mbps, 5.0);
  s.mean_game_rounds = rounds.value() / static_cast<double>(drops.size());
  return s;
}

MetricsSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto layout = generate_layout(config.scenario.reuse_factor, config.scenario.radius_m);
  std::vector<DropOutcome> drops(config.num_drops);
  parallel_for(config.num_drops, config.threads,
               [&](std::size_t i) { drops[i] = simulate_drop(config, layout, i); });
  return summarize(drops);
}

std::vector<DropState> build_ensemble(const ExperimentConfig& config) {
  config.validate();
  const auto layout = generate_layout(config.scenario.reuse_factor, config.scenario.radius_m);
  std::vector<DropState> out(config.num_drops);
  parallel_for(config.num_drops, config.threads, [&](std::size_t i) { out[i] = prepare_drop(config, layout, i); });
  return out;
}

void write_metrics_csv(std::ostream& out, const MetricsSummary& s) {
  out << "metric,value\n";
  fmt::print(out, "num_drops,{}\n", s.num_drops);
  fmt::print(out, "mean_ber_pct,{:.6f}\n", s.mean_ber_pct);
  fmt::print(out, "frac_ber_zero_pct,{:.6f}\n", s.frac_ber_zero_pct);
  fmt::print(out, "frac_ber_mid_pct,{:.6f}\n", s.frac_ber_mid_pct);
  fmt::print(out, "frac_ber_ge_0_1_pct,{:.6f}\n", s.frac_ber_ge_0_1_pct);
  fmt::print(out, "mean_rate_mbps,{:.6f}\n", s.mean_rate_mbps);
  fmt::print(out, "p5_rate_mbps,{:.6f}\n", s.p5_rate_mbps);
  fmt::print(out, "mean_game_rounds,{:.6f}\n", s.mean_game_rounds);
  fmt::print(out, "unconverged_games,{}\n", s.unconverged_games);
}

void write_metrics_json(std::ostream& out, const MetricsSummary& s) {
  nlohmann::json j{{"num_drops", s.num_drops},
                   {"mean_ber_pct", s.mean_ber_pct},
                   {"frac_ber_zero_pct", s.frac_ber_zero_pct},
                   {"frac_ber_mid_pct", s.frac_ber_mid_pct},
                   {"frac_ber_ge_0_1_pct", s.frac_ber_ge_0_1_pct},
                   {"mean_rate_mbps", s.mean_rate_mbps},
                   {"p5_rate_mbps", s.p5_rate_mbps},
                   {"mean_game_rounds", s.mean_game_rounds},
                   {"unconverged_games", s.unconverged_games}};
  out << j.dump(2) << '\n';
}

void write_cdf_csv(std::ostream& out, const std::vector<double>& samples) {
  out << "value,cdf,ccdf\n";
  for (const auto& p : compute_cdf(samples)) fmt::print(out, "{:.10g},{:.10g},{:.10g}\n", p.value, p.cdf, p.ccdf);
}

}  // namespace mmimo
