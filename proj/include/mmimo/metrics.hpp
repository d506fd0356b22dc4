#pragma once

// Monte Carlo driver: drops, pilot allocation, optional power control and
// central-cell statistics.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "mmimo/pilot_allocation.hpp"
#include "mmimo/power_control.hpp"
#include "mmimo/scenario.hpp"
#include "mmimo/stats.hpp"

namespace mmimo {

enum class PcMode { Off, Tpc, Opc };

std::string_view to_string(PcMode m);
std::optional<PcMode> parse_pc_mode(std::string_view name);

inline constexpr std::size_t kDeskScaleDrops = 10000;
inline constexpr std::size_t kPaperScaleDrops = 100000;

struct ExperimentConfig {
  ScenarioConfig scenario;
  FrameConfig frame;
  Criterion criterion = Criterion::Random;
  PcMode pc = PcMode::Off;
  double target_db = 0.0;
  std::size_t pc_iterations = 10;
  std::size_t num_drops = kDeskScaleDrops;
  double gamma_db = 10.0;
  double phi_db = 10.0;
  double phi_max_db = 10.0;
  double sinr_cap_db = 40.0;
  std::size_t max_rounds = kDefaultMaxRounds;
  std::size_t report_cell = 0;
  // Re-run pilot allocation on the power-controlled downlink powers, then
  // power control again from full power. Default is allocation first, once.
  bool interleave_pa_pc = false;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
  PowerProfile initial_powers(std::size_t cells) const;
  PowerControlConfig pc_config() const;
};

/// Everything one drop contributes.
struct DropOutcome {
  DropState state;
  PowerProfile powers;  // after power control, if any
  std::size_t game_rounds = 0;
  bool game_converged = true;
  std::vector<double> ber;      // report-cell users
  std::vector<double> sinr_db;  // report-cell users
  std::vector<double> rate;     // report-cell users, bit/s
};

/// Pilot allocation only; stream derived from (seed, drop_index).
DropState prepare_drop(const ExperimentConfig& config, const Layout& layout, std::size_t drop_index);

DropOutcome simulate_drop(const ExperimentConfig& config, const Layout& layout, std::size_t drop_index);

struct MetricsSummary {
  std::size_t num_drops = 0;
  double mean_ber_pct = 0.0;
  double frac_ber_zero_pct = 0.0;
  double frac_ber_mid_pct = 0.0;  // 0 < BER < 0.1
  double frac_ber_ge_0_1_pct = 0.0;
  double mean_rate_mbps = 0.0;
  double p5_rate_mbps = 0.0;
  double mean_game_rounds = 0.0;
  std::size_t unconverged_games = 0;
  std::vector<double> ber;
  std::vector<double> sinr_db;
  std::vector<double> rate_mbps;
};

MetricsSummary summarize(std::vector<DropOutcome> const& drops);

/// Runs drops 0..num_drops-1 over a worker pool; results do not depend on
/// the number of workers.
MetricsSummary run_experiment(const ExperimentConfig& config);

/// Drops after pilot allocation, for target sweeps.
std::vector<DropState> build_ensemble(const ExperimentConfig& config);

/// metric,value rows.
void write_metrics_csv(std::ostream& out, const MetricsSummary& s);
void write_metrics_json(std::ostream& out, const MetricsSummary& s);
/// value,cdf,ccdf
void write_cdf_csv(std::ostream& out, const std::vector<double>& samples);

}  // namespace mmimo
