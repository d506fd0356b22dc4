#pragma once

// Downlink power control driven by the asymptotic SINR: target tracking
// (TPC) and the interference-aware variant (OPC) that backs off users whose
// target would need more than the power cap.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mmimo/asymptotics.hpp"
#include "mmimo/channel.hpp"
#include "mmimo/grid.hpp"
#include "mmimo/pilot_assignment.hpp"
#include "mmimo/scenario.hpp"

namespace mmimo {

enum class PcAlgorithm { TargetTracking, InterferenceAware };

std::string_view to_string(PcAlgorithm a);

struct PowerControlConfig {
  double target_sinr = 1.0;                      // linear, used for every user...
  std::optional<CellGrid<double>> user_targets;  // ...unless per-user targets are given
  std::size_t iterations = 10;
  PcAlgorithm algorithm = PcAlgorithm::InterferenceAware;

  double target(std::size_t cell, std::size_t user) const {
    return user_targets ? (*user_targets)(cell, user) : target_sinr;
  }
  void validate() const;
};

/// Interference seen by (cell, user) scaled by alpha^2 / beta^2 of its own
/// link, i.e. the power it would need for SINR 1:
///   sum_{j != cell} phi_{k j} beta^2_{j u cell} alpha^2_{k cell} / (alpha^2_{k j} beta^2_{cell u cell}).
/// Does not depend on the user's own downlink power.
double effective_interference(const BetaTensor& beta, const PowerProfile& powers,
                              const PilotAssignment& assignment, const AlphaTable& alpha, std::size_t cell,
                              std::size_t user);
double effective_interference(const BetaTensor& beta, const PowerProfile& powers,
                              const PilotAssignment& assignment, std::size_t cell, std::size_t user);

/// phi / SINR from the previous iterate. Needs phi > 0; use the closed form
/// otherwise.
double effective_interference_from_sinr(double phi, double sinr);

/// min(target I, cap)
double tpc_step(double interference, double target, double cap);
/// target I while I <= cap / target, cap^2 / (target I) beyond.
double opc_step(double interference, double target, double cap);

/// Entry 0 is the starting point; entry i the state after iteration i.
struct PowerTrace {
  std::vector<CellGrid<double>> phi;
  std::vector<CellGrid<double>> sinr;

  std::size_t iterations() const noexcept { return phi.empty() ? 0 : phi.size() - 1; }
};

struct PowerControlResult {
  PowerProfile powers;
  PowerTrace trace;
};

/// Synchronous updates: every user's I is taken from iteration i-1, then all
/// powers move at once. Starts from powers.phi, which must lie in (0, phi_max].
PowerControlResult run_power_control(const PowerControlConfig& config, const BetaTensor& beta,
                                     const PowerProfile& powers, const PilotAssignment& assignment);

/// One drop after pilot allocation, ready for power control.
struct DropState {
  BetaTensor beta;
  PilotAssignment assignment;
};

struct SweepPoint {
  double target_db = 0.0;
  double p5_rate = 0.0;    // bit/s
  double mean_rate = 0.0;  // bit/s
};

struct SweepResult {
  double best_target_db = 0.0;  // first grid point with the highest p5 rate
  std::vector<SweepPoint> curve;
};

/// For every grid value, runs power control on each drop and collects the
/// rates of the users in cell `report_cell`.
SweepResult sweep_target(std::span<const double> grid_db, std::span<const DropState> ensemble,
                         const PowerProfile& base_powers, PowerControlConfig config, const FrameConfig& frame,
                         int reuse_factor, std::size_t report_cell = 0, double sinr_cap_db = 40.0);

/// iteration,cell,user,phi,sinr_dB
void write_power_trace_csv(std::ostream& out, const PowerTrace& trace);
/// zeta_dB,p5_rate,mean_rate (rates in Mbps)
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace mmimo
