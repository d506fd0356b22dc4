#include "mmimo/power_control.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mmimo/errors.hpp"
#include "mmimo/stats.hpp"

namespace mmimo {

std::string_view to_string(PcAlgorithm a) {
  return a == PcAlgorithm::TargetTracking ? "tpc" : "opc";
}

void PowerControlConfig::validate() const {
  if (iterations < 1) throw DomainError("power control needs at least one iteration");
  if (user_targets) {
    for (double t : user_targets->data()) {
      if (!(t > 0.0)) throw DomainError("target SINR must be positive");
    }
  } else if (!(target_sinr > 0.0)) {
    throw DomainError("target SINR must be positive");
  }
}

double effective_interference(const BetaTensor& beta, const PowerProfile& powers,
                              const PilotAssignment& assignment, const AlphaTable& alpha, std::size_t cell,
                              std::size_t user) {
  const std::size_t pilot = assignment.pilot_of(cell, user);
  const double own = beta(cell, user, cell);
  const double scale = alpha.squared(pilot, cell) / (own * own);
  double sum = 0.0;
  for (std::size_t j = 0; j < beta.cells(); ++j) {
    if (j == cell) continue;
    const std::size_t v = assignment.user(j, pilot);
    const double b = beta(j, user, cell);
    sum += powers.phi(j, v) * b * b / alpha.squared(pilot, j);
  }
  return sum * scale;
}

double effective_interference(const BetaTensor& beta, const PowerProfile& powers,
                              const PilotAssignment& assignment, std::size_t cell, std::size_t user) {
  return effective_interference(beta, powers, assignment, AlphaTable::compute(beta, powers, assignment), cell,
                                user);
}

double effective_interference_from_sinr(double phi, double sinr) {
  if (!(phi > 0.0) || !(sinr > 0.0)) throw ContractViolation("need phi > 0 and SINR > 0");
  if (std::isinf(sinr)) return 0.0;
  return phi / sinr;
}

double tpc_step(double interference, double target, double cap) {
  if (interference < 0.0 || target < 0.0 || cap < 0.0) throw ContractViolation("power control inputs must be >= 0");
  return std::min(target * interference, cap);
}

double opc_step(double interference, double target, double cap) {
  if (interference < 0.0 || target < 0.0 || cap < 0.0) throw ContractViolation("power control inputs must be >= 0");
  const double need = target * interference;
  if (need <= cap) return need;
  return cap * cap / need;
}

PowerControlResult run_power_control(const PowerControlConfig& config, const BetaTensor& beta,
                                     const PowerProfile& powers, const PilotAssignment& assignment) {
  config.validate();
  const std::size_t cells = beta.cells();
  const std::size_t users = beta.users();
  if (powers.cells() != cells || powers.users() != users) throw ContractViolation("power profile shape mismatch");
  if (config.user_targets && (config.user_targets->cells() != cells || config.user_targets->users() != users)) {
    throw ContractViolation("per-user targets shape mismatch");
  }
  for (std::size_t i = 0; i < powers.phi.size(); ++i) {
    const double p = powers.phi.data()[i];
    if (!(p > 0.0 && p <= powers.phi_max.data()[i])) throw ContractViolation("initial phi must lie in (0, phi_max]");
  }

  // alpha depends on the uplink powers only, so it is fixed across iterations.
  const auto alpha = AlphaTable::compute(beta, powers, assignment);
  PowerControlResult res{powers, {}};
  res.trace.phi.push_back(powers.phi);
  res.trace.sinr.push_back(asymptotic_sinr(beta, powers, assignment));

  CellGrid<double> next(cells, users);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t j = 0; j < cells; ++j) {
      for (std::size_t u = 0; u < users; ++u) {
        const double interference = effective_interference(beta, res.powers, assignment, alpha, j, u);
        const double cap = res.powers.phi_max(j, u);
        const double target = config.target(j, u);
        next(j, u) = config.algorithm == PcAlgorithm::TargetTracking ? tpc_step(interference, target, cap)
                                                                     : opc_step(interference, target, cap);
      }
    }
    res.powers.phi = next;
    res.trace.phi.push_back(next);
    res.trace.sinr.push_back(asymptotic_sinr(beta, res.powers, assignment));
  }
  return res;
}

SweepResult sweep_target(std::span<const double> grid_db, std::span<const DropState> ensemble,
                         const PowerProfile& base_powers, PowerControlConfig config, const FrameConfig& frame,
                         int reuse_factor, std::size_t report_cell, double sinr_cap_db) {
  if (grid_db.empty()) throw ContractViolation("target grid is empty");
  if (ensemble.empty()) throw ContractViolation("sweep ensemble is empty");
  SweepResult out;
  double best = 0.0;
  for (double z : grid_db) {
    config.target_sinr = from_db(z);
    std::vector<double> rates;
    NeumaierSum sum;
    for (const auto& drop : ensemble) {
      const auto pc = run_power_control(config, drop.beta, base_powers, drop.assignment);
      const auto sinr = pc.trace.sinr.back();
      for (std::size_t u = 0; u < drop.beta.users(); ++u) {
        const double r = user_rate(sinr(report_cell, u), frame, reuse_factor, sinr_cap_db);
        rates.push_back(r);
        sum.add(r);
      }
    }
    SweepPoint pt{z, percentile_nearest_rank(rates, 5.0), sum.value() / static_cast<double>(rates.size())};
    if (out.curve.empty() || pt.p5_rate > best) {
      best = pt.p5_rate;
      out.best_target_db = z;
    }
    out.curve.push_back(pt);
  }
  return out;
}

void write_power_trace_csv(std::ostream& out, const PowerTrace& trace) {
  out << "iteration,cell,user,phi,sinr_dB\n";
  for (std::size_t i = 0; i < trace.phi.size(); ++i) {
    const auto& phi = trace.phi[i];
    for (std::size_t j = 0; j < phi.cells(); ++j) {
      for (std::size_t u = 0; u < phi.users(); ++u) {
        fmt::print(out, "{},{},{},{:.10g},{:.6f}\n", i, j, u, phi(j, u), to_db(trace.sinr[i](j, u)));
      }
    }
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "zeta_dB,p5_rate,mean_rate\n";
  for (const auto& p : sweep.curve) {
    fmt::print(out, "{:g},{:.6f},{:.6f}\n", p.target_db, p.p5_rate / 1e6, p.mean_rate / 1e6);
  }
}

}  // namespace mmimo
