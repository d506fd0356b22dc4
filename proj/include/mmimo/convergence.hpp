#pragma once

// Finite-antenna MF / ZF link simulation against the N -> infinity limits.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mmimo/precoding.hpp"
#include "mmimo/scenario.hpp"

namespace mmimo {

struct ConvergenceConfig {
  ScenarioConfig scenario;
  std::vector<std::size_t> antenna_counts{64, 256, 1024, 4096};
  std::size_t num_drops = 200;
  std::size_t frames = 8;              // fresh fast fading + training per frame
  std::size_t symbols_per_frame = 128;
  double gamma_db = 10.0;
  double phi_db = 10.0;
  bool noise = true;
  std::size_t report_cell = 0;
  unsigned threads = 0;

  void validate() const;
};

/// Per drop: means over the report cell's users. SINR means are taken in dB.
struct DropConvergence {
  double bound_sinr_db = 0.0;
  double bound_ber = 0.0;
  std::vector<double> mf_sinr_db;  // one entry per antenna count
  std::vector<double> zf_sinr_db;
  std::vector<double> mf_ber;
  std::vector<double> zf_ber;
};

struct ConvergenceRow {
  std::size_t antennas = 0;
  PrecoderKind precoder = PrecoderKind::MatchedFilter;
  double mean_ber = 0.0;
  double mean_sinr_db = 0.0;
  double bound_ber = 0.0;
  double bound_sinr_db = 0.0;
  double median_gap_db = 0.0;  // median over drops of |mean SINR - bound|
};

struct ConvergenceReport {
  std::vector<DropConvergence> drops;
  std::vector<ConvergenceRow> rows;  // (N, MF), (N, ZF) for every N, in order

  const ConvergenceRow& row(std::size_t antennas, PrecoderKind kind) const;
};

DropConvergence simulate_convergence_drop(const ConvergenceConfig& config, const Layout& layout,
                                          std::size_t drop_index);

ConvergenceReport run_convergence(const ConvergenceConfig& config);

/// N,precoder,mean_BER,mean_SINR_dB,bound_BER,bound_SINR_dB,median_gap_dB
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

}  // namespace mmimo
