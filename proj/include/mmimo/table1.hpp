#pragma once

// The eight-row pilot allocation / power control comparison for reuse 1 and 3.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmimo/metrics.hpp"

namespace mmimo {

struct Table1Reference {
  double mean_ber_pct;
  double frac_ber_zero_pct;
  double frac_ber_ge_0_1_pct;
  double mean_rate_mbps;
  double p5_rate_mbps;
};

struct Table1Spec {
  int reuse_factor = 1;
  std::string label;
  Criterion criterion = Criterion::Random;
  PcMode pc = PcMode::Off;
  double target_db = 0.0;
  Table1Reference reference{};
};

/// Random, Random+PC, MaxminSINR, MaxminSINR+PC for RF 1 then RF 3, with the
/// target SINRs and reference values.
std::vector<Table1Spec> table1_specs();

struct Table1Row {
  Table1Spec spec;
  std::optional<MetricsSummary> result;  // empty: row not run
};

ExperimentConfig table1_config(const Table1Spec& spec, std::size_t num_drops, std::uint64_t seed,
                               unsigned threads = 0);

std::vector<Table1Row> run_table1(std::size_t num_drops, std::uint64_t seed, unsigned threads = 0);

/// Aligned text with reference values alongside; missing rows shown as "-".
void write_table1_text(std::ostream& out, const std::vector<Table1Row>& rows);
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);

}  // namespace mmimo
