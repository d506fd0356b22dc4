#include "mmimo/table1.hpp"

#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mmimo {

std::vector<Table1Spec> table1_specs() {
  using C = Criterion;
  using P = PcMode;
  return {
      {1, "Random", C::Random, P::Off, 0.0, {9.84, 75.41, 23.63, 48.50, 0.1344}},
      {1, "Random + PC", C::Random, P::Opc, 0.0, {8.44, 75.47, 23.57, 30.89, 1.4610}},
      {1, "MaxminSINR", C::MaxminSinr, P::Off, 0.0, {6.17, 82.45, 16.28, 52.62, 0.7937}},
      {1, "MaxminSINR + PC", C::MaxminSinr, P::Opc, 6.0, {2.73, 92.61, 6.65, 34.24, 6.7430}},
      {3, "Random", C::Random, P::Off, 0.0, {1.41, 96.33, 3.47, 29.07, 4.79}},
      {3, "Random + PC", C::Random, P::Opc, 20.0, {1.29, 97.17, 2.82, 24.39, 10.41}},
      {3, "MaxminSINR", C::MaxminSinr, P::Off, 0.0, {0.39, 98.78, 1.09, 31.68, 11.15}},
      {3, "MaxminSINR + PC", C::MaxminSinr, P::Opc, 25.0, {0.45, 98.94, 1.01, 25.95, 17.31}},
  };
}

ExperimentConfig table1_config(const Table1Spec& spec, std::size_t num_drops, std::uint64_t seed,
                               unsigned threads) {
  ExperimentConfig c;
  c.scenario.reuse_factor = spec.reuse_factor;
  c.scenario.seed = seed;
  c.criterion = spec.criterion;
  c.pc = spec.pc;
  c.target_db = spec.target_db;
  c.num_drops = num_drops;
  c.threads = threads;
  return c;
}

std::vector<Table1Row> run_table1(std::size_t num_drops, std::uint64_t seed, unsigned threads) {
  std::vector<Table1Row> rows;
  for (const auto& spec : table1_specs()) {
    rows.push_back({spec, run_experiment(table1_config(spec, num_drops, seed, threads))});
  }
  return rows;
}

namespace {

std::string row_label(const Table1Spec& s) {
  if (s.pc == PcMode::Off) return s.label;
  return fmt::format("{} ({:g} dB)", s.label, s.target_db);
}

std::string cell(const std::optional<MetricsSummary>& r, double MetricsSummary::*field, const char* spec) {
  if (!r) return "-";
  return fmt::format(fmt::runtime(spec), (*r).*field);
}

}  // namespace

void write_table1_text(std::ostream& out, const std::vector<Table1Row>& rows) {
  int rf = 0;
  for (const auto& row : rows) {
    if (row.spec.reuse_factor != rf) {
      rf = row.spec.reuse_factor;
      fmt::print(out, "\nRF = {}\n", rf);
      fmt::print(out, "{:<26} {:>15} {:>15} {:>15} {:>15} {:>17}\n", "scheme", "mean BER %", "BER=0 %",
                 "BER>=0.1 %", "mean rate", "95%-likely rate");
    }
    const auto& r = row.result;
    const auto& p = row.spec.reference;
    auto pair = [&](double MetricsSummary::*f, double ref, const char* spec) {
      return fmt::format("{} ({})", cell(r, f, spec), fmt::format(fmt::runtime(spec), ref));
    };
    fmt::print(out, "{:<26} {:>15} {:>15} {:>15} {:>15} {:>17}\n", row_label(row.spec),
               pair(&MetricsSummary::mean_ber_pct, p.mean_ber_pct, "{:.2f}"),
               pair(&MetricsSummary::frac_ber_zero_pct, p.frac_ber_zero_pct, "{:.2f}"),
               pair(&MetricsSummary::frac_ber_ge_0_1_pct, p.frac_ber_ge_0_1_pct, "{:.2f}"),
               pair(&MetricsSummary::mean_rate_mbps, p.mean_rate_mbps, "{:.2f}"),
               pair(&MetricsSummary::p5_rate_mbps, p.p5_rate_mbps, "{:.4f}"));
  }
  out << "\nvalues in parentheses: reference values\n";
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
  out << "rf,scheme,zeta_dB,num_drops,mean_ber_pct,frac_ber_zero_pct,frac_ber_ge_0_1_pct,mean_rate_mbps,"
         "p5_rate_mbps,ref_mean_ber_pct,ref_frac_ber_zero_pct,ref_frac_ber_ge_0_1_pct,ref_mean_rate_mbps,"
         "ref_p5_rate_mbps\n";
  for (const auto& row : rows) {
    const auto& s = row.spec;
    const auto& p = s.reference;
    std::string measured = ",,,,,";
    if (row.result) {
      const auto& r = *row.result;
      measured = fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}", r.num_drops, r.mean_ber_pct,
                             r.frac_ber_zero_pct, r.frac_ber_ge_0_1_pct, r.mean_rate_mbps, r.p5_rate_mbps);
    }
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", s.reuse_factor, s.label,
               s.pc == PcMode::Off ? std::string() : fmt::format("{:g}", s.target_db), measured, p.mean_ber_pct,
               p.frac_ber_zero_pct, p.frac_ber_ge_0_1_pct, p.mean_rate_mbps, p.p5_rate_mbps);
  }
}

}  // namespace mmimo
