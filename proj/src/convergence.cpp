#include "mmimo/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mmimo/asymptotics.hpp"
#include "mmimo/errors.hpp"
#include "mmimo/parallel.hpp"
#include "mmimo/stats.hpp"

namespace mmimo {

namespace {

constexpr std::uint64_t kGeometryStream = 1;
constexpr std::uint64_t kFadingStream = 2;
constexpr std::uint64_t kLinkStream = 3;

double median(std::vector<double> v) { return percentile_nearest_rank(v, 50.0); }

double mean(const std::vector<double>& v) {
  NeumaierSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

}  // namespace

void ConvergenceConfig::validate() const {
  scenario.validate();
  if (antenna_counts.empty()) throw DomainError("need at least one antenna count");
  for (std::size_t n : antenna_counts) {
    if (n < scenario.users_per_cell) throw DomainError("antenna count below users per cell");
  }
  if (num_drops < 1 || frames < 1 || symbols_per_frame < 1) throw DomainError("need drops, frames and symbols >= 1");
}

const ConvergenceRow& ConvergenceReport::row(std::size_t antennas, PrecoderKind kind) const {
  for (const auto& r : rows) {
    if (r.antennas == antennas && r.precoder == kind) return r;
  }
  throw ContractViolation(fmt::format("no convergence row for N = {}", antennas));
}

DropConvergence simulate_convergence_drop(const ConvergenceConfig& config, const Layout& layout,
                                          std::size_t drop_index) {
  const std::uint64_t seed = config.scenario.seed;
  Rng geo = make_stream(seed, drop_index, kGeometryStream);
  Rng fade = make_stream(seed, drop_index, kFadingStream);
  const std::size_t users = config.scenario.users_per_cell;
  const auto drop = drop_users(layout, users, geo, config.scenario.exclusion_radius_m);
  const auto beta = compute_beta(layout, drop, config.scenario.path_loss(), fade);
  const std::size_t cells = layout.cells();
  const auto powers = PowerProfile::uniform(cells, users, from_db(config.gamma_db), from_db(config.phi_db),
                                            from_db(config.phi_db));
  const auto assignment = PilotAssignment::identity(cells, users);
  const std::size_t cell = config.report_cell;

  DropConvergence out;
  std::vector<double> bound_db, bound_ber;
  for (std::size_t u = 0; u < users; ++u) {
    bound_db.push_back(to_db(asymptotic_sinr(beta, powers, assignment, cell, u)));
    bound_ber.push_back(asymptotic_ber(beta, powers, assignment, cell, u));
  }
  out.bound_sinr_db = mean(bound_db);
  out.bound_ber = mean(bound_ber);

  const PilotBook book = make_pilot_book(users);
  const TrainingOptions training{config.noise};
  const auto k = static_cast<Eigen::Index>(users);
  for (std::size_t ni = 0; ni < config.antenna_counts.size(); ++ni) {
    const std::size_t n = config.antenna_counts[ni];
    // MF and ZF see the same channels, estimates and symbols.
    Rng rng = make_stream(seed, drop_index, kLinkStream + ni);
    std::vector<LinkObservations> mf(users), zf(users);
    Eigen::VectorXcd x(static_cast<Eigen::Index>(cells * users));
    for (std::size_t f = 0; f < config.frames; ++f) {
      const auto chan = draw_channel(beta, n, rng);
      const auto csi = simulate_training(book, chan, powers, assignment, rng, training);
      const CMatrix e_mf = effective_gains(mf_precoder(csi), chan, powers, assignment, cell);
      const CMatrix e_zf = effective_gains(zf_precoder(csi), chan, powers, assignment, cell);
      for (std::size_t s = 0; s < config.symbols_per_frame; ++s) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = qam4_modulate(static_cast<std::uint8_t>(rng() & 0x3u));
        const Eigen::VectorXcd r_mf = e_mf * x;
        const Eigen::VectorXcd r_zf = e_zf * x;
        for (Eigen::Index u = 0; u < k; ++u) {
          const cplx noise = config.noise ? complex_normal(rng) : cplx{};
          const cplx sent = x(static_cast<Eigen::Index>(cell * users) +
                              static_cast<Eigen::Index>(assignment.pilot_of(cell, static_cast<std::size_t>(u))));
          mf[static_cast<std::size_t>(u)].add(r_mf(u) + noise, sent);
          zf[static_cast<std::size_t>(u)].add(r_zf(u) + noise, sent);
        }
      }
    }
    std::vector<double> mf_db, zf_db, mf_ber, zf_ber;
    for (std::size_t u = 0; u < users; ++u) {
      const auto m = empirical_metrics(mf[u]);
      const auto z = empirical_metrics(zf[u]);
      mf_db.push_back(to_db(m.sinr));
      zf_db.push_back(to_db(z.sinr));
      mf_ber.push_back(m.ber);
      zf_ber.push_back(z.ber);
    }
    out.mf_sinr_db.push_back(mean(mf_db));
    out.zf_sinr_db.push_back(mean(zf_db));
    out.mf_ber.push_back(mean(mf_ber));
    out.zf_ber.push_back(mean(zf_ber));
  }
  return out;
}

ConvergenceReport run_convergence(const ConvergenceConfig& config) {
  config.validate();
  const auto layout = generate_layout(config.scenario.reuse_factor, config.scenario.radius_m);
  ConvergenceReport rep;
  rep.drops.resize(config.num_drops);

  parallel_for(config.num_drops, config.threads,
               [&](std::size_t i) { rep.drops[i] = simulate_convergence_drop(config, layout, i); });

  std::vector<double> bound_db, bound_ber;
  for (const auto& d : rep.drops) {
    bound_db.push_back(d.bound_sinr_db);
    bound_ber.push_back(d.bound_ber);
  }
  for (std::size_t ni = 0; ni < config.antenna_counts.size(); ++ni) {
    for (auto kind : {PrecoderKind::MatchedFilter, PrecoderKind::ZeroForcing}) {
      const bool is_mf = kind == PrecoderKind::MatchedFilter;
      std::vector<double> sinr, ber, gap;
      for (const auto& d : rep.drops) {
        const double s = is_mf ? d.mf_sinr_db[ni] : d.zf_sinr_db[ni];
        sinr.push_back(s);
        ber.push_back(is_mf ? d.mf_ber[ni] : d.zf_ber[ni]);
        gap.push_back(std::abs(s - d.bound_sinr_db));
      }
      rep.rows.push_back({config.antenna_counts[ni], kind, mean(ber), mean(sinr), mean(bound_ber), mean(bound_db),
                          median(gap)});
    }
  }
  return rep;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "N,precoder,mean_BER,mean_SINR_dB,bound_BER,bound_SINR_dB,median_gap_dB\n";
  for (const auto& r : report.rows) {
    fmt::print(out, "{},{},{:.8f},{:.6f},{:.8f},{:.6f},{:.6f}\n", r.antennas,
               r.precoder == PrecoderKind::MatchedFilter ? "MF" : "ZF", r.mean_ber, r.mean_sinr_db, r.bound_ber,
               r.bound_sinr_db, r.median_gap_db);
  }
}

}  // namespace mmimo
