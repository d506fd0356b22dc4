#include "mmimo/asymptotics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mmimo/errors.hpp"
#include "mmimo/precoding.hpp"

namespace mmimo {

SignMatrix::SignMatrix(std::size_t cells, std::size_t serving)
    : rows_(0), cols_(cells), serving_(serving) {
  if (cells < 1 || serving >= cells) throw ContractViolation("sign matrix needs 0 <= serving < L");
  if (cells > kMaxSignCells) {
    throw ResourceGuardError(fmt::format("sign matrix for L = {} exceeds the L <= {} guard", cells, kMaxSignCells));
  }
  const std::size_t others = cells - 1;
  rows_ = std::size_t{1} << others;
  signs_.assign(rows_ * cols_, 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::size_t bit = others;
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c == serving) continue;
      --bit;
      signs_[r * cols_ + c] = ((r >> bit) & 1u) ? -1 : 1;
    }
  }
}

SignMatrix build_sign_matrix(std::size_t cells, std::size_t serving) { return SignMatrix(cells, serving); }

AlphaTable AlphaTable::compute(const BetaTensor& beta, const PowerProfile& powers,
                               const PilotAssignment& assignment) {
  const std::size_t cells = beta.cells();
  const std::size_t users = beta.users();
  if (assignment.cells() != cells || assignment.users() != users || powers.cells() != cells ||
      powers.users() != users) {
    throw ContractViolation("alpha table inputs disagree on shape");
  }
  AlphaTable t;
  t.cells_ = cells;
  t.sq_.assign(users * cells, 1.0 / static_cast<double>(users));
  for (std::size_t k = 0; k < users; ++k) {
    for (std::size_t j = 0; j < cells; ++j) {
      const std::size_t u = assignment.user(j, k);
      const double g = powers.gamma(j, u);
      for (std::size_t bs = 0; bs < cells; ++bs) t.sq_[k * cells + bs] += g * beta(bs, u, j);
    }
  }
  return t;
}

LinkAmplitudes link_amplitudes(const BetaTensor& beta, const PowerProfile& powers,
                               const PilotAssignment& assignment, const AlphaTable& alpha,
                               std::size_t cell, std::size_t user) {
  const std::size_t cells = beta.cells();
  const std::size_t pilot = assignment.pilot_of(cell, user);
  LinkAmplitudes a;
  a.signal = std::sqrt(powers.phi(cell, user)) * beta(cell, user, cell) / std::sqrt(alpha.squared(pilot, cell));
  a.interference.reserve(cells - 1);
  for (std::size_t j = 0; j < cells; ++j) {
    if (j == cell) continue;
    const std::size_t v = assignment.user(j, pilot);
    a.interference.push_back(std::sqrt(powers.phi(j, v)) * beta(j, user, cell) / std::sqrt(alpha.squared(pilot, j)));
  }
  return a;
}

double sinr_from_amplitudes(const LinkAmplitudes& a) {
  double den = 0.0;
  for (double v : a.interference) den += v * v;
  if (den == 0.0) return kInfiniteSinr;
  return a.signal * a.signal / den;
}

double ber_from_amplitudes(double signal, std::span<const double> interference) {
  const std::size_t m = interference.size();
  if (m + 1 > kMaxSignCells) throw ResourceGuardError("too many interferers for exact BER enumeration");
  const std::size_t patterns = std::size_t{1} << m;
  std::size_t hits = 0;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += ((mask >> i) & 1u) ? -interference[i] : interference[i];
    if (s - signal >= 0.0) ++hits;  // u[0] = 1
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

double ber_from_sign_matrix(std::span<const double> amplitudes, const SignMatrix& signs) {
  if (amplitudes.size() != signs.cols()) throw ContractViolation("amplitude count must equal L");
  std::size_t hits = 0;
  for (std::size_t r = 0; r < signs.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < signs.cols(); ++c) {
      if (c == signs.serving()) continue;
      s += amplitudes[c] * signs(r, c);
    }
    if (s - amplitudes[signs.serving()] >= 0.0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(signs.rows());
}

double asymptotic_sinr(const BetaTensor& beta, const PowerProfile& powers,
                       const PilotAssignment& assignment, std::size_t cell, std::size_t user) {
  const auto alpha = AlphaTable::compute(beta, powers, assignment);
  return sinr_from_amplitudes(link_amplitudes(beta, powers, assignment, alpha, cell, user));
}

CellGrid<double> asymptotic_sinr(const BetaTensor& beta, const PowerProfile& powers,
                                 const PilotAssignment& assignment) {
  const auto alpha = AlphaTable::compute(beta, powers, assignment);
  CellGrid<double> out(beta.cells(), beta.users());
  for (std::size_t j = 0; j < beta.cells(); ++j) {
    for (std::size_t u = 0; u < beta.users(); ++u) {
      out(j, u) = sinr_from_amplitudes(link_amplitudes(beta, powers, assignment, alpha, j, u));
    }
  }
  return out;
}

double asymptotic_ber(const BetaTensor& beta, const PowerProfile& powers,
                      const PilotAssignment& assignment, std::size_t cell, std::size_t user,
                      int constellation_size) {
  if (constellation_size != 4) {
    throw DomainError(fmt::format("asymptotic BER is only defined for 4-QAM (got M = {})", constellation_size));
  }
  if (cell >= beta.cells() || user >= beta.users()) throw ContractViolation("BER index out of range");
  const auto alpha = AlphaTable::compute(beta, powers, assignment);
  const auto a = link_amplitudes(beta, powers, assignment, alpha, cell, user);
  return ber_from_amplitudes(a.signal, a.interference);
}

CellGrid<double> asymptotic_ber(const BetaTensor& beta, const PowerProfile& powers,
                                const PilotAssignment& assignment) {
  const auto alpha = AlphaTable::compute(beta, powers, assignment);
  CellGrid<double> out(beta.cells(), beta.users());
  for (std::size_t j = 0; j < beta.cells(); ++j) {
    for (std::size_t u = 0; u < beta.users(); ++u) {
      const auto a = link_amplitudes(beta, powers, assignment, alpha, j, u);
      out(j, u) = ber_from_amplitudes(a.signal, a.interference);
    }
  }
  return out;
}

double ber_bruteforce_oracle(const BetaTensor& beta, const PowerProfile& powers,
                             const PilotAssignment& assignment, std::size_t cell, std::size_t user,
                             std::size_t num_symbols, Rng& rng) {
  const std::size_t cells = beta.cells();
  const std::size_t users = beta.users();
  if (num_symbols < 10000 * (std::size_t{1} << (cells - 1))) {
    throw ContractViolation("oracle needs at least 1e4 * 2^(L-1) symbols");
  }
  const std::size_t pilot = assignment.pilot_of(cell, user);

  // Amplitude of the pilot-k stream of every base station at this user.
  std::vector<double> amp(cells);
  for (std::size_t l = 0; l < cells; ++l) {
    double a2 = 1.0 / static_cast<double>(users);
    for (std::size_t j = 0; j < cells; ++j) {
      const std::size_t v = assignment.user(j, pilot);
      a2 += powers.gamma(j, v) * beta(l, v, j);
    }
    const std::size_t target = assignment.user(l, pilot);
    amp[l] = std::sqrt(powers.phi(l, target)) * beta(l, user, cell) / std::sqrt(a2);
  }

  std::size_t errors = 0;
  for (std::size_t t = 0; t < num_symbols; ++t) {
    cplx r{};
    std::uint8_t own_bits = 0;
    for (std::size_t l = 0; l < cells; ++l) {
      const auto bits = static_cast<std::uint8_t>(rng() & 0x3u);
      if (l == cell) own_bits = bits;
      r += amp[l] * qam4_modulate(bits);
    }
    const std::uint8_t diff = own_bits ^ qam4_detect(r);
    errors += (diff & 0x1u) + ((diff >> 1) & 0x1u);
  }
  return static_cast<double>(errors) / (2.0 * static_cast<double>(num_symbols));
}

double user_rate(double sinr, const FrameConfig& frame, int reuse_factor, double sinr_cap_db) {
  if (!(sinr >= 0.0)) throw DomainError("rate needs a non-negative SINR");
  if (reuse_factor < 1) throw DomainError("reuse factor must be >= 1");
  const double s = std::isinf(sinr) ? from_db(sinr_cap_db) : sinr;
  return frame.bandwidth_hz / reuse_factor * static_cast<double>(frame.symbols_downlink) /
         static_cast<double>(frame.symbols_total) * std::log2(1.0 + s);
}

AsymptoticReport evaluate_asymptotics(const BetaTensor& beta, const PowerProfile& powers,
                                      const PilotAssignment& assignment, const FrameConfig& frame,
                                      int reuse_factor, double sinr_cap_db) {
  const auto alpha = AlphaTable::compute(beta, powers, assignment);
  AsymptoticReport rep{CellGrid<double>(beta.cells(), beta.users()), CellGrid<double>(beta.cells(), beta.users()),
                       CellGrid<double>(beta.cells(), beta.users())};
  for (std::size_t j = 0; j < beta.cells(); ++j) {
    for (std::size_t u = 0; u < beta.users(); ++u) {
      const auto a = link_amplitudes(beta, powers, assignment, alpha, j, u);
      rep.sinr(j, u) = sinr_from_amplitudes(a);
      rep.ber(j, u) = ber_from_amplitudes(a.signal, a.interference);
      rep.rate(j, u) = user_rate(rep.sinr(j, u), frame, reuse_factor, sinr_cap_db);
    }
  }
  return rep;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace mmimo
