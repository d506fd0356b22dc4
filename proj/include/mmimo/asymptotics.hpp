#pragma once

// N -> infinity limits: per-user downlink SINR, exact 4-QAM BER from the sign
// pattern of the pilot-sharing interferers, and the per-user data rate.
//
// Every quantity is driven by the noiseless limit amplitudes
//   own:        sqrt(phi) beta_{cell,u,cell} / alpha_{k,cell}
//   interferer: sqrt(phi_{k,j}) beta_{j,u,cell} / alpha_{k,j}   (j != cell)
// where k is the pilot held by user u and (k, j) denotes whichever user of
// cell j holds pilot k.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mmimo/channel.hpp"
#include "mmimo/grid.hpp"
#include "mmimo/pilot_assignment.hpp"
#include "mmimo/rng.hpp"
#include "mmimo/scenario.hpp"

namespace mmimo {

inline constexpr double kInfiniteSinr = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kMaxSignCells = 20;

/// 2^(L-1) x L matrix of +-1. Column `serving` is all +1; the remaining
/// columns, read left to right as bits (most significant first, 1 -> -1),
/// count up in binary from row 0.
class SignMatrix {
 public:
  SignMatrix(std::size_t cells, std::size_t serving);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t serving() const noexcept { return serving_; }
  int operator()(std::size_t row, std::size_t col) const {
    return signs_[row * cols_ + col];
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t serving_;
  std::vector<std::int8_t> signs_;
};

SignMatrix build_sign_matrix(std::size_t cells, std::size_t serving);

/// alpha^2(pilot, bs) for a full assignment.
class AlphaTable {
 public:
  static AlphaTable compute(const BetaTensor& beta, const PowerProfile& powers,
                            const PilotAssignment& assignment);

  double squared(std::size_t pilot, std::size_t bs) const { return sq_[pilot * cells_ + bs]; }

  std::size_t evaluations() const noexcept { return sq_.size(); }

 private:
  std::size_t cells_ = 0;
  std::vector<double> sq_;
};

struct LinkAmplitudes {
  double signal = 0.0;
  std::vector<double> interference;  // one entry per other cell, in cell order
};

LinkAmplitudes link_amplitudes(const BetaTensor& beta, const PowerProfile& powers,
                               const PilotAssignment& assignment, const AlphaTable& alpha,
                               std::size_t cell, std::size_t user);

/// signal^2 / sum(interference^2); +inf when nothing interferes.
double sinr_from_amplitudes(const LinkAmplitudes& a);

/// Fraction of interferer sign patterns with sum(b_j a_j) >= signal.
double ber_from_amplitudes(double signal, std::span<const double> interference);

/// Same quantity, evaluated row by row over an explicit sign matrix.
/// `amplitudes` has one entry per cell; the serving entry is the own signal.
double ber_from_sign_matrix(std::span<const double> amplitudes, const SignMatrix& signs);

double asymptotic_sinr(const BetaTensor& beta, const PowerProfile& powers,
                       const PilotAssignment& assignment, std::size_t cell, std::size_t user);
CellGrid<double> asymptotic_sinr(const BetaTensor& beta, const PowerProfile& powers,
                                 const PilotAssignment& assignment);

/// Only 4-QAM has closed-form decision regions here; any other constellation
/// size is rejected with DomainError.
double asymptotic_ber(const BetaTensor& beta, const PowerProfile& powers,
                      const PilotAssignment& assignment, std::size_t cell, std::size_t user,
                      int constellation_size = 4);
CellGrid<double> asymptotic_ber(const BetaTensor& beta, const PowerProfile& powers,
                                const PilotAssignment& assignment);

/// Symbol-level reference: draws equiprobable 4-QAM symbols for the user and
/// every pilot-sharing interferer, forms the noiseless limit received signal,
/// detects both rails by sign and returns the bit error fraction. Computes its
/// own alpha values; shares no code with the closed form.
double ber_bruteforce_oracle(const BetaTensor& beta, const PowerProfile& powers,
                             const PilotAssignment& assignment, std::size_t cell, std::size_t user,
                             std::size_t num_symbols, Rng& rng);

/// (BW / RF) (D / T) log2(1 + SINR) in bit/s. An infinite SINR (isolated
/// cell) is replaced by `sinr_cap_db`.
double user_rate(double sinr, const FrameConfig& frame, int reuse_factor, double sinr_cap_db = 40.0);

struct AsymptoticReport {
  CellGrid<double> sinr;  // linear
  CellGrid<double> ber;
  CellGrid<double> rate;  // bit/s
};

AsymptoticReport evaluate_asymptotics(const BetaTensor& beta, const PowerProfile& powers,
                                      const PilotAssignment& assignment, const FrameConfig& frame,
                                      int reuse_factor, double sinr_cap_db = 40.0);

double to_db(double linear);
double from_db(double db);

}  // namespace mmimo
