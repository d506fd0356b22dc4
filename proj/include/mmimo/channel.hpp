#pragma once

// Fast fading, synchronized uplink training and the correlation-based CSI
// estimate, plus the almost-sure limit of the estimate's row norms.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmimo/grid.hpp"
#include "mmimo/pilot_assignment.hpp"
#include "mmimo/rng.hpp"
#include "mmimo/scenario.hpp"

namespace mmimo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Column k is pilot sequence psi_k. Entries have unit modulus and
/// psi^H psi = K I.
struct PilotBook {
  CMatrix psi;

  std::size_t length() const noexcept { return static_cast<std::size_t>(psi.rows()); }
};

PilotBook make_pilot_book(std::size_t users);

/// Per-user powers, all linear and relative to unit noise variance.
struct PowerProfile {
  CellGrid<double> gamma;    // uplink training power
  CellGrid<double> phi;      // downlink power
  CellGrid<double> phi_max;  // downlink cap

  static PowerProfile uniform(std::size_t cells, std::size_t users, double gamma, double phi,
                              double phi_max);

  std::size_t cells() const noexcept { return gamma.cells(); }
  std::size_t users() const noexcept { return gamma.users(); }
};

/// i.i.d. CN(0, 1) small-scale fading for every (bs, cell) pair. H(bs, cell)
/// is K x N; row k is h_{bs,k,cell}. G(bs, cell) = diag(sqrt(beta)) H.
class ChannelRealization {
 public:
  ChannelRealization(BetaTensor beta, std::size_t antennas, std::vector<CMatrix> h);

  std::size_t cells() const noexcept { return beta_.cells(); }
  std::size_t users() const noexcept { return beta_.users(); }
  std::size_t antennas() const noexcept { return antennas_; }
  const BetaTensor& beta() const noexcept { return beta_; }

  const CMatrix& H(std::size_t bs, std::size_t cell) const { return h_[bs * cells() + cell]; }
  CMatrix G(std::size_t bs, std::size_t cell) const;
  /// Row `user` of G(bs, cell) as a 1 x N row vector.
  Eigen::RowVectorXcd g(std::size_t bs, std::size_t user, std::size_t cell) const;

 private:
  BetaTensor beta_;
  std::size_t antennas_;
  std::vector<CMatrix> h_;
};

ChannelRealization draw_channel(const BetaTensor& beta, std::size_t antennas, Rng& rng);

/// ghat[bs] is K x N with row k the estimate for pilot k at that BS.
/// alpha(k, bs) = ||ghat_{bs,k}|| / sqrt(N).
struct CsiEstimate {
  std::vector<CMatrix> ghat;
  Eigen::MatrixXd alpha;

  std::size_t cells() const noexcept { return ghat.size(); }
  std::size_t pilots() const noexcept { return static_cast<std::size_t>(alpha.rows()); }
  std::size_t antennas() const noexcept {
    return ghat.empty() ? 0 : static_cast<std::size_t>(ghat.front().cols());
  }
};

struct TrainingOptions {
  bool noise = true;
};

/// Y_bs = sum_j G_{bs,j}^T sqrt(Gamma_j) Psi_j + noise, then
/// ghat_bs^T = Y_bs Psi^H / K. Psi_j orders the pilots by the users of cell j
/// that hold them, as given by `assignment`.
CsiEstimate simulate_training(const PilotBook& book, const ChannelRealization& chan,
                              const PowerProfile& powers, const PilotAssignment& assignment, Rng& rng,
                              TrainingOptions options = {});

CsiEstimate simulate_training(const PilotBook& book, const ChannelRealization& chan,
                              const PowerProfile& powers, Rng& rng, TrainingOptions options = {});

/// sqrt(sum_j gamma_{k j} beta_{bs k j} + 1/K) where "user k of cell j" is
/// whoever holds pilot k there.
double alpha_asymptotic(const BetaTensor& beta, const PowerProfile& powers,
                        const PilotAssignment& assignment, std::size_t pilot, std::size_t bs);

double alpha_asymptotic(const BetaTensor& beta, const PowerProfile& powers, std::size_t pilot,
                        std::size_t bs);

struct AlphaConvergenceRow {
  std::size_t antennas = 0;
  double median_abs_error = 0.0;  // |alpha_hat^2 - alpha^2| over trials, pilots and BSs
  double mean_abs_error = 0.0;
};

/// Draws `trials` channel + training realizations per antenna count and
/// tabulates the deviation of alpha_hat^2 from its limit.
std::vector<AlphaConvergenceRow> check_alpha_convergence(const BetaTensor& beta,
                                                         const PowerProfile& powers,
                                                         std::span<const std::size_t> antenna_counts,
                                                         std::size_t trials, Rng& rng);

/// Raw dump of every ghat[bs], bs-major, each matrix row-major, each entry a
/// little-endian (re, im) pair of IEEE-754 doubles. No header.
void write_csi_binary(std::ostream& out, const CsiEstimate& csi);
CsiEstimate read_csi_binary(std::istream& in, std::size_t cells, std::size_t pilots,
                            std::size_t antennas);

}  // namespace mmimo
