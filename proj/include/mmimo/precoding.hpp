#pragma once

// Finite-N matched-filter and zero-forcing precoders, downlink transmission
// and empirical SINR / uncoded BER measurement.

#include <cstdint>
#include <span>
#include <vector>

#include "mmimo/channel.hpp"

namespace mmimo {

/// columns[bs] is N x K; column k is the unit-norm beam for the stream on
/// pilot k (it serves whichever user of `bs` holds that pilot).
struct Precoder {
  std::vector<CMatrix> columns;

  std::size_t cells() const noexcept { return columns.size(); }
};

enum class PrecoderKind { MatchedFilter, ZeroForcing };

/// p_k = ghat_k^H / ||ghat_k||.
Precoder mf_precoder(const CsiEstimate& csi);

/// Columns of ghat^H (ghat ghat^H)^-1, each normalized. Throws
/// SingularMatrixError when the Gram matrix's reciprocal condition number
/// drops below `min_rcond`.
Precoder zf_precoder(const CsiEstimate& csi, double min_rcond = 1e-12);

Precoder make_precoder(PrecoderKind kind, const CsiEstimate& csi);

/// Gray-mapped 4-QAM: bit 0 -> sign of the real part, bit 1 -> sign of the
/// imaginary part (0 -> +, 1 -> -). Points are (+-1 +- i) / sqrt(2).
cplx qam4_modulate(std::uint8_t bits);
std::uint8_t qam4_detect(cplx received);

struct SymbolFrame {
  CellGrid<cplx> x;             // symbol intended for (cell, user)
  CellGrid<std::uint8_t> bits;  // its 2-bit label
};

SymbolFrame draw_symbols(std::size_t cells, std::size_t users, Rng& rng);

/// Row u: user u of `cell`. Column bs * K + k: coefficient on the symbol that
/// base station `bs` sends on pilot k, i.e. sqrt(phi) g_{bs,u,cell} p_{bs,k}.
CMatrix effective_gains(const Precoder& precoder, const ChannelRealization& chan, const PowerProfile& powers,
                        const PilotAssignment& assignment, std::size_t cell);

struct DownlinkOptions {
  bool noise = true;
};

/// r(cell, user) = sum over every base station and stream of the effective
/// gain times the transmitted symbol, plus CN(0, 1) receiver noise.
CellGrid<cplx> simulate_downlink(const Precoder& precoder, const ChannelRealization& chan,
                                 const PowerProfile& powers, const PilotAssignment& assignment,
                                 const SymbolFrame& frame, Rng& rng, DownlinkOptions options = {});

/// Paired received samples and the symbols that were sent to one user.
struct LinkObservations {
  std::vector<cplx> received;
  std::vector<cplx> sent;

  void add(cplx r, cplx x) {
    received.push_back(r);
    sent.push_back(x);
  }
};

struct EmpiricalLinkMetrics {
  double sinr = 0.0;  // linear
  double ber = 0.0;
  double ber_real = 0.0;
  double ber_imag = 0.0;
  std::size_t trials = 0;
};

/// Signal gain c = mean(r x*) / mean(|x|^2); SINR = |c|^2 / mean|r - c x|^2.
/// BER by quadrant-sign detection of r against the sent labels.
EmpiricalLinkMetrics empirical_metrics(const LinkObservations& obs);

}  // namespace mmimo
