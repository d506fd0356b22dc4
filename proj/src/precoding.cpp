#include "mmimo/precoding.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mmimo/errors.hpp"

namespace mmimo {

namespace {

void normalize_columns(CMatrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double n = m.col(c).norm();
    if (!(n > 0.0)) throw DegenerateInputError(fmt::format("precoder column {} has zero norm", c));
    m.col(c) /= n;
  }
}

}  // namespace

Precoder mf_precoder(const CsiEstimate& csi) {
  Precoder p;
  p.columns.reserve(csi.cells());
  for (const auto& ghat : csi.ghat) {
    CMatrix w = ghat.adjoint();
    normalize_columns(w);
    p.columns.push_back(std::move(w));
  }
  return p;
}

Precoder zf_precoder(const CsiEstimate& csi, double min_rcond) {
  Precoder p;
  p.columns.reserve(csi.cells());
  for (std::size_t l = 0; l < csi.cells(); ++l) {
    const CMatrix& ghat = csi.ghat[l];
    if (ghat.rows() > ghat.cols()) {
      throw SingularMatrixError(fmt::format("ZF at BS {}: {} streams exceed {} antennas", l, ghat.rows(), ghat.cols()),
                                0.0);
    }
    const CMatrix gram = ghat * ghat.adjoint();
    Eigen::LLT<CMatrix> llt(gram);
    const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (!(rcond >= min_rcond)) {
      throw SingularMatrixError(fmt::format("ZF at BS {}: Gram matrix is singular (rcond {:.3e})", l, rcond), rcond);
    }
    CMatrix w = ghat.adjoint() * llt.solve(CMatrix::Identity(gram.rows(), gram.cols()));
    normalize_columns(w);
    p.columns.push_back(std::move(w));
  }
  return p;
}

Precoder make_precoder(PrecoderKind kind, const CsiEstimate& csi) {
  return kind == PrecoderKind::MatchedFilter ? mf_precoder(csi) : zf_precoder(csi);
}

cplx qam4_modulate(std::uint8_t bits) {
  const double re = (bits & 0x1u) ? -M_SQRT1_2 : M_SQRT1_2;
  const double im = (bits & 0x2u) ? -M_SQRT1_2 : M_SQRT1_2;
  return {re, im};
}

std::uint8_t qam4_detect(cplx received) {
  std::uint8_t bits = 0;
  if (received.real() < 0.0) bits |= 0x1u;
  if (received.imag() < 0.0) bits |= 0x2u;
  return bits;
}

SymbolFrame draw_symbols(std::size_t cells, std::size_t users, Rng& rng) {
  SymbolFrame f{CellGrid<cplx>(cells, users), CellGrid<std::uint8_t>(cells, users)};
  for (std::size_t j = 0; j < cells; ++j) {
    for (std::size_t u = 0; u < users; ++u) {
      const auto b = static_cast<std::uint8_t>(rng() & 0x3u);
      f.bits(j, u) = b;
      f.x(j, u) = qam4_modulate(b);
    }
  }
  return f;
}

CMatrix effective_gains(const Precoder& precoder, const ChannelRealization& chan, const PowerProfile& powers,
                        const PilotAssignment& assignment, std::size_t cell) {
  const std::size_t cells = chan.cells();
  const std::size_t users = chan.users();
  if (precoder.cells() != cells || assignment.cells() != cells || powers.cells() != cells) {
    throw ContractViolation("downlink inputs disagree on the number of cells");
  }
  const auto k = static_cast<Eigen::Index>(users);
  CMatrix gains(k, static_cast<Eigen::Index>(cells * users));
  for (std::size_t bs = 0; bs < cells; ++bs) {
    const CMatrix& p = precoder.columns[bs];
    if (p.rows() != static_cast<Eigen::Index>(chan.antennas()) || p.cols() != k) {
      throw ContractViolation("precoder shape does not match the channel");
    }
    // K x K block: row u = g_{bs,u,cell} times every beam of `bs`.
    CMatrix block = chan.G(bs, cell) * p;
    for (std::size_t pilot = 0; pilot < users; ++pilot) {
      const double amp = std::sqrt(powers.phi(bs, assignment.user(bs, pilot)));
      gains.col(static_cast<Eigen::Index>(bs * users + pilot)) = amp * block.col(static_cast<Eigen::Index>(pilot));
    }
  }
  return gains;
}

CellGrid<cplx> simulate_downlink(const Precoder& precoder, const ChannelRealization& chan,
                                 const PowerProfile& powers, const PilotAssignment& assignment,
                                 const SymbolFrame& frame, Rng& rng, DownlinkOptions options) {
  const std::size_t cells = chan.cells();
  const std::size_t users = chan.users();
  if (frame.x.cells() != cells || frame.x.users() != users) {
    throw ContractViolation("symbol frame shape does not match the channel");
  }
  Eigen::VectorXcd stream(static_cast<Eigen::Index>(cells * users));
  for (std::size_t bs = 0; bs < cells; ++bs) {
    for (std::size_t pilot = 0; pilot < users; ++pilot) {
      stream(static_cast<Eigen::Index>(bs * users + pilot)) = frame.x(bs, assignment.user(bs, pilot));
    }
  }
  CellGrid<cplx> r(cells, users);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const Eigen::VectorXcd rx = effective_gains(precoder, chan, powers, assignment, cell) * stream;
    for (std::size_t u = 0; u < users; ++u) {
      r(cell, u) = rx(static_cast<Eigen::Index>(u)) + (options.noise ? complex_normal(rng) : cplx{});
    }
  }
  return r;
}

EmpiricalLinkMetrics empirical_metrics(const LinkObservations& obs) {
  const std::size_t n = obs.received.size();
  if (n == 0 || obs.sent.size() != n) throw ContractViolation("empirical metrics need paired, non-empty samples");

  cplx cross{};
  double energy = 0.0;
  std::size_t err_re = 0;
  std::size_t err_im = 0;
  for (std::size_t t = 0; t < n; ++t) {
    cross += obs.received[t] * std::conj(obs.sent[t]);
    energy += std::norm(obs.sent[t]);
    const std::uint8_t sent_bits = qam4_detect(obs.sent[t]);
    const std::uint8_t got_bits = qam4_detect(obs.received[t]);
    err_re += ((sent_bits ^ got_bits) & 0x1u) ? 1 : 0;
    err_im += ((sent_bits ^ got_bits) & 0x2u) ? 1 : 0;
  }
  const cplx gain = cross / energy;
  double residual = 0.0;
  for (std::size_t t = 0; t < n; ++t) residual += std::norm(obs.received[t] - gain * obs.sent[t]);
  residual /= static_cast<double>(n);

  EmpiricalLinkMetrics m;
  m.trials = n;
  m.sinr = residual > 0.0 ? std::norm(gain) / residual : std::numeric_limits<double>::infinity();
  m.ber_real = static_cast<double>(err_re) / static_cast<double>(n);
  m.ber_imag = static_cast<double>(err_im) / static_cast<double>(n);
  m.ber = 0.5 * (m.ber_real + m.ber_imag);
  return m;
}

}  // namespace mmimo
