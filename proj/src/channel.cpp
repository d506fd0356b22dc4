#include "mmimo/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "mmimo/errors.hpp"

namespace mmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_powers(const PowerProfile& powers, std::size_t cells, std::size_t users) {
  if (powers.gamma.cells() != cells || powers.gamma.users() != users || !powers.gamma.same_shape(powers.phi) ||
      !powers.gamma.same_shape(powers.phi_max)) {
    throw ContractViolation("power profile shape does not match the scenario");
  }
}

void check_assignment(const PilotAssignment& a, std::size_t cells, std::size_t users) {
  if (a.cells() != cells || a.users() != users || !a.valid()) {
    throw ContractViolation("pilot assignment shape does not match the scenario");
  }
}

Eigen::MatrixXd norms_to_alpha(const std::vector<CMatrix>& ghat) {
  const auto cells = static_cast<Eigen::Index>(ghat.size());
  const auto pilots = ghat.empty() ? 0 : ghat.front().rows();
  const double n = ghat.empty() ? 1.0 : static_cast<double>(ghat.front().cols());
  Eigen::MatrixXd alpha(pilots, cells);
  for (Eigen::Index l = 0; l < cells; ++l) {
    for (Eigen::Index k = 0; k < pilots; ++k) {
      alpha(k, l) = ghat[static_cast<std::size_t>(l)].row(k).norm() / std::sqrt(n);
    }
  }
  return alpha;
}

void write_le_double(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>(bits & 0xffu);
    bits >>= 8;
  }
  out.write(bytes, 8);
}

double read_le_double(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw ContractViolation("CSI dump is truncated");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

}  // namespace

PilotBook make_pilot_book(std::size_t users) {
  if (users < 1) throw ContractViolation("pilot book needs K >= 1");
  const auto k = static_cast<Eigen::Index>(users);
  PilotBook book;
  book.psi.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) {
      // Reduce the exponent mod K so small-K books are exact (+-1 entries).
      const auto phase_index = static_cast<double>((i * c) % k);
      const double angle = -2.0 * kPi * phase_index / static_cast<double>(k);
      const double re = std::cos(angle);
      const double im = std::sin(angle);
      book.psi(i, c) = cplx(std::abs(re) < 1e-15 ? 0.0 : re, std::abs(im) < 1e-15 ? 0.0 : im);
    }
  }
  return book;
}

PowerProfile PowerProfile::uniform(std::size_t cells, std::size_t users, double gamma, double phi,
                                   double phi_max) {
  return {CellGrid<double>(cells, users, gamma), CellGrid<double>(cells, users, phi),
          CellGrid<double>(cells, users, phi_max)};
}

ChannelRealization::ChannelRealization(BetaTensor beta, std::size_t antennas, std::vector<CMatrix> h)
    : beta_(std::move(beta)), antennas_(antennas), h_(std::move(h)) {
  if (h_.size() != beta_.cells() * beta_.cells()) {
    throw ContractViolation("channel realization needs one H per (bs, cell) pair");
  }
  for (const auto& m : h_) {
    if (static_cast<std::size_t>(m.rows()) != beta_.users() || static_cast<std::size_t>(m.cols()) != antennas_) {
      throw ContractViolation("fast-fading block has the wrong shape");
    }
  }
}

CMatrix ChannelRealization::G(std::size_t bs, std::size_t cell) const {
  CMatrix out = H(bs, cell);
  for (std::size_t k = 0; k < users(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) *= std::sqrt(beta_(bs, k, cell));
  }
  return out;
}

Eigen::RowVectorXcd ChannelRealization::g(std::size_t bs, std::size_t user, std::size_t cell) const {
  return std::sqrt(beta_(bs, user, cell)) * H(bs, cell).row(static_cast<Eigen::Index>(user));
}

ChannelRealization draw_channel(const BetaTensor& beta, std::size_t antennas, Rng& rng) {
  if (antennas < 1) throw ContractViolation("need at least one antenna");
  const std::size_t cells = beta.cells();
  const auto users = static_cast<Eigen::Index>(beta.users());
  std::vector<CMatrix> h;
  h.reserve(cells * cells);
  for (std::size_t i = 0; i < cells * cells; ++i) {
    CMatrix m(users, static_cast<Eigen::Index>(antennas));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = complex_normal(rng);
    }
    h.push_back(std::move(m));
  }
  return ChannelRealization(beta, antennas, std::move(h));
}

CsiEstimate simulate_training(const PilotBook& book, const ChannelRealization& chan,
                              const PowerProfile& powers, const PilotAssignment& assignment, Rng& rng,
                              TrainingOptions options) {
  const std::size_t cells = chan.cells();
  const std::size_t users = chan.users();
  if (book.length() != users) throw ContractViolation("pilot length must equal users per cell");
  check_powers(powers, cells, users);
  check_assignment(assignment, cells, users);

  const auto k = static_cast<Eigen::Index>(users);
  const auto n = static_cast<Eigen::Index>(chan.antennas());
  const double inv_k = 1.0 / static_cast<double>(users);

  // Row u of the transmitted block for cell j: sqrt(gamma_u) times the pilot row
  // assigned to user u.
  std::vector<CMatrix> tx(cells, CMatrix(k, k));
  for (std::size_t j = 0; j < cells; ++j) {
    for (std::size_t pilot = 0; pilot < users; ++pilot) {
      const std::size_t u = assignment.user(j, pilot);
      tx[j].row(static_cast<Eigen::Index>(u)) =
          std::sqrt(powers.gamma(j, u)) * book.psi.row(static_cast<Eigen::Index>(pilot));
    }
  }

  CsiEstimate est;
  est.ghat.reserve(cells);
  const CMatrix psi_h = book.psi.adjoint();
  for (std::size_t l = 0; l < cells; ++l) {
    CMatrix y = CMatrix::Zero(n, k);
    for (std::size_t j = 0; j < cells; ++j) {
      y.noalias() += chan.G(l, j).transpose() * tx[j];
    }
    if (options.noise) {
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) y(r, c) += complex_normal(rng);
      }
    }
    CMatrix ghat_t = inv_k * (y * psi_h);
    est.ghat.push_back(ghat_t.transpose());
  }
  est.alpha = norms_to_alpha(est.ghat);
  return est;
}

CsiEstimate simulate_training(const PilotBook& book, const ChannelRealization& chan,
                              const PowerProfile& powers, Rng& rng, TrainingOptions options) {
  return simulate_training(book, chan, powers, PilotAssignment::identity(chan.cells(), chan.users()), rng,
                           options);
}

double alpha_asymptotic(const BetaTensor& beta, const PowerProfile& powers,
                        const PilotAssignment& assignment, std::size_t pilot, std::size_t bs) {
  const std::size_t cells = beta.cells();
  const std::size_t users = beta.users();
  if (pilot >= users || bs >= cells) throw ContractViolation("alpha index out of range");
  double sum = 1.0 / static_cast<double>(users);
  for (std::size_t j = 0; j < cells; ++j) {
    const std::size_t u = assignment.user(j, pilot);
    sum += powers.gamma(j, u) * beta(bs, u, j);
  }
  return std::sqrt(sum);
}

double alpha_asymptotic(const BetaTensor& beta, const PowerProfile& powers, std::size_t pilot,
                        std::size_t bs) {
  return alpha_asymptotic(beta, powers, PilotAssignment::identity(beta.cells(), beta.users()), pilot, bs);
}

std::vector<AlphaConvergenceRow> check_alpha_convergence(const BetaTensor& beta,
                                                         const PowerProfile& powers,
                                                         std::span<const std::size_t> antenna_counts,
                                                         std::size_t trials, Rng& rng) {
  if (trials < 1) throw ContractViolation("need at least one trial");
  const PilotBook book = make_pilot_book(beta.users());
  const auto assignment = PilotAssignment::identity(beta.cells(), beta.users());

  std::vector<AlphaConvergenceRow> table;
  for (std::size_t n : antenna_counts) {
    std::vector<double> errors;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto chan = draw_channel(beta, n, rng);
      const auto csi = simulate_training(book, chan, powers, assignment, rng);
      for (std::size_t l = 0; l < beta.cells(); ++l) {
        for (std::size_t k = 0; k < beta.users(); ++k) {
          const double limit = alpha_asymptotic(beta, powers, assignment, k, l);
          const double a = csi.alpha(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
          errors.push_back(std::abs(a * a - limit * limit));
        }
      }
    }
    AlphaConvergenceRow row;
    row.antennas = n;
    double sum = 0.0;
    for (double e : errors) sum += e;
    row.mean_abs_error = sum / static_cast<double>(errors.size());
    auto mid = errors.begin() + static_cast<std::ptrdiff_t>(errors.size() / 2);
    std::nth_element(errors.begin(), mid, errors.end());
    row.median_abs_error = *mid;
    table.push_back(row);
  }
  return table;
}

void write_csi_binary(std::ostream& out, const CsiEstimate& csi) {
  for (const auto& m : csi.ghat) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        write_le_double(out, m(r, c).real());
        write_le_double(out, m(r, c).imag());
      }
    }
  }
}

CsiEstimate read_csi_binary(std::istream& in, std::size_t cells, std::size_t pilots,
                            std::size_t antennas) {
  CsiEstimate csi;
  for (std::size_t l = 0; l < cells; ++l) {
    CMatrix m(static_cast<Eigen::Index>(pilots), static_cast<Eigen::Index>(antennas));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double re = read_le_double(in);
        const double im = read_le_double(in);
        m(r, c) = cplx(re, im);
      }
    }
    csi.ghat.push_back(std::move(m));
  }
  csi.alpha = norms_to_alpha(csi.ghat);
  return csi;
}

}  // namespace mmimo
