#include <doctest.h>

#include <cmath>

#include "mmimo/asymptotics.hpp"
#include "mmimo/errors.hpp"
#include "mmimo/precoding.hpp"

using namespace mmimo;

namespace {

CsiEstimate perfect_csi(const ChannelRealization& chan) {
  CsiEstimate csi;
  for (std::size_t l = 0; l < chan.cells(); ++l) csi.ghat.push_back(chan.G(l, l));
  csi.alpha = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(chan.users()), static_cast<Eigen::Index>(chan.cells()));
  return csi;
}

}  // namespace

TEST_CASE("precoder columns are unit norm") {
  Rng rng = make_stream(1, 0);
  BetaTensor beta(3, 4, 0.3);
  for (int t = 0; t < 10; ++t) {
    const auto chan = draw_channel(beta, 16, rng);
    const auto csi = simulate_training(make_pilot_book(4), chan, PowerProfile::uniform(3, 4, 10, 1, 1), rng);
    for (auto kind : {PrecoderKind::MatchedFilter, PrecoderKind::ZeroForcing}) {
      const auto p = make_precoder(kind, csi);
      for (const auto& m : p.columns) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) CHECK(m.col(c).norm() == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("mf is the normalized conjugate and scale invariant") {
  Rng rng = make_stream(2, 0);
  BetaTensor beta(1, 2, 1.0);
  const auto chan = draw_channel(beta, 8, rng);
  const auto csi = perfect_csi(chan);
  const auto p = mf_precoder(csi);
  for (std::size_t k = 0; k < 2; ++k) {
    Eigen::VectorXcd expect = chan.g(0, k, 0).adjoint();
    expect /= expect.norm();
    CHECK((p.columns[0].col(static_cast<Eigen::Index>(k)) - expect).norm() < 1e-12);
  }
  CsiEstimate scaled = csi;
  scaled.ghat[0] *= 3.7;
  CHECK((mf_precoder(scaled).columns[0] - p.columns[0]).norm() < 1e-12);
}

TEST_CASE("zf nulls intra-cell interference") {
  Rng rng = make_stream(3, 0);
  BetaTensor beta(1, 4, 1.0);
  const auto chan = draw_channel(beta, 8, rng);
  const auto csi = perfect_csi(chan);
  const CMatrix prod = csi.ghat[0] * zf_precoder(csi).columns[0];
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      if (r != c) CHECK(std::abs(prod(r, c)) < 1e-10 * std::abs(prod(r, r)));
    }
  }
}

TEST_CASE("zf with one user equals mf") {
  Rng rng = make_stream(4, 0);
  BetaTensor beta(2, 1, 0.5);
  const auto chan = draw_channel(beta, 6, rng);
  const auto csi = simulate_training(make_pilot_book(1), chan, PowerProfile::uniform(2, 1, 10, 1, 1), rng);
  const auto mf = mf_precoder(csi);
  const auto zf = zf_precoder(csi);
  for (std::size_t l = 0; l < 2; ++l) CHECK((mf.columns[l] - zf.columns[l]).norm() < 1e-12);
}

TEST_CASE("zf rejects singular or undersized csi") {
  CsiEstimate csi;
  CMatrix g(2, 2);
  g << cplx(1, 0), cplx(2, 0), cplx(2, 0), cplx(4, 0);
  csi.ghat.push_back(g);
  csi.alpha = Eigen::MatrixXd::Ones(2, 1);
  try {
    zf_precoder(csi);
    FAIL("expected a singular matrix error");
  } catch (const SingularMatrixError& e) {
    CHECK(e.rcond() < 1e-12);
  }
  csi.ghat[0] = CMatrix::Ones(3, 2);
  CHECK_THROWS_AS(zf_precoder(csi), SingularMatrixError);
  csi.ghat[0] = CMatrix::Zero(2, 4);
  CHECK_THROWS_AS(mf_precoder(csi), DegenerateInputError);
}

TEST_CASE("4-qam gray mapping") {
  for (std::uint8_t b = 0; b < 4; ++b) {
    const cplx x = qam4_modulate(b);
    CHECK(std::norm(x) == doctest::Approx(1.0));
    CHECK(qam4_detect(x) == b);
  }
  CHECK(qam4_modulate(0).real() > 0);
  CHECK(qam4_modulate(1).real() < 0);
  CHECK(qam4_modulate(2).imag() < 0);
  Rng rng = make_stream(5, 0);
  double power = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto f = draw_symbols(2, 3, rng);
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t u = 0; u < 3; ++u) {
        power += std::norm(f.x(j, u));
        CHECK(qam4_modulate(f.bits(j, u)) == f.x(j, u));
      }
    }
  }
  CHECK(power / 6000.0 == doctest::Approx(1.0));
}

TEST_CASE("single-link downlink algebra") {
  Rng rng = make_stream(6, 0);
  BetaTensor beta(1, 1, 0.8);
  const std::size_t n = 64;
  const auto chan = draw_channel(beta, n, rng);
  const auto csi = perfect_csi(chan);
  const auto powers = PowerProfile::uniform(1, 1, 1, 2.0, 2.0);
  const auto assignment = PilotAssignment::identity(1, 1);
  const auto frame = draw_symbols(1, 1, rng);
  const auto r = simulate_downlink(mf_precoder(csi), chan, powers, assignment, frame, rng, {false});
  const double h = chan.H(0, 0).row(0).norm();
  const cplx expect = std::sqrt(2.0 * 0.8) * h * frame.x(0, 0);
  CHECK(std::abs(r(0, 0) - expect) < 1e-10);

  // Zero power: noise only, and the same seed reproduces it.
  const auto silent = PowerProfile::uniform(1, 1, 1, 0.0, 0.0);
  Rng a = make_stream(6, 1), b = make_stream(6, 1);
  const auto ra = simulate_downlink(mf_precoder(csi), chan, silent, assignment, frame, a);
  const auto rb = simulate_downlink(mf_precoder(csi), chan, silent, assignment, frame, b);
  CHECK(ra == rb);
  Rng c = make_stream(6, 1);
  CHECK(ra(0, 0) == complex_normal(c));
}

TEST_CASE("effective gains match simulate_downlink") {
  Rng rng = make_stream(7, 0);
  BetaTensor beta(3, 2, 0.2);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t k = 0; k < 2; ++k) beta(l, k, l) = 1.0;
  }
  const auto chan = draw_channel(beta, 12, rng);
  const auto powers = PowerProfile::uniform(3, 2, 10, 3, 3);
  auto assignment = PilotAssignment::identity(3, 2);
  assignment.set_cell(2, {1, 0});
  const auto csi = simulate_training(make_pilot_book(2), chan, powers, assignment, rng);
  const auto p = zf_precoder(csi);
  const auto frame = draw_symbols(3, 2, rng);
  const auto r = simulate_downlink(p, chan, powers, assignment, frame, rng, {false});
  Eigen::VectorXcd x(6);
  for (std::size_t bs = 0; bs < 3; ++bs) {
    for (std::size_t k = 0; k < 2; ++k) x(static_cast<Eigen::Index>(bs * 2 + k)) = frame.x(bs, assignment.user(bs, k));
  }
  for (std::size_t cell = 0; cell < 3; ++cell) {
    const Eigen::VectorXcd rx = effective_gains(p, chan, powers, assignment, cell) * x;
    for (std::size_t u = 0; u < 2; ++u) CHECK(std::abs(rx(static_cast<Eigen::Index>(u)) - r(cell, u)) < 1e-12);
  }
}

TEST_CASE("empirical metrics") {
  LinkObservations clean;
  Rng rng = make_stream(8, 0);
  for (int t = 0; t < 2000; ++t) {
    const cplx x = qam4_modulate(static_cast<std::uint8_t>(rng() & 3u));
    clean.add(5.0 * x + 0.01 * complex_normal(rng), x);
  }
  const auto m = empirical_metrics(clean);
  CHECK(m.ber == 0.0);
  CHECK(to_db(m.sinr) == doctest::Approx(to_db(25.0 / 1e-4)).epsilon(0.01));

  // SINR of a known additive-noise link.
  LinkObservations noisy;
  for (int t = 0; t < 200000; ++t) {
    const cplx x = qam4_modulate(static_cast<std::uint8_t>(rng() & 3u));
    noisy.add(2.0 * x + complex_normal(rng), x);
  }
  const auto n = empirical_metrics(noisy);
  CHECK(n.sinr == doctest::Approx(4.0).epsilon(0.02));
  CHECK(n.ber_real == doctest::Approx(n.ber_imag).epsilon(0.1));
  CHECK_THROWS_AS(empirical_metrics(LinkObservations{}), ContractViolation);
}

TEST_CASE("mf and zf agree with the limit at very large N") {
  // Two drops' worth of a 3-cell system, per user within 1 dB.
  Rng rng = make_stream(9, 0);
  const std::size_t L = 3, K = 2, n = 16384;
  BetaTensor beta(L, K);
  std::uniform_real_distribution<double> cross(0.05, 0.3), own(0.7, 1.0);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < L; ++j) beta(l, k, j) = l == j ? own(rng) : cross(rng);
    }
  }
  const auto powers = PowerProfile::uniform(L, K, 10, 10, 10);
  const auto assignment = PilotAssignment::identity(L, K);
  std::vector<LinkObservations> mf(K), zf(K);
  for (int f = 0; f < 3; ++f) {
    const auto chan = draw_channel(beta, n, rng);
    const auto csi = simulate_training(make_pilot_book(K), chan, powers, assignment, rng);
    const auto pm = mf_precoder(csi);
    const auto pz = zf_precoder(csi);
    for (int s = 0; s < 200; ++s) {
      const auto frame = draw_symbols(L, K, rng);
      Rng r1 = make_stream(9, 100 + static_cast<std::uint64_t>(f * 1000 + s));
      Rng r2 = r1;
      const auto rm = simulate_downlink(pm, chan, powers, assignment, frame, r1);
      const auto rz = simulate_downlink(pz, chan, powers, assignment, frame, r2);
      for (std::size_t u = 0; u < K; ++u) {
        mf[u].add(rm(0, u), frame.x(0, u));
        zf[u].add(rz(0, u), frame.x(0, u));
      }
    }
  }
  for (std::size_t u = 0; u < K; ++u) {
    const double bound = to_db(asymptotic_sinr(beta, powers, assignment, 0, u));
    const double m = to_db(empirical_metrics(mf[u]).sinr);
    const double z = to_db(empirical_metrics(zf[u]).sinr);
    CHECK(std::abs(m - z) < 1.0);
    CHECK(std::abs(m - bound) < 1.0);
    CHECK(std::abs(z - bound) < 1.0);
  }
}
