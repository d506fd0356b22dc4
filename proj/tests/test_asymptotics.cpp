#include <doctest.h>

#include <cmath>
#include <set>

#include "mmimo/asymptotics.hpp"
#include "mmimo/errors.hpp"
#include "oracles.hpp"

using namespace mmimo;

namespace {

struct TwoCell {
  BetaTensor beta{2, 1, 0.25};
  PowerProfile powers = PowerProfile::uniform(2, 1, 10, 1, 1);
  PilotAssignment a = PilotAssignment::identity(2, 1);
  TwoCell() {
    beta(0, 0, 0) = 1.0;
    beta(1, 0, 1) = 1.0;
  }
};

}  // namespace

TEST_CASE("symmetric two-cell fixture") {
  TwoCell t;
  const auto alpha = AlphaTable::compute(t.beta, t.powers, t.a);
  CHECK(alpha.squared(0, 0) == doctest::Approx(13.5));
  CHECK(alpha.squared(0, 1) == doctest::Approx(13.5));
  CHECK(asymptotic_sinr(t.beta, t.powers, t.a, 0, 0) == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(to_db(asymptotic_sinr(t.beta, t.powers, t.a, 1, 0)) == doctest::Approx(12.04).epsilon(1e-3));
  const auto amp = link_amplitudes(t.beta, t.powers, t.a, alpha, 0, 0);
  CHECK(amp.signal == doctest::Approx(0.2722).epsilon(1e-3));
  CHECK(amp.interference[0] == doctest::Approx(0.0680).epsilon(2e-3));
  CHECK(asymptotic_ber(t.beta, t.powers, t.a, 0, 0) == 0.0);

  Rng rng = make_stream(1, 0);
  CHECK(ber_bruteforce_oracle(t.beta, t.powers, t.a, 0, 0, 20000, rng) == 0.0);
}

TEST_CASE("strong single interferer gives BER one half") {
  TwoCell t;
  t.beta(1, 0, 0) = 3.0;  // cell 1's BS reaches user 0 of cell 0 strongly
  CHECK(asymptotic_ber(t.beta, t.powers, t.a, 0, 0) == 0.5);
  Rng rng = make_stream(2, 0);
  const double o = ber_bruteforce_oracle(t.beta, t.powers, t.a, 0, 0, 100000, rng);
  CHECK(std::abs(o - 0.5) < 3.0 * std::sqrt(0.25 / 200000.0));
  CHECK_THROWS_AS(ber_bruteforce_oracle(t.beta, t.powers, t.a, 0, 0, 100, rng), ContractViolation);
}

TEST_CASE("phi scaling leaves SINR and BER unchanged") {
  TwoCell t;
  auto scaled = t.powers;
  for (double& v : scaled.phi.data()) v *= 7.0;
  CHECK(asymptotic_sinr(t.beta, scaled, t.a, 0, 0) == doctest::Approx(16.0));
  CHECK(asymptotic_ber(t.beta, scaled, t.a, 0, 0) == 0.0);
}

TEST_CASE("isolated cell has infinite SINR and zero BER") {
  BetaTensor beta(1, 2, 1.0);
  const auto p = PowerProfile::uniform(1, 2, 10, 1, 1);
  const auto a = PilotAssignment::identity(1, 2);
  CHECK(std::isinf(asymptotic_sinr(beta, p, a, 0, 1)));
  CHECK(asymptotic_ber(beta, p, a, 0, 1) == 0.0);
}

TEST_CASE("only 4-qam is supported") {
  TwoCell t;
  CHECK_THROWS_AS(asymptotic_ber(t.beta, t.powers, t.a, 0, 0, 16), DomainError);
}

TEST_CASE("sign matrix") {
  const auto s2 = build_sign_matrix(2, 0);
  REQUIRE(s2.rows() == 2);
  CHECK(s2(0, 0) == 1);
  CHECK(s2(0, 1) == 1);
  CHECK(s2(1, 0) == 1);
  CHECK(s2(1, 1) == -1);
  CHECK(build_sign_matrix(3, 1).rows() == 4);
  for (std::size_t L = 1; L <= 8; ++L) {
    for (std::size_t serving = 0; serving < L; ++serving) {
      const auto s = build_sign_matrix(L, serving);
      int col_sum = 0;
      std::set<std::vector<int>> rows;
      for (std::size_t r = 0; r < s.rows(); ++r) {
        col_sum += s(r, serving);
        std::vector<int> row;
        for (std::size_t c = 0; c < L; ++c) row.push_back(s(r, c));
        rows.insert(row);
      }
      CHECK(col_sum == static_cast<int>(std::size_t{1} << (L - 1)));
      CHECK(rows.size() == s.rows());
    }
  }
  CHECK_THROWS_AS(build_sign_matrix(21, 0), ResourceGuardError);
  CHECK_THROWS_AS(build_sign_matrix(3, 3), ContractViolation);
}

TEST_CASE("fast BER agrees with the sign-matrix form and the oracle") {
  Rng rng = make_stream(3, 0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t L = 2 + static_cast<std::size_t>(t % 6);
    auto in = oracle::random_instance(L, 2, rng);
    const auto alpha = AlphaTable::compute(in.beta, in.powers, in.assignment);
    for (std::size_t u = 0; u < 2; ++u) {
      const auto a = link_amplitudes(in.beta, in.powers, in.assignment, alpha, 0, u);
      std::vector<double> all;
      std::size_t next = 0;
      for (std::size_t j = 0; j < L; ++j) all.push_back(j == 0 ? a.signal : a.interference[next++]);
      const double fast = ber_from_amplitudes(a.signal, a.interference);
      CHECK(fast == ber_from_sign_matrix(all, build_sign_matrix(L, 0)));
      CHECK(fast == doctest::Approx(oracle::ber(in.beta, in.powers, in.assignment, 0, u)));
      CHECK(asymptotic_sinr(in.beta, in.powers, in.assignment, 0, u) ==
            doctest::Approx(oracle::sinr(in.beta, in.powers, in.assignment, 0, u)).epsilon(1e-12));
      // quantized to 2^-(L-1), never above one half
      const double scaled = fast * std::pow(2.0, static_cast<double>(L - 1));
      CHECK(scaled == std::round(scaled));
      CHECK(fast <= 0.5);
    }
  }
}

TEST_CASE("higher SINR does not imply lower BER") {
  // Frozen from a random search over 3-cell, 2-user instances.
  const double b[3][2][3] = {{{0.33, 0.74, 0.66}, {0.12, 0.33, 0.21}},
                             {{0.52, 0.41, 0.2}, {0.55, 0.68, 0.37}},
                             {{0.84, 0.15, 0.1}, {0.72, 0.59, 0.76}}};
  BetaTensor beta(3, 2);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t j = 0; j < 3; ++j) beta(l, k, j) = b[l][k][j];
    }
  }
  const auto p = PowerProfile::uniform(3, 2, 10, 10, 10);
  const auto a = PilotAssignment::identity(3, 2);
  const double sinr_a = asymptotic_sinr(beta, p, a, 0, 0);
  const double sinr_b = asymptotic_sinr(beta, p, a, 0, 1);
  CHECK(sinr_a == doctest::Approx(0.0721374622).epsilon(1e-8));
  CHECK(sinr_b == doctest::Approx(0.0474024509).epsilon(1e-8));
  CHECK(sinr_a > sinr_b);
  CHECK(asymptotic_ber(beta, p, a, 0, 0) == 0.5);
  CHECK(asymptotic_ber(beta, p, a, 0, 1) == 0.25);
}

TEST_CASE("user rate") {
  const FrameConfig f;
  CHECK(user_rate(1.0, f, 1) == doctest::Approx(7.2727e6).epsilon(1e-4));
  CHECK(user_rate(0.0, f, 1) == 0.0);
  CHECK(user_rate(16.0, f, 3) == doctest::Approx(9.909e6).epsilon(1e-3));
  CHECK(user_rate(kInfiniteSinr, f, 1) == doctest::Approx(user_rate(1e4, f, 1)));
  CHECK(user_rate(kInfiniteSinr, f, 1, 20.0) == doctest::Approx(user_rate(100.0, f, 1)));
  CHECK_THROWS_AS(user_rate(-1.0, f, 1), DomainError);
}

TEST_CASE("report bundles per-user values") {
  Rng rng = make_stream(4, 0);
  const auto in = oracle::random_instance(3, 2, rng);
  const auto rep = evaluate_asymptotics(in.beta, in.powers, in.assignment, FrameConfig{}, 1);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t u = 0; u < 2; ++u) {
      CHECK(rep.sinr(j, u) == asymptotic_sinr(in.beta, in.powers, in.assignment, j, u));
      CHECK(rep.ber(j, u) == asymptotic_ber(in.beta, in.powers, in.assignment, j, u));
      CHECK(rep.rate(j, u) == user_rate(rep.sinr(j, u), FrameConfig{}, 1));
    }
  }
}
