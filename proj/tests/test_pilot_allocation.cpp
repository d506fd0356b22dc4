#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "mmimo/asymptotics.hpp"
#include "mmimo/errors.hpp"
#include "mmimo/pilot_allocation.hpp"
#include "oracles.hpp"

using namespace mmimo;

namespace {

const Criterion kOptimizing[] = {Criterion::MinBer, Criterion::MaxSinr, Criterion::MinimaxBer,
                                 Criterion::MaxminSinr};

}  // namespace

TEST_CASE("criterion names round-trip") {
  for (auto c : {Criterion::Random, Criterion::MinBer, Criterion::MaxSinr, Criterion::MinimaxBer,
                 Criterion::MaxminSinr}) {
    CHECK(parse_criterion(to_string(c)) == c);
  }
  CHECK_FALSE(parse_criterion("best").has_value());
  CHECK(is_minimized(Criterion::MinBer));
  CHECK_FALSE(is_minimized(Criterion::MaxminSinr));
}

TEST_CASE("permutation enumeration") {
  CHECK(enumerate_permutations(1) == std::vector<Permutation>{{0}});
  const auto p3 = enumerate_permutations(3);
  REQUIRE(p3.size() == 6);
  CHECK(p3.front() == Permutation{0, 1, 2});
  CHECK(p3.back() == Permutation{2, 1, 0});
  CHECK(std::is_sorted(p3.begin(), p3.end()));
  CHECK(enumerate_permutations(4).size() == 24);
  CHECK(enumerate_permutations(8).size() == 40320);
  CHECK_THROWS_AS(enumerate_permutations(9), ResourceGuardError);
}

TEST_CASE("single-user cells have one permutation") {
  Rng rng = make_stream(1, 0);
  const auto in = oracle::random_instance(3, 1, rng);
  for (auto c : kOptimizing) {
    const auto r = allocate_cell(c, 1, in.beta, in.powers, in.assignment);
    CHECK(r.index == 0);
    CHECK(r.score == evaluate_assignment({0}, c, 1, in.beta, in.powers, in.assignment));
  }
}

TEST_CASE("identical users are interchangeable") {
  Rng rng = make_stream(2, 0);
  auto in = oracle::random_instance(3, 2, rng);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t j = 0; j < 3; ++j) in.beta(l, 1, j) = in.beta(l, 0, j);
  }
  for (std::size_t j = 0; j < 3; ++j) {
    in.powers.gamma(j, 1) = in.powers.gamma(j, 0);
    in.powers.phi(j, 1) = in.powers.phi(j, 0);
  }
  for (auto c : kOptimizing) {
    CHECK(evaluate_assignment({0, 1}, c, 0, in.beta, in.powers, in.assignment) ==
          doctest::Approx(evaluate_assignment({1, 0}, c, 0, in.beta, in.powers, in.assignment)));
  }
}

TEST_CASE("ties go to the identity") {
  // Users in cell 0 identical, everything else symmetric too.
  BetaTensor beta(2, 2, 0.1);
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t k = 0; k < 2; ++k) beta(l, k, l) = 1.0;
  }
  const auto p = PowerProfile::uniform(2, 2, 10, 1, 1);
  const auto a = PilotAssignment::identity(2, 2);
  for (auto c : kOptimizing) CHECK(allocate_cell(c, 0, beta, p, a).index == 0);
  // every permutation gives BER 0
  CHECK(evaluate_assignment({1, 0}, Criterion::MinBer, 0, beta, p, a) == 0.0);
  CHECK(allocate_cell(Criterion::MinBer, 0, beta, p, a).perm == Permutation{0, 1});
  CHECK(allocate_cell(Criterion::Random, 0, beta, p, a).index == 0);
}

TEST_CASE("allocation dominates every permutation and includes the identity") {
  Rng rng = make_stream(3, 0);
  for (int t = 0; t < 10; ++t) {
    const auto in = oracle::scenario_drop(1, 4, rng);
    for (auto c : kOptimizing) {
      const auto best = allocate_cell(c, 0, in.beta, in.powers, in.assignment);
      CHECK(best.alpha_evaluations == 24 * 4 * 7);
      for (const auto& perm : oracle::all_permutations(4)) {
        const double v = oracle::cell_score(c, perm, 0, in.beta, in.powers, in.assignment);
        if (is_minimized(c)) {
          CHECK(best.score <= v + 1e-12);
        } else {
          CHECK(best.score >= v * (1 - 1e-12));
        }
      }
      CHECK(best.score == doctest::Approx(oracle::cell_score(c, best.perm, 0, in.beta, in.powers, in.assignment)));
    }
  }
}

TEST_CASE("maxmin allocation raises the worst SINR in most drops") {
  Rng rng = make_stream(4, 0);
  int improved = 0;
  const int drops = 200;
  for (int t = 0; t < drops; ++t) {
    const auto in = oracle::scenario_drop(1, 4, rng);
    const double before = evaluate_assignment(in.assignment.cell(0), Criterion::MaxminSinr, 0, in.beta, in.powers,
                                              in.assignment);
    const auto best = allocate_cell(Criterion::MaxminSinr, 0, in.beta, in.powers, in.assignment);
    CHECK(best.score >= before);
    if (best.score > before) ++improved;
  }
  CHECK(improved > drops / 2);
}

TEST_CASE("evaluation count scales as K! K L") {
  Rng rng = make_stream(5, 0);
  for (std::size_t K : {1, 2, 3, 4}) {
    for (std::size_t L : {1, 2, 5}) {
      const auto in = oracle::random_instance(L, K, rng);
      std::size_t fact = 1;
      for (std::size_t i = 2; i <= K; ++i) fact *= i;
      CHECK(allocate_cell(Criterion::MaxSinr, 0, in.beta, in.powers, in.assignment).alpha_evaluations == fact * K * L);
    }
  }
}

TEST_CASE("best response on one cell converges in one round") {
  Rng rng = make_stream(6, 0);
  const auto in = oracle::random_instance(1, 3, rng);
  const auto g = best_response_rounds(Criterion::MinBer, in.beta, in.powers, in.assignment);
  CHECK(g.trace.converged);
  CHECK(g.trace.rounds() == 1);
  CHECK(g.trace.changed_per_round[0] == 0);
}

TEST_CASE("symmetric state does not move") {
  BetaTensor beta(3, 2, 0.1);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t k = 0; k < 2; ++k) beta(l, k, l) = 1.0;
  }
  const auto p = PowerProfile::uniform(3, 2, 10, 1, 1);
  const auto g = best_response_rounds(Criterion::MaxminSinr, beta, p, PilotAssignment::identity(3, 2));
  CHECK(g.trace.converged);
  CHECK(g.trace.rounds() == 1);
  CHECK(g.assignment == PilotAssignment::identity(3, 2));
}

TEST_CASE("best-response fixed points are Nash equilibria (joint oracle)") {
  Rng rng = make_stream(7, 0);
  for (int t = 0; t < 50; ++t) {
    const auto in = oracle::random_instance(2, 2, rng, 1.5);
    for (auto c : kOptimizing) {
      const auto g = best_response_rounds(c, in.beta, in.powers, in.assignment);
      CHECK(g.assignment.valid());
      if (g.trace.converged) CHECK(oracle::is_nash(c, in.beta, in.powers, g.assignment));
    }
  }
}

TEST_CASE("moves strictly improve the mover's own score") {
  Rng rng = make_stream(8, 0);
  for (int t = 0; t < 20; ++t) {
    const auto in = oracle::scenario_drop(1, 4, rng);
    for (auto c : kOptimizing) {
      const auto g = best_response_rounds(c, in.beta, in.powers, in.assignment);
      std::size_t moves = 0;
      for (const auto& s : g.trace.steps) {
        if (!s.changed) {
          CHECK(s.score_after == s.score_before);
          continue;
        }
        ++moves;
        CHECK(better(c, s.score_after, s.score_before));
      }
      std::size_t counted = 0;
      for (auto n : g.trace.changed_per_round) counted += n;
      CHECK(counted == moves);
      CHECK(g.trace.steps.size() == 7 * g.trace.rounds());
      if (g.trace.converged) CHECK(g.trace.changed_per_round.back() == 0);
    }
  }
}

TEST_CASE("system potential") {
  Rng rng = make_stream(9, 0);
  const auto in = oracle::random_instance(3, 2, rng);
  double sum = 0.0, lo = 1e300;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t u = 0; u < 2; ++u) {
      sum += oracle::ber(in.beta, in.powers, in.assignment, j, u);
      lo = std::min(lo, oracle::sinr(in.beta, in.powers, in.assignment, j, u));
    }
  }
  CHECK(system_potential(Criterion::MinBer, in.beta, in.powers, in.assignment) == doctest::Approx(sum / 6));
  CHECK(system_potential(Criterion::Random, in.beta, in.powers, in.assignment) == doctest::Approx(sum / 6));
  CHECK(system_potential(Criterion::MaxminSinr, in.beta, in.powers, in.assignment) == doctest::Approx(lo));
}

TEST_CASE("assignment json and trace csv") {
  auto a = PilotAssignment::identity(2, 3);
  a.set_cell(1, {2, 0, 1});
  std::stringstream js;
  write_assignment_json(js, a);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc["cells"].size() == 2);
  CHECK(doc["cells"][1]["cell"] == 1);
  CHECK(doc["cells"][1]["pilots"]["0"] == 2);
  CHECK(doc["cells"][1]["pilots"]["2"] == 1);

  GameTrace t;
  t.steps.push_back({1, 0, true, 0.1, 0.05, 0.2, {1, 0}});
  t.steps.push_back({1, 1, false, 0.1, 0.1, 0.2, {0, 1}});
  std::stringstream csv;
  write_game_trace_csv(csv, t);
  CHECK(csv.str() == "round,cell,changed,potential\n1,0,1,0.2\n1,1,0,0.2\n");
}

TEST_CASE("contract checks") {
  Rng rng = make_stream(10, 0);
  const auto in = oracle::random_instance(2, 2, rng);
  CHECK_THROWS_AS(allocate_cell(Criterion::MinBer, 2, in.beta, in.powers, in.assignment), ContractViolation);
  CHECK_THROWS_AS(best_response_rounds(Criterion::MinBer, in.beta, in.powers, in.assignment, 0), ContractViolation);
  CHECK_THROWS_AS(best_response_rounds(Criterion::MinBer, in.beta, in.powers, PilotAssignment::identity(3, 2)),
                  ContractViolation);
  auto a = in.assignment;
  CHECK_THROWS_AS(a.set_cell(0, {0, 0}), ContractViolation);
}
