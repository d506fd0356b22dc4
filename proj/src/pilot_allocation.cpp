#include "mmimo/pilot_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "mmimo/asymptotics.hpp"
#include "mmimo/errors.hpp"

namespace mmimo {

namespace {

double score_cell(Criterion criterion, std::size_t cell, const BetaTensor& beta, const PowerProfile& powers,
                  const PilotAssignment& assignment, const AlphaTable& alpha) {
  const std::size_t users = beta.users();
  double acc = 0.0;
  switch (criterion) {
    case Criterion::Random:
      return 0.0;
    case Criterion::MinBer:
    case Criterion::MaxSinr:
      break;
    case Criterion::MinimaxBer:
      acc = -std::numeric_limits<double>::infinity();
      break;
    case Criterion::MaxminSinr:
      acc = std::numeric_limits<double>::infinity();
      break;
  }
  for (std::size_t u = 0; u < users; ++u) {
    const auto a = link_amplitudes(beta, powers, assignment, alpha, cell, u);
    switch (criterion) {
      case Criterion::MinBer:
        acc += ber_from_amplitudes(a.signal, a.interference);
        break;
      case Criterion::MaxSinr:
        acc += sinr_from_amplitudes(a);
        break;
      case Criterion::MinimaxBer:
        acc = std::max(acc, ber_from_amplitudes(a.signal, a.interference));
        break;
      case Criterion::MaxminSinr:
        acc = std::min(acc, sinr_from_amplitudes(a));
        break;
      case Criterion::Random:
        break;
    }
  }
  if (criterion == Criterion::MinBer || criterion == Criterion::MaxSinr) acc /= static_cast<double>(users);
  return acc;
}

}  // namespace

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::Random:
      return "random";
    case Criterion::MinBer:
      return "minber";
    case Criterion::MaxSinr:
      return "maxsinr";
    case Criterion::MinimaxBer:
      return "minimaxber";
    case Criterion::MaxminSinr:
      return "maxminsinr";
  }
  return "unknown";
}

std::optional<Criterion> parse_criterion(std::string_view name) {
  for (auto c : {Criterion::Random, Criterion::MinBer, Criterion::MaxSinr, Criterion::MinimaxBer,
                 Criterion::MaxminSinr}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

bool is_minimized(Criterion c) { return c == Criterion::MinBer || c == Criterion::MinimaxBer; }

bool better(Criterion c, double a, double b) { return is_minimized(c) ? a < b : a > b; }

std::vector<Permutation> enumerate_permutations(std::size_t users) {
  if (users < 1) throw ContractViolation("need K >= 1");
  if (users > kMaxExhaustiveUsers) {
    throw ResourceGuardError(fmt::format(
        "K = {} gives {}! permutations; exhaustive search is limited to K <= {} (a heuristic is needed beyond)",
        users, users, kMaxExhaustiveUsers));
  }
  std::vector<Permutation> out;
  Permutation p(users);
  std::iota(p.begin(), p.end(), std::size_t{0});
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

double evaluate_assignment(const Permutation& perm, Criterion criterion, std::size_t cell,
                           const BetaTensor& beta, const PowerProfile& powers, const PilotAssignment& frozen) {
  if (cell >= beta.cells()) throw ContractViolation("cell index out of range");
  PilotAssignment trial = frozen;
  trial.set_cell(cell, perm);
  if (criterion == Criterion::Random) return 0.0;
  const auto alpha = AlphaTable::compute(beta, powers, trial);
  return score_cell(criterion, cell, beta, powers, trial, alpha);
}

CellAllocation allocate_cell(Criterion criterion, std::size_t cell, const BetaTensor& beta,
                             const PowerProfile& powers, const PilotAssignment& state) {
  if (cell >= beta.cells()) throw ContractViolation("cell index out of range");
  const auto perms = enumerate_permutations(beta.users());
  CellAllocation best;
  PilotAssignment trial = state;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    trial.set_cell(cell, perms[i]);
    double score = 0.0;
    if (criterion != Criterion::Random) {
      // alpha for every (pilot, bs): K L evaluations per permutation.
      const auto alpha = AlphaTable::compute(beta, powers, trial);
      best.alpha_evaluations += alpha.evaluations();
      score = score_cell(criterion, cell, beta, powers, trial, alpha);
    }
    if (i == 0 || better(criterion, score, best.score)) {
      best.index = i;
      best.score = score;
    }
  }
  best.perm = perms[best.index];
  return best;
}

double system_potential(Criterion criterion, const BetaTensor& beta, const PowerProfile& powers,
                        const PilotAssignment& assignment) {
  const auto alpha = AlphaTable::compute(beta, powers, assignment);
  const bool sinr_based = criterion == Criterion::MaxSinr || criterion == Criterion::MaxminSinr;
  double acc = sinr_based ? std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t j = 0; j < beta.cells(); ++j) {
    for (std::size_t u = 0; u < beta.users(); ++u) {
      const auto a = link_amplitudes(beta, powers, assignment, alpha, j, u);
      if (sinr_based) {
        acc = std::min(acc, sinr_from_amplitudes(a));
      } else {
        acc += ber_from_amplitudes(a.signal, a.interference);
      }
    }
  }
  return sinr_based ? acc : acc / static_cast<double>(beta.cells() * beta.users());
}

GameResult best_response_rounds(Criterion criterion, const BetaTensor& beta, const PowerProfile& powers,
                                PilotAssignment initial, std::size_t max_rounds) {
  if (max_rounds < 1) throw ContractViolation("need max_rounds >= 1");
  if (initial.cells() != beta.cells() || initial.users() != beta.users() || !initial.valid()) {
    throw ContractViolation("initial assignment does not match the scenario");
  }
  GameResult res{std::move(initial), {}};
  auto& trace = res.trace;

  for (std::size_t round = 1; round <= max_rounds; ++round) {
    std::size_t changed = 0;
    for (std::size_t cell = 0; cell < beta.cells(); ++cell) {
      GameStep step;
      step.round = round;
      step.cell = cell;
      if (criterion != Criterion::Random) {
        step.score_before = evaluate_assignment(res.assignment.cell(cell), criterion, cell, beta, powers,
                                                res.assignment);
        const auto best = allocate_cell(criterion, cell, beta, powers, res.assignment);
        trace.alpha_evaluations += best.alpha_evaluations;
        if (better(criterion, best.score, step.score_before)) {
          res.assignment.set_cell(cell, best.perm);
          step.changed = true;
          step.score_after = best.score;
          ++changed;
        } else {
          step.score_after = step.score_before;
        }
      }
      step.perm = res.assignment.cell(cell);
      step.potential = system_potential(criterion, beta, powers, res.assignment);
      trace.steps.push_back(step);
    }
    trace.changed_per_round.push_back(changed);
    trace.potential_per_round.push_back(trace.steps.back().potential);
    if (changed == 0) {
      trace.converged = true;
      break;
    }
  }
  return res;
}

void write_assignment_json(std::ostream& out, const PilotAssignment& assignment) {
  nlohmann::json doc;
  doc["cells"] = nlohmann::json::array();
  for (std::size_t j = 0; j < assignment.cells(); ++j) {
    nlohmann::json pilots = nlohmann::json::object();
    for (std::size_t k = 0; k < assignment.users(); ++k) pilots[std::to_string(k)] = assignment.user(j, k);
    doc["cells"].push_back({{"cell", j}, {"pilots", pilots}});
  }
  out << doc.dump(2) << '\n';
}

void write_game_trace_csv(std::ostream& out, const GameTrace& trace) {
  out << "round,cell,changed,potential\n";
  for (const auto& s : trace.steps) {
    fmt::print(out, "{},{},{},{:.10g}\n", s.round, s.cell, s.changed ? 1 : 0, s.potential);
  }
}

}  // namespace mmimo
