#pragma once

// Exhaustive per-cell pilot assignment under four criteria, and decentralized
// best-response rounds across cells.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "mmimo/channel.hpp"
#include "mmimo/pilot_assignment.hpp"
#include "mmimo/scenario.hpp"

namespace mmimo {

enum class Criterion { Random, MinBer, MaxSinr, MinimaxBer, MaxminSinr };

std::string_view to_string(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view name);

/// True for the BER criteria (smaller score is better).
bool is_minimized(Criterion c);

/// `a` strictly better than `b` under `c`.
bool better(Criterion c, double a, double b);

inline constexpr std::size_t kMaxExhaustiveUsers = 8;

/// All K! permutations in lexicographic order (identity first).
std::vector<Permutation> enumerate_permutations(std::size_t users);

/// Score of cell `cell` when it uses `perm` and every other cell keeps its
/// pilots from `frozen`: mean BER, mean SINR, worst BER or worst SINR over the
/// cell's K users. The Random criterion scores every permutation 0.
double evaluate_assignment(const Permutation& perm, Criterion criterion, std::size_t cell,
                           const BetaTensor& beta, const PowerProfile& powers, const PilotAssignment& frozen);

struct CellAllocation {
  std::size_t index = 0;  // into enumerate_permutations(K)
  Permutation perm;
  double score = 0.0;
  std::size_t alpha_evaluations = 0;
};

/// Best of all K! permutations for `cell`; ties go to the lowest index.
CellAllocation allocate_cell(Criterion criterion, std::size_t cell, const BetaTensor& beta,
                             const PowerProfile& powers, const PilotAssignment& state);

struct GameStep {
  std::size_t round = 0;  // 1-based
  std::size_t cell = 0;
  bool changed = false;
  double score_before = 0.0;  // the cell's own criterion
  double score_after = 0.0;
  double potential = 0.0;  // system-wide, after this step
  Permutation perm;        // the cell's permutation after this step
};

struct GameTrace {
  std::vector<GameStep> steps;
  std::vector<std::size_t> changed_per_round;
  std::vector<double> potential_per_round;
  bool converged = false;
  std::size_t alpha_evaluations = 0;

  std::size_t rounds() const noexcept { return changed_per_round.size(); }
};

struct GameResult {
  PilotAssignment assignment;
  GameTrace trace;
};

/// System-wide potential: mean BER over all K L users for BER criteria and
/// Random, minimum SINR over all users for SINR criteria.
double system_potential(Criterion criterion, const BetaTensor& beta, const PowerProfile& powers,
                        const PilotAssignment& assignment);

inline constexpr std::size_t kDefaultMaxRounds = 20;

/// Cells take turns in index order. A cell switches to its best permutation
/// only when that strictly improves its own score; the game stops after a
/// full round with no switch, or after `max_rounds`.
GameResult best_response_rounds(Criterion criterion, const BetaTensor& beta, const PowerProfile& powers,
                                PilotAssignment initial, std::size_t max_rounds = kDefaultMaxRounds);

/// {"cells": [{"cell": 0, "pilots": {"0": user, ...}}, ...]}
void write_assignment_json(std::ostream& out, const PilotAssignment& assignment);
/// round,cell,changed,potential
void write_game_trace_csv(std::ostream& out, const GameTrace& trace);

}  // namespace mmimo
