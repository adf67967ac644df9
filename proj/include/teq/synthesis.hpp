// teq -- temporal equilibrium analysis toolkit
//
// Strategy synthesis: turn an equilibrium witness lasso plus punishment
// strategies into one finite-state transducer per player, and validate a
// profile as a Nash equilibrium by searching for beneficial deviations in
// the induced one-player games.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "teq/automata.hpp"
#include "teq/game.hpp"
#include "teq/solver.hpp"

namespace teq::synthesis {

/// Deterministic generator of the witness action-profile run: one internal
/// state per lasso position, no input.
struct WitnessTransducer {
  std::size_t num_states = 0;
  std::size_t initial = 0;
  std::vector<std::size_t> next;           // position -> position
  std::vector<game::JointAction> output;   // position -> joint action
  std::vector<std::size_t> state;          // position -> game state
};

WitnessTransducer witness_transducer(const game::Lasso& witness);

/// Build the equilibrium profile for winner set W on a parity game: each
/// player's transducer tracks (game state, witness position, deviation
/// flag), plays the witness on-path, and on a unilateral deviation by a
/// loser j switches permanently to the coalition's memoryless punishment
/// strategy against j.  Simultaneous deviations blame the lowest-id
/// deviating loser; deviations with no loser involved fall back to
/// punishing the lowest-id loser (or resynchronise when there are none).
/// Throws std::invalid_argument when the witness is not punishing-secure
/// for some loser.
std::vector<game::StrategyTransducer> synthesize_profile(
    const game::ParityGame& g, const std::vector<std::size_t>& winners,
    const game::Lasso& witness,
    const std::map<std::size_t, solver::PunishmentResult>& pun);

/// Is the profile a Nash equilibrium?  Computes the outcome, then for each
/// player whose goal fails checks (exactly, via the product of the arena
/// with the other players' transducers and the player's goal automaton)
/// whether some deviation satisfies the goal.
bool validate_equilibrium(const game::LtlGame& g,
                          const std::vector<game::StrategyTransducer>& profile);

/// Same check with parity goals: player i prefers runs whose minimum
/// infinitely-recurring priority under priorities[i] is even.
bool validate_equilibrium(const game::ParityGame& g,
                          const std::vector<game::StrategyTransducer>& profile);

/// Strategy export: JSON (states, initial, output per state, transitions
/// keyed by observed joint action) and DOT for inspection.  `actions`
/// names this player's actions; observed joint actions are rendered as id
/// tuples.
std::string transducer_to_json(const game::StrategyTransducer& t,
                               const std::vector<std::string>& actions);
std::string transducer_to_dot(const game::StrategyTransducer& t,
                              const std::vector<std::string>& actions);

}  // namespace teq::synthesis
