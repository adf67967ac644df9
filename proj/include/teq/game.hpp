// teq -- temporal equilibrium analysis toolkit
//
// Concurrent game structures, LTL and parity games, the goal-automata
// product, outcome computation for transducer strategy profiles, a
// bisimulation checker, and the explicit-arena input format.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "teq/automata.hpp"
#include "teq/ltl.hpp"

namespace teq::game {

/// A joint action: one action id per player, in player order.
using JointAction = std::vector<std::size_t>;

/// Concurrent game structure M = (N, (Ac_i), St, s0, tr): per-state
/// available actions for every player and a deterministic transition
/// function defined exactly on the available joint actions.
struct ConcurrentGameStructure {
  std::vector<std::string> players;
  /// Global action names per player; ids index into these lists.
  std::vector<std::vector<std::string>> actions;
  std::vector<std::string> state_names;
  std::size_t initial = 0;
  /// avail[s][i] = ascending action ids available to player i at s (nonempty).
  std::vector<std::vector<std::vector<std::size_t>>> avail;
  /// tr[s] maps each available joint action to the successor state.
  std::vector<std::map<JointAction, std::size_t>> tr;

  std::size_t num_players() const { return players.size(); }
  std::size_t num_states() const { return avail.size(); }

  /// All available joint actions at s (Cartesian product of avail[s][i]).
  std::vector<JointAction> joint_actions(std::size_t s) const;

  /// Successor under an available joint action; throws on undefined input.
  std::size_t successor(std::size_t s, const JointAction& a) const;

  /// Enforce the structural invariants (nonempty Ac_i(s); tr total and
  /// exact on available joint actions).  Throws std::invalid_argument.
  void validate() const;
};

/// LTL game: structure + labelling λ + one goal per player.
struct LtlGame {
  ConcurrentGameStructure structure;
  std::vector<ltl::LabelSet> labels;   // per state
  std::vector<ltl::FormulaPtr> goals;  // per player
};

/// Parity game: structure + one min-even priority function per player.
/// Instances built by product_game also record, per state, the original
/// LTL-game state and the goal-automaton states it encodes.
struct ParityGame {
  ConcurrentGameStructure structure;
  std::vector<ltl::LabelSet> labels;         // per state (carried through)
  std::vector<std::vector<int>> priorities;  // priorities[i][state]
  std::vector<std::size_t> base_state;       // product state -> LTL-game state
  std::vector<std::vector<std::size_t>> automaton_state;  // [state][player]
};

/// Finite-state strategy for one player: internal states with an output
/// action each, advanced on the observed joint action.
struct StrategyTransducer {
  std::size_t num_states = 0;
  std::size_t initial = 0;
  std::vector<std::size_t> output;                    // internal -> action id
  std::vector<std::map<JointAction, std::size_t>> next;  // internal transition
};

/// A transducer emitted an unavailable action (or has no transition for the
/// observed joint action).
struct InvalidStrategy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ultimately periodic play: (state, joint action) steps; the last cycle
/// step returns to the first cycle state.
struct Lasso {
  std::vector<std::pair<std::size_t, JointAction>> prefix;
  std::vector<std::pair<std::size_t, JointAction>> cycle;  // nonempty

  /// States visited, prefix then cycle.
  std::vector<std::size_t> state_path() const;
};

/// The label word read along a lasso (input for ltl::eval_lasso).
ltl::UltimatelyPeriodicWord label_word(const Lasso& lasso,
                                       const std::vector<ltl::LabelSet>& labels);

/// Check a lasso against a structure: transitions consistent with tr and
/// the cycle closes.
bool lasso_consistent(const ConcurrentGameStructure& m, const Lasso& lasso);

/// Product of an LTL game with one deterministic parity automaton per goal:
/// states (s, q_1, …, q_n) built reachably, transitions advance each q_i by
/// ρ_i(q_i, λ(s)), priorities α_i'(s, q⃗) = α_i(q_i).  Throws when more than
/// `cap` product states would be created.
ParityGame product_game(const LtlGame& g,
                        const std::vector<automata::DeterministicParityAutomaton>& dpws,
                        std::size_t cap = 1000000);

/// The unique play induced by one transducer per player, returned as the
/// lasso detected when (structure state, internal states) repeats.
Lasso run_profile(const ConcurrentGameStructure& m,
                  const std::vector<StrategyTransducer>& profile);

/// Greatest-bisimulation check between two labelled structures with the
/// same player set and action alphabets, by partition refinement on the
/// disjoint union (splitting on label and per-joint-action successor block).
bool check_bisimilar(const ConcurrentGameStructure& a,
                     const std::vector<ltl::LabelSet>& la,
                     const ConcurrentGameStructure& b,
                     const std::vector<ltl::LabelSet>& lb);

/// Parse the explicit-arena JSON format: players, per-player action names,
/// states with label sets, initial state, transition rows with `*`
/// wildcards, and one goal formula per player.  Wildcard rows must expand
/// to a deterministic, total relation.  Throws std::runtime_error.
LtlGame parse_arena(const std::string& text);

}  // namespace teq::game
