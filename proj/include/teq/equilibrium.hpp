// teq -- temporal equilibrium analysis toolkit
//
// Core decision procedures: Nash-equilibrium non-emptiness over the
// goal-automata product, existential and universal equilibrium queries,
// the punishing-secure arena restriction, and the two-extra-player
// query-reduction gadget.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "teq/automata.hpp"
#include "teq/game.hpp"
#include "teq/ltl.hpp"
#include "teq/solver.hpp"

namespace teq::equilibrium {

struct Stats {
  std::size_t product_states = 0;
  std::size_t subsets_checked = 0;
  std::size_t solver_calls = 0;

  bool operator==(const Stats&) const = default;
};

/// Answer to a query.  On Yes (for a_nash: on No), `witness` is an
/// equilibrium lasso over the goal-automata product, `witness_base` its
/// projection onto the input game, and `winners` the guessed winner set:
/// every winner's goal holds on the witness and every unilateral deviation
/// of a non-winner lands in that player's punishment region.
struct Verdict {
  bool yes = false;
  std::vector<std::size_t> winners;  // ascending player ids
  std::optional<game::Lasso> witness;
  std::optional<game::Lasso> witness_base;
  Stats stats;
};

/// Arena after removing, for loser set L, every state outside
/// ∩_{j∈L} Pun_j and every joint action some unilateral L-deviation of
/// which escapes the deviator's punishment region.
struct RestrictedArena {
  std::vector<char> alive;                            // per product state
  std::vector<std::vector<game::JointAction>> moves;  // surviving moves
};

/// The initial state fell outside ∩_{j∈L} Pun_j: no equilibrium with this
/// loser set exists from the start state.
struct InitialStateEliminated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Punishment regions and strategies, cached per punished player.
using PunCache = std::map<std::size_t, solver::PunishmentResult>;

/// Resource limits and parallelism degree for the subset search.
struct Options {
  std::size_t max_product_states = 1000000;
  std::size_t max_automaton_states = 1000000;
  std::size_t jobs = 1;
};

/// Keep exactly the states and moves that are punishing-secure for every
/// j ∈ losers.  Requires pun to hold an entry for each loser.  Throws
/// InitialStateEliminated when the initial state dies.
RestrictedArena restrict_game(const game::ParityGame& g,
                              const std::vector<std::size_t>& losers,
                              const PunCache& pun);

/// One winner-set check: restrict the arena for L = N ∖ winners, then look
/// for a reachable lasso satisfying every winner's parity condition (as a
/// Streett condition over the restricted graph); when `query` is given the
/// search runs on the product with the query automaton and also enforces
/// its parity condition.  Missing punishment regions are computed into
/// `pun` (counted in stats->solver_calls).
std::optional<game::Lasso> find_ne_for_winners(
    const game::ParityGame& g, const std::vector<std::size_t>& winners,
    PunCache& pun, Stats* stats = nullptr,
    const automata::DeterministicParityAutomaton* query = nullptr);

/// Does the game admit any Nash equilibrium?  Winner sets are tried in
/// decreasing size, then lexicographically; the first hit is reported.
Verdict non_emptiness(const game::LtlGame& g, const Options& opt = {});

/// Is there a Nash equilibrium whose run satisfies phi?
Verdict e_nash(const game::LtlGame& g, const ltl::FormulaPtr& phi,
               const Options& opt = {});

/// Do all Nash equilibrium runs satisfy phi?  (Vacuously Yes without any
/// equilibrium.)  On No the verdict carries a counterexample equilibrium
/// lasso satisfying ¬phi.
Verdict a_nash(const game::LtlGame& g, const ltl::FormulaPtr& phi,
               const Options& opt = {});

/// Every unilateral deviation by player j from any position of the lasso
/// stays inside j's punishment region.
bool check_punishing_secure(const game::ParityGame& g, const game::Lasso& lasso,
                            std::size_t j, const solver::PunishmentResult& pun);

/// Reduction of the existential query to plain non-emptiness: two extra
/// players each control a fresh variable (set every step by a binary
/// choice, visible from the next state on) with goals phi ∨ X(p ↔ q) and
/// phi ∨ X ¬(p ↔ q).  The result has a Nash equilibrium iff some
/// equilibrium run of g satisfies phi.
game::LtlGame gadget_game(const game::LtlGame& g, const ltl::FormulaPtr& phi);

/// Map a product-game lasso onto the underlying game's states.
game::Lasso project_witness(const game::ParityGame& g, const game::Lasso& lasso);

/// JSON report: answer, winner names, the base-game witness lasso, stats.
/// `verdict_from_json` inverts it (the product-level witness is not part of
/// the serialised form).
std::string verdict_to_json(const Verdict& v, const game::LtlGame& g);
Verdict verdict_from_json(const std::string& text, const game::LtlGame& g);

}  // namespace teq::equilibrium
