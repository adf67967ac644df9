// teq -- temporal equilibrium analysis toolkit
//
// Turn-based two-player zero-sum parity games: attractors, Zielonka's
// algorithm with memoryless strategies (min-even convention), the
// coalition-vs-deviator sequentialisation, and punishment regions.

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "teq/game.hpp"

namespace teq::solver {

inline constexpr std::size_t kNoChoice = std::numeric_limits<std::size_t>::max();

/// H = (V0, V1, E, α); Player 0 wins a play iff the minimum priority seen
/// infinitely often is even.
struct TurnBasedParityGame {
  std::size_t num_vertices = 0;
  std::vector<char> owner;  // 0 or 1 per vertex
  std::vector<std::vector<std::size_t>> succ;
  std::vector<int> priority;
  std::vector<std::string> names;  // optional, for exports

  /// Totality and shape; throws std::invalid_argument.
  void validate() const;
};

/// Determinate partition with memoryless strategies: strategy[v] is the
/// chosen successor when v is owned by the player winning at v, kNoChoice
/// otherwise.
struct WinningRegions {
  std::vector<char> winner;
  std::vector<std::size_t> strategy;
};

/// Least set A ⊇ target from which `player` can force reaching target.
std::vector<std::size_t> attractor(const TurnBasedParityGame& g, int player,
                                   const std::vector<std::size_t>& target);

/// Zielonka's algorithm; strategies are certified internally (fixing the
/// winner's choices leaves the opponent no cycle of their parity).
WinningRegions zielonka(const TurnBasedParityGame& g);

/// Sequentialisation of a concurrent parity game with respect to player j:
/// Player 0 (coalition −j) picks an available partial profile at each
/// state, Player 1 (player j) answers with an own action; both derived
/// vertices carry priority α_j(s) + 1.
struct Sequentialisation {
  TurnBasedParityGame game;
  /// Vertices 0..St-1 are the product states (Player 0).  Vertex St+k is
  /// the Player-1 vertex (v1_state[k], v1_partial[k]); the partial profile
  /// stores kNoChoice in player j's slot.
  std::vector<std::size_t> v1_state;
  std::vector<game::JointAction> v1_partial;
};

Sequentialisation sequentialise(const game::ParityGame& g, std::size_t j);

/// Pun_j and a memoryless punishing profile for the coalition.
struct PunishmentResult {
  std::vector<char> region;  // per parity-game state
  /// Partial profile ā_{−j} chosen at each region state (j slot kNoChoice).
  std::map<std::size_t, game::JointAction> punish;
};

PunishmentResult punishment_region(const game::ParityGame& g, std::size_t j);

/// PGSolver-style line format: `id priority owner successors "name";`.
std::string to_pgsolver(const TurnBasedParityGame& g);

}  // namespace teq::solver
