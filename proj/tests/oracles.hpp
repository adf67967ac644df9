// Brute-force oracles shared by the equilibrium suite and the acceptance
// gate: exhaustive Nash-equilibrium existence on tiny games.

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "teq/equilibrium.hpp"
#include "teq/game.hpp"
#include "teq/solver.hpp"

namespace teq::testgen {

inline game::ParityGame goal_product(const game::LtlGame& g) {
  std::vector<automata::DeterministicParityAutomaton> dpws;
  for (const auto& goal : g.goals) dpws.push_back(automata::ltl_to_dpw(goal));
  return game::product_game(g, dpws);
}

/// Is there a reachable closed walk whose vertex set is even-minimal for
/// every winner's priorities?  Decided exactly by enumerating subsets of
/// each strongly connected component; independent of the Streett
/// machinery.  Throws when an SCC is too large to enumerate.
inline bool cycle_set_exists(const std::vector<std::vector<std::size_t>>& succ,
                             const std::vector<char>& reachable,
                             const game::ParityGame& g,
                             const std::vector<std::size_t>& vertex_state,
                             const std::vector<std::size_t>& winners) {
  const std::size_t n = succ.size();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t src = 0; src < n; ++src) {
    if (!reachable[src]) continue;
    std::vector<std::size_t> stack{src};
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : succ[v])
        if (reachable[w] && !reach[src][w]) {
          reach[src][w] = 1;
          stack.push_back(w);
        }
    }
  }
  std::vector<char> assigned(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (!reachable[root] || assigned[root]) continue;
    std::vector<std::size_t> scc;
    for (std::size_t v = 0; v < n; ++v)
      if (reachable[v] && reach[root][v] && reach[v][root]) {
        scc.push_back(v);
        assigned[v] = 1;
      }
    if (scc.empty()) continue;  // root lies on no cycle
    if (scc.size() > 20) throw std::runtime_error("oracle: SCC too large");
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << scc.size()); ++mask) {
      std::vector<std::size_t> c;
      for (std::size_t k = 0; k < scc.size(); ++k)
        if (mask & (std::uint64_t{1} << k)) c.push_back(scc[k]);
      auto closed_walk = [&]() {
        std::vector<char> in(n, 0), fwd(n, 0), bwd(n, 0);
        for (std::size_t v : c) in[v] = 1;
        std::vector<std::vector<std::size_t>> rev(n);
        for (std::size_t u : c)
          for (std::size_t w : succ[u])
            if (in[w]) rev[w].push_back(u);
        auto bfs = [&](std::vector<char>& mark,
                       const std::vector<std::vector<std::size_t>>& edges) {
          std::vector<std::size_t> stack{c[0]};
          mark[c[0]] = 1;
          while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : edges[v])
              if (in[w] && !mark[w]) mark[w] = 1, stack.push_back(w);
          }
        };
        bfs(fwd, succ);
        bfs(bwd, rev);
        for (std::size_t v : c)
          if (!fwd[v] || !bwd[v]) return false;
        if (c.size() == 1) {
          for (std::size_t w : succ[c[0]])
            if (w == c[0]) return true;
          return false;
        }
        return true;
      };
      if (!closed_walk()) continue;
      bool good = true;
      for (std::size_t i : winners) {
        int minp = std::numeric_limits<int>::max();
        for (std::size_t v : c)
          minp = std::min(minp, g.priorities[i][vertex_state[v]]);
        if (minp % 2 != 0) {
          good = false;
          break;
        }
      }
      if (good) return true;
    }
  }
  return false;
}

/// Brute-force Nash-equilibrium existence on the goal-automata product:
/// for every winner guess, punishment regions, a direct deviation-security
/// move filter, and an exhaustive cycle-set search replace the engine's
/// restriction + Streett path.  (Punishment regions come from the solver,
/// which the solver suite validates against memoryless enumeration.)
inline bool brute_force_ne(const game::LtlGame& g) {
  game::ParityGame par = goal_product(g);
  const auto& m = par.structure;
  const std::size_t n = m.num_players();
  std::map<std::size_t, solver::PunishmentResult> pun;
  for (std::size_t j = 0; j < n; ++j)
    pun.emplace(j, solver::punishment_region(par, j));

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> winners, losers;
    for (std::size_t i = 0; i < n; ++i)
      (mask & (std::uint64_t{1} << i) ? winners : losers).push_back(i);

    std::vector<char> alive(m.num_states(), 1);
    for (std::size_t j : losers)
      for (std::size_t s = 0; s < m.num_states(); ++s)
        if (!pun.at(j).region[s]) alive[s] = 0;
    if (!alive[m.initial]) continue;

    std::vector<std::vector<std::size_t>> succ(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      if (!alive[s]) continue;
      for (const game::JointAction& a : m.joint_actions(s)) {
        bool secure = true;
        for (std::size_t j : losers) {
          game::JointAction dev = a;
          for (std::size_t alt : m.avail[s][j]) {
            dev[j] = alt;
            if (!pun.at(j).region[m.tr[s].at(dev)]) secure = false;
          }
        }
        std::size_t t = m.tr[s].at(a);
        if (secure && alive[t]) succ[s].push_back(t);
      }
    }
    std::vector<char> reachable(m.num_states(), 0);
    std::vector<std::size_t> stack{m.initial};
    reachable[m.initial] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : succ[v])
        if (!reachable[w]) reachable[w] = 1, stack.push_back(w);
    }
    std::vector<std::size_t> identity(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s) identity[s] = s;
    if (cycle_set_exists(succ, reachable, par, identity, winners)) return true;
  }
  return false;
}

}  // namespace teq::testgen
