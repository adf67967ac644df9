// teq -- temporal equilibrium analysis toolkit

#include "teq/solver.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace teq::solver {

void TurnBasedParityGame::validate() const {
  if (owner.size() != num_vertices || succ.size() != num_vertices ||
      priority.size() != num_vertices)
    throw std::invalid_argument("turn-based game: inconsistent tables");
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (succ[v].empty())
      throw std::invalid_argument("turn-based game: vertex without successor");
    for (std::size_t w : succ[v])
      if (w >= num_vertices)
        throw std::invalid_argument("turn-based game: edge out of range");
    if (owner[v] != 0 && owner[v] != 1)
      throw std::invalid_argument("turn-based game: bad owner");
  }
}

namespace {

/// Attractor of `target` for `player` inside the `alive` subgame.  Fills
/// `strategy` with the attracting move for player-owned vertices added on
/// the way (kept untouched elsewhere).
std::vector<char> attract(const TurnBasedParityGame& g, int player,
                          const std::vector<char>& alive,
                          const std::vector<char>& target,
                          std::vector<std::size_t>& strategy) {
  std::vector<char> in(g.num_vertices, 0);
  std::vector<std::size_t> degree(g.num_vertices, 0);
  std::queue<std::size_t> todo;
  // Reverse edges, restricted to the alive subgame.
  std::vector<std::vector<std::size_t>> pred(g.num_vertices);
  for (std::size_t v = 0; v < g.num_vertices; ++v) {
    if (!alive[v]) continue;
    for (std::size_t w : g.succ[v])
      if (alive[w]) {
        pred[w].push_back(v);
        ++degree[v];
      }
  }
  for (std::size_t v = 0; v < g.num_vertices; ++v)
    if (alive[v] && target[v]) in[v] = 1, todo.push(v);
  while (!todo.empty()) {
    std::size_t w = todo.front();
    todo.pop();
    for (std::size_t v : pred[w]) {
      if (in[v]) continue;
      if (g.owner[v] == player) {
        in[v] = 1;
        strategy[v] = w;
        todo.push(v);
      } else if (--degree[v] == 0) {
        in[v] = 1;
        todo.push(v);
      }
    }
  }
  return in;
}

struct Zielonka {
  const TurnBasedParityGame& g;
  std::vector<char> winner;
  std::vector<std::size_t> strategy;

  explicit Zielonka(const TurnBasedParityGame& game)
      : g(game),
        winner(game.num_vertices, 0),
        strategy(game.num_vertices, kNoChoice) {}

  void solve(const std::vector<char>& alive) {
    int min_pri = 1 << 30;
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      if (alive[v]) min_pri = std::min(min_pri, g.priority[v]);
    if (min_pri == 1 << 30) return;  // empty subgame

    const int sigma = min_pri % 2;  // favoured player at the minimum
    std::vector<char> top(g.num_vertices, 0);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      top[v] = alive[v] && g.priority[v] == min_pri;

    std::vector<std::size_t> attr_strat(g.num_vertices, kNoChoice);
    std::vector<char> a = attract(g, sigma, alive, top, attr_strat);

    std::vector<char> rest(g.num_vertices, 0);
    bool nonempty_rest = false;
    for (std::size_t v = 0; v < g.num_vertices; ++v) {
      rest[v] = alive[v] && !a[v];
      nonempty_rest = nonempty_rest || rest[v];
    }
    if (nonempty_rest) solve(rest);

    bool opponent_present = false;
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      if (rest[v] && winner[v] != sigma) opponent_present = true;

    if (!opponent_present) {
      // sigma wins the whole subgame: recursive strategies on `rest`,
      // attractor moves on a, any alive successor on top vertices.
      for (std::size_t v = 0; v < g.num_vertices; ++v) {
        if (!alive[v]) continue;
        winner[v] = static_cast<char>(sigma);
        if (g.owner[v] != sigma) {
          if (!rest[v]) strategy[v] = kNoChoice;
          continue;
        }
        if (rest[v]) continue;  // keep recursive strategy
        if (top[v]) {
          strategy[v] = kNoChoice;
          for (std::size_t w : g.succ[v])
            if (alive[w]) {
              strategy[v] = w;
              break;
            }
          assert(strategy[v] != kNoChoice);
        } else {
          strategy[v] = attr_strat[v];
        }
      }
      return;
    }

    // Opponent wins part of `rest`; their attractor leaves the subgame.
    std::vector<char> opp_win(g.num_vertices, 0);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      opp_win[v] = rest[v] && winner[v] != sigma;
    std::vector<std::size_t> opp_attr_strat(g.num_vertices, kNoChoice);
    std::vector<char> b = attract(g, 1 - sigma, alive, opp_win, opp_attr_strat);

    std::vector<char> remainder(g.num_vertices, 0);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      remainder[v] = alive[v] && !b[v];
    solve(remainder);

    for (std::size_t v = 0; v < g.num_vertices; ++v) {
      if (!alive[v] || !b[v]) continue;
      winner[v] = static_cast<char>(1 - sigma);
      if (g.owner[v] == 1 - sigma) {
        if (opp_win[v]) {
          // keep the strategy computed in the `rest` recursion
        } else {
          strategy[v] = opp_attr_strat[v];
        }
      } else {
        strategy[v] = kNoChoice;
      }
    }
  }
};

/// True iff the subgraph induced by fixing the declared winners' strategies
/// contains a cycle whose minimum priority has the given parity, reachable
/// within the given region.
bool has_cycle_with_parity(const TurnBasedParityGame& g,
                           const std::vector<char>& region,
                           const std::vector<std::vector<std::size_t>>& succ,
                           int parity) {
  // For each candidate minimum p of that parity: restrict to priority >= p,
  // look for a strongly connected set with an edge containing a p-vertex.
  std::vector<int> values;
  for (std::size_t v = 0; v < g.num_vertices; ++v)
    if (region[v] && g.priority[v] % 2 == parity) values.push_back(g.priority[v]);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  for (int p : values) {
    // Tarjan-free check: iterative DFS SCC via Kosaraju on the restriction.
    std::vector<char> ok(g.num_vertices, 0);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      ok[v] = region[v] && g.priority[v] >= p;
    // Kosaraju
    std::vector<std::size_t> order;
    std::vector<char> seen(g.num_vertices, 0);
    for (std::size_t root = 0; root < g.num_vertices; ++root) {
      if (!ok[root] || seen[root]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
      seen[root] = 1;
      while (!stack.empty()) {
        auto& [v, idx] = stack.back();
        if (idx < succ[v].size()) {
          std::size_t w = succ[v][idx++];
          if (ok[w] && !seen[w]) {
            seen[w] = 1;
            stack.emplace_back(w, 0);
          }
        } else {
          order.push_back(v);
          stack.pop_back();
        }
      }
    }
    std::vector<std::vector<std::size_t>> rev(g.num_vertices);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      if (ok[v])
        for (std::size_t w : succ[v])
          if (ok[w]) rev[w].push_back(v);
    std::vector<int> comp(g.num_vertices, -1);
    int ncomp = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (comp[*it] != -1) continue;
      int c = ncomp++;
      std::vector<std::size_t> stack{*it};
      comp[*it] = c;
      while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : rev[v])
          if (comp[w] == -1) {
            comp[w] = c;
            stack.push_back(w);
          }
      }
    }
    std::vector<char> has_edge(static_cast<std::size_t>(ncomp), 0);
    std::vector<char> has_p(static_cast<std::size_t>(ncomp), 0);
    for (std::size_t v = 0; v < g.num_vertices; ++v) {
      if (!ok[v]) continue;
      if (g.priority[v] == p) has_p[static_cast<std::size_t>(comp[v])] = 1;
      for (std::size_t w : succ[v])
        if (ok[w] && comp[w] == comp[v])
          has_edge[static_cast<std::size_t>(comp[v])] = 1;
    }
    for (int c = 0; c < ncomp; ++c)
      if (has_edge[static_cast<std::size_t>(c)] &&
          has_p[static_cast<std::size_t>(c)])
        return true;
  }
  return false;
}

void certify(const TurnBasedParityGame& g, const WinningRegions& w) {
  for (int player = 0; player <= 1; ++player) {
    std::vector<char> region(g.num_vertices, 0);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      region[v] = w.winner[v] == player;
    // Induced moves: winner's vertices follow the strategy, opponent free.
    std::vector<std::vector<std::size_t>> succ(g.num_vertices);
    for (std::size_t v = 0; v < g.num_vertices; ++v) {
      if (!region[v]) continue;
      if (g.owner[v] == player) {
        if (w.strategy[v] == kNoChoice || !region[w.strategy[v]])
          throw std::logic_error("zielonka: strategy leaves winning region");
        succ[v] = {w.strategy[v]};
      } else {
        for (std::size_t u : g.succ[v]) {
          if (!region[u])
            throw std::logic_error("zielonka: opponent escapes winning region");
          succ[v].push_back(u);
        }
      }
    }
    if (has_cycle_with_parity(g, region, succ, 1 - (player == 0 ? 0 : 1)))
      throw std::logic_error("zielonka: certification found a losing cycle");
  }
}

}  // namespace

std::vector<std::size_t> attractor(const TurnBasedParityGame& g, int player,
                                   const std::vector<std::size_t>& target) {
  std::vector<char> alive(g.num_vertices, 1);
  std::vector<char> tgt(g.num_vertices, 0);
  for (std::size_t v : target) tgt[v] = 1;
  std::vector<std::size_t> strat(g.num_vertices, kNoChoice);
  std::vector<char> in = attract(g, player, alive, tgt, strat);
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < g.num_vertices; ++v)
    if (in[v]) out.push_back(v);
  return out;
}

WinningRegions zielonka(const TurnBasedParityGame& g) {
  g.validate();
  Zielonka z(g);
  std::vector<char> alive(g.num_vertices, 1);
  z.solve(alive);
  WinningRegions w{std::move(z.winner), std::move(z.strategy)};
  certify(g, w);
  return w;
}

Sequentialisation sequentialise(const game::ParityGame& g, std::size_t j) {
  const auto& m = g.structure;
  const std::size_t n = m.num_players();
  if (j >= n) throw std::invalid_argument("sequentialise: no such player");
  const std::size_t st = m.num_states();

  Sequentialisation seq;
  auto& h = seq.game;
  h.num_vertices = st;
  h.owner.assign(st, 0);
  h.succ.assign(st, {});
  h.priority.assign(st, 0);
  h.names.assign(st, {});
  for (std::size_t s = 0; s < st; ++s) {
    h.priority[s] = g.priorities[j][s] + 1;
    h.names[s] = m.state_names[s];
  }

  for (std::size_t s = 0; s < st; ++s) {
    // Available partial profiles of the coalition at s.
    std::vector<game::JointAction> partials{game::JointAction(n, kNoChoice)};
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      std::vector<game::JointAction> grown;
      for (const game::JointAction& partial : partials)
        for (std::size_t a : m.avail[s][i]) {
          game::JointAction e = partial;
          e[i] = a;
          grown.push_back(std::move(e));
        }
      partials = std::move(grown);
    }
    for (game::JointAction& partial : partials) {
      std::size_t v1 = h.num_vertices++;
      h.owner.push_back(1);
      h.priority.push_back(g.priorities[j][s] + 1);
      h.succ.emplace_back();
      std::ostringstream name;
      name << m.state_names[s] << "/(";
      for (std::size_t i = 0; i < n; ++i) {
        if (i) name << ",";
        name << (i == j ? "_" : m.actions[i][partial[i]]);
      }
      name << ")";
      h.names.push_back(name.str());
      for (std::size_t a : m.avail[s][j]) {
        game::JointAction full = partial;
        full[j] = a;
        h.succ[v1].push_back(m.successor(s, full));
      }
      h.succ[s].push_back(v1);
      seq.v1_state.push_back(s);
      seq.v1_partial.push_back(std::move(partial));
    }
  }
  h.validate();
  return seq;
}

PunishmentResult punishment_region(const game::ParityGame& g, std::size_t j) {
  Sequentialisation seq = sequentialise(g, j);
  WinningRegions w = zielonka(seq.game);
  const std::size_t st = g.structure.num_states();
  PunishmentResult result;
  result.region.assign(st, 0);
  for (std::size_t s = 0; s < st; ++s) {
    if (w.winner[s] != 0) continue;
    result.region[s] = 1;
    std::size_t choice = w.strategy[s];
    if (choice == kNoChoice || choice < st)
      throw std::logic_error("punishment_region: missing coalition choice");
    result.punish.emplace(s, seq.v1_partial[choice - st]);
  }
  return result;
}

std::string to_pgsolver(const TurnBasedParityGame& g) {
  std::ostringstream out;
  out << "parity " << g.num_vertices << ";\n";
  for (std::size_t v = 0; v < g.num_vertices; ++v) {
    out << v << " " << g.priority[v] << " " << int(g.owner[v]) << " ";
    for (std::size_t k = 0; k < g.succ[v].size(); ++k)
      out << (k ? "," : "") << g.succ[v][k];
    if (v < g.names.size() && !g.names[v].empty())
      out << " \"" << g.names[v] << "\"";
    out << ";\n";
  }
  return out.str();
}

}  // namespace teq::solver
