// teq -- temporal equilibrium analysis toolkit

#include "teq/equilibrium.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

#include <json.hpp>

namespace teq::equilibrium {

namespace {

/// Search graph for one winner-set check: restricted-arena states, or
/// their product with a query automaton.  Vertex k is (state[k], aut[k]).
struct SearchGraph {
  automata::Digraph graph;
  std::vector<std::size_t> state;  // vertex -> product-game state
  std::vector<std::size_t> aut;    // vertex -> query automaton state (or 0)
};

SearchGraph build_search_graph(const game::ParityGame& g,
                               const RestrictedArena& arena,
                               const automata::DeterministicParityAutomaton* query) {
  SearchGraph sg;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> id;
  auto intern = [&](std::size_t s, std::size_t q) {
    auto [it, fresh] = id.emplace(std::pair{s, q}, sg.state.size());
    if (fresh) {
      sg.state.push_back(s);
      sg.aut.push_back(q);
      sg.graph.succ.emplace_back();
    }
    return it->second;
  };

  const std::size_t s0 = g.structure.initial;
  if (!arena.alive[s0]) return sg;  // caller guards; be defensive
  sg.graph.initial = intern(s0, query ? query->initial : 0);
  for (std::size_t v = 0; v < sg.state.size(); ++v) {
    std::size_t s = sg.state[v];
    std::size_t q = sg.aut[v];
    std::size_t q2 = query ? query->step(q, g.labels[s]) : 0;
    std::set<std::size_t> seen;
    for (const game::JointAction& a : arena.moves[s]) {
      std::size_t t = g.structure.tr[s].at(a);
      if (!arena.alive[t]) continue;
      if (seen.insert(t).second) {
        std::size_t w = intern(t, q2);  // may reallocate succ; index after
        sg.graph.succ[v].push_back(w);
      }
    }
  }
  sg.graph.num_vertices = sg.state.size();
  return sg;
}

/// Turn a vertex lasso back into a (state, joint action) lasso, choosing
/// for each edge the first surviving move reaching the next state.
game::Lasso to_game_lasso(const game::ParityGame& g, const RestrictedArena& arena,
                          const SearchGraph& sg,
                          const automata::VertexLasso& vl) {
  std::vector<std::size_t> path = vl.prefix;
  path.insert(path.end(), vl.cycle.begin(), vl.cycle.end());
  path.push_back(vl.cycle.front());  // close the cycle

  auto move_for = [&](std::size_t u, std::size_t v) -> game::JointAction {
    std::size_t s = sg.state[u], t = sg.state[v];
    for (const game::JointAction& a : arena.moves[s])
      if (g.structure.tr[s].at(a) == t) return a;
    throw std::logic_error("witness edge without a surviving move");
  };

  game::Lasso lasso;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    auto step = std::pair{sg.state[path[k]], move_for(path[k], path[k + 1])};
    if (k < vl.prefix.size())
      lasso.prefix.push_back(std::move(step));
    else
      lasso.cycle.push_back(std::move(step));
  }
  return lasso;
}

/// All subsets of {0..n-1} in decreasing size, ties broken
/// lexicographically on the ascending member list.
std::vector<std::vector<std::size_t>> winner_sets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> w;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) w.push_back(i);
    out.push_back(std::move(w));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) {
                     if (a.size() != b.size()) return a.size() > b.size();
                     return a < b;
                   });
  return out;
}

void ensure_pun(const game::ParityGame& g, PunCache& pun, std::size_t j,
                Stats* stats) {
  if (pun.count(j)) return;
  pun.emplace(j, solver::punishment_region(g, j));
  if (stats) ++stats->solver_calls;
}

Verdict query_search(const game::LtlGame& g, const ltl::FormulaPtr* phi,
                     const Options& opt) {
  Verdict v;
  const std::size_t n = g.structure.num_players();
  if (n > 62) throw std::runtime_error("too many players for subset search");

  std::vector<automata::DeterministicParityAutomaton> dpws;
  dpws.reserve(n);
  for (const auto& goal : g.goals)
    dpws.push_back(automata::ltl_to_dpw(goal, opt.max_automaton_states));
  std::optional<automata::DeterministicParityAutomaton> query;
  if (phi) query = automata::ltl_to_dpw(*phi, opt.max_automaton_states);

  game::ParityGame par = game::product_game(g, dpws, opt.max_product_states);
  v.stats.product_states = par.structure.num_states();

  PunCache pun;
  const auto subsets = winner_sets(n);
  const std::size_t jobs = std::max<std::size_t>(1, opt.jobs);
  const auto* q = query ? &*query : nullptr;

  for (std::size_t base = 0; base < subsets.size() && !v.yes; base += jobs) {
    std::size_t end = std::min(base + jobs, subsets.size());
    // Punishment regions are computed once, up front for the batch, so the
    // parallel checks only read the cache.
    for (std::size_t k = base; k < end; ++k)
      for (std::size_t j = 0; j < n; ++j)
        if (!std::binary_search(subsets[k].begin(), subsets[k].end(), j))
          ensure_pun(par, pun, j, &v.stats);

    std::vector<std::future<std::optional<game::Lasso>>> results;
    for (std::size_t k = base; k < end; ++k)
      results.push_back(std::async(
          jobs == 1 ? std::launch::deferred : std::launch::async,
          [&, k] { return find_ne_for_winners(par, subsets[k], pun, nullptr, q); }));
    for (std::size_t k = base; k < end; ++k) {
      std::optional<game::Lasso> witness = results[k - base].get();
      ++v.stats.subsets_checked;
      if (witness && !v.yes) {
        v.yes = true;
        v.winners = subsets[k];
        v.witness = std::move(*witness);
        v.witness_base = project_witness(par, *v.witness);
      }
    }
  }
  return v;
}

}  // namespace

RestrictedArena restrict_game(const game::ParityGame& g,
                              const std::vector<std::size_t>& losers,
                              const PunCache& pun) {
  const auto& m = g.structure;
  RestrictedArena arena;
  arena.alive.assign(m.num_states(), 1);
  for (std::size_t j : losers) {
    const auto& region = pun.at(j).region;
    for (std::size_t s = 0; s < m.num_states(); ++s)
      if (!region[s]) arena.alive[s] = 0;
  }
  if (!arena.alive[m.initial])
    throw InitialStateEliminated("initial state outside the intersection of punishment regions");

  arena.moves.resize(m.num_states());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (!arena.alive[s]) continue;
    for (const game::JointAction& a : m.joint_actions(s)) {
      bool secure = true;
      for (std::size_t j : losers) {
        const auto& region = pun.at(j).region;
        game::JointAction dev = a;
        for (std::size_t alt : m.avail[s][j]) {
          dev[j] = alt;
          if (!region[m.tr[s].at(dev)]) {
            secure = false;
            break;
          }
        }
        if (!secure) break;
      }
      if (secure) arena.moves[s].push_back(a);
    }
  }
  return arena;
}

std::optional<game::Lasso> find_ne_for_winners(
    const game::ParityGame& g, const std::vector<std::size_t>& winners,
    PunCache& pun, Stats* stats,
    const automata::DeterministicParityAutomaton* query) {
  const std::size_t n = g.structure.num_players();
  std::vector<std::size_t> losers;
  for (std::size_t j = 0; j < n; ++j)
    if (!std::binary_search(winners.begin(), winners.end(), j)) losers.push_back(j);
  for (std::size_t j : losers) ensure_pun(g, pun, j, stats);

  RestrictedArena arena;
  try {
    arena = restrict_game(g, losers, pun);
  } catch (const InitialStateEliminated&) {
    return std::nullopt;
  }

  SearchGraph sg = build_search_graph(g, arena, query);
  if (sg.graph.num_vertices == 0) return std::nullopt;

  std::vector<automata::StreettPair> cond;
  for (std::size_t i : winners) {
    std::vector<int> pri(sg.graph.num_vertices);
    for (std::size_t v = 0; v < sg.graph.num_vertices; ++v)
      pri[v] = g.priorities[i][sg.state[v]];
    for (auto& pair : automata::parity_to_streett(pri)) cond.push_back(std::move(pair));
  }
  if (query) {
    std::vector<int> pri(sg.graph.num_vertices);
    for (std::size_t v = 0; v < sg.graph.num_vertices; ++v)
      pri[v] = query->priority[sg.aut[v]];
    for (auto& pair : automata::parity_to_streett(pri)) cond.push_back(std::move(pair));
  }

  std::optional<automata::VertexLasso> vl = automata::streett_emptiness(sg.graph, cond);
  if (!vl) return std::nullopt;
  return to_game_lasso(g, arena, sg, *vl);
}

Verdict non_emptiness(const game::LtlGame& g, const Options& opt) {
  return query_search(g, nullptr, opt);
}

Verdict e_nash(const game::LtlGame& g, const ltl::FormulaPtr& phi,
               const Options& opt) {
  return query_search(g, &phi, opt);
}

Verdict a_nash(const game::LtlGame& g, const ltl::FormulaPtr& phi,
               const Options& opt) {
  Verdict counter = e_nash(g, ltl::f_not(phi), opt);
  Verdict v;
  v.stats = counter.stats;
  v.yes = !counter.yes;
  if (counter.yes) {
    v.winners = std::move(counter.winners);
    v.witness = std::move(counter.witness);
    v.witness_base = std::move(counter.witness_base);
  }
  return v;
}

bool check_punishing_secure(const game::ParityGame& g, const game::Lasso& lasso,
                            std::size_t j, const solver::PunishmentResult& pun) {
  const auto& m = g.structure;
  auto secure_step = [&](const std::pair<std::size_t, game::JointAction>& step) {
    game::JointAction dev = step.second;
    for (std::size_t alt : m.avail[step.first][j]) {
      dev[j] = alt;
      if (!pun.region[m.tr[step.first].at(dev)]) return false;
    }
    return true;
  };
  for (const auto& step : lasso.prefix)
    if (!secure_step(step)) return false;
  for (const auto& step : lasso.cycle)
    if (!secure_step(step)) return false;
  return true;
}

game::LtlGame gadget_game(const game::LtlGame& g, const ltl::FormulaPtr& phi) {
  std::set<std::string> used;
  for (const auto& labels : g.labels) used.insert(labels.begin(), labels.end());
  for (const auto& goal : g.goals)
    for (const auto& a : ltl::atoms(goal)) used.insert(a);
  for (const auto& a : ltl::atoms(phi)) used.insert(a);
  auto fresh = [&used](std::string name) {
    while (used.count(name)) name += "_";
    used.insert(name);
    return name;
  };
  const std::string p = fresh("p"), q = fresh("q");

  const auto& m = g.structure;
  game::LtlGame h;
  auto& hm = h.structure;
  hm.players = m.players;
  hm.players.push_back("choose_" + p);
  hm.players.push_back("choose_" + q);
  hm.actions = m.actions;
  hm.actions.push_back({"set", "clear"});
  hm.actions.push_back({"set", "clear"});

  // States (s, value of p, value of q); the two extra players' choices take
  // effect in the next state's label.
  std::map<std::tuple<std::size_t, bool, bool>, std::size_t> id;
  std::vector<std::tuple<std::size_t, bool, bool>> states;
  auto intern = [&](std::size_t s, bool vp, bool vq) {
    auto [it, fresh_state] = id.emplace(std::tuple{s, vp, vq}, states.size());
    if (fresh_state) {
      states.emplace_back(s, vp, vq);
      std::string name = m.state_names[s];
      name += vp ? "+" + p : "-" + p;
      name += vq ? "+" + q : "-" + q;
      hm.state_names.push_back(std::move(name));
      ltl::LabelSet labels = g.labels[s];
      if (vp) labels.insert(p);
      if (vq) labels.insert(q);
      h.labels.push_back(std::move(labels));
    }
    return it->second;
  };
  hm.initial = intern(m.initial, false, false);

  for (std::size_t v = 0; v < states.size(); ++v) {
    auto [s, vp, vq] = states[v];
    hm.avail.emplace_back(m.avail[s]);
    hm.avail[v].push_back({0, 1});
    hm.avail[v].push_back({0, 1});
    hm.tr.emplace_back();
    for (const auto& [a, t] : m.tr[s])
      for (std::size_t ap = 0; ap < 2; ++ap)
        for (std::size_t aq = 0; aq < 2; ++aq) {
          game::JointAction joint = a;
          joint.push_back(ap);
          joint.push_back(aq);
          hm.tr[v].emplace(std::move(joint), intern(t, ap == 0, aq == 0));
        }
  }

  h.goals = g.goals;
  ltl::FormulaPtr match = ltl::f_and(ltl::f_implies(ltl::f_atom(p), ltl::f_atom(q)),
                                     ltl::f_implies(ltl::f_atom(q), ltl::f_atom(p)));
  h.goals.push_back(ltl::f_or(phi, ltl::f_next(match)));
  h.goals.push_back(ltl::f_or(phi, ltl::f_next(ltl::f_not(match))));
  return h;
}

game::Lasso project_witness(const game::ParityGame& g, const game::Lasso& lasso) {
  game::Lasso base;
  for (const auto& [s, a] : lasso.prefix) base.prefix.emplace_back(g.base_state[s], a);
  for (const auto& [s, a] : lasso.cycle) base.cycle.emplace_back(g.base_state[s], a);
  return base;
}

std::string verdict_to_json(const Verdict& v, const game::LtlGame& g) {
  using nlohmann::json;
  const auto& m = g.structure;
  auto steps = [&](const std::vector<std::pair<std::size_t, game::JointAction>>& part) {
    json out = json::array();
    for (const auto& [s, a] : part) {
      json names = json::array();
      for (std::size_t i = 0; i < a.size(); ++i) names.push_back(m.actions[i][a[i]]);
      out.push_back({{"state", s},
                     {"state_name", m.state_names[s]},
                     {"actions", a},
                     {"action_names", names}});
    }
    return out;
  };

  json j;
  j["answer"] = v.yes ? "yes" : "no";
  json winners = json::array();
  for (std::size_t i : v.winners) winners.push_back(m.players[i]);
  j["winners"] = winners;
  if (v.witness_base)
    j["lasso"] = {{"prefix", steps(v.witness_base->prefix)},
                  {"cycle", steps(v.witness_base->cycle)}};
  else
    j["lasso"] = nullptr;
  j["stats"] = {{"product_states", v.stats.product_states},
                {"subsets_checked", v.stats.subsets_checked},
                {"solver_calls", v.stats.solver_calls}};
  return j.dump(2);
}

Verdict verdict_from_json(const std::string& text, const game::LtlGame& g) {
  using nlohmann::json;
  const json j = json::parse(text);
  Verdict v;
  v.yes = j.at("answer").get<std::string>() == "yes";
  for (const auto& name : j.at("winners")) {
    const auto& players = g.structure.players;
    auto it = std::find(players.begin(), players.end(), name.get<std::string>());
    if (it == players.end()) throw std::runtime_error("unknown player in verdict");
    v.winners.push_back(static_cast<std::size_t>(it - players.begin()));
  }
  std::sort(v.winners.begin(), v.winners.end());
  if (!j.at("lasso").is_null()) {
    game::Lasso lasso;
    auto part = [](const json& arr) {
      std::vector<std::pair<std::size_t, game::JointAction>> out;
      for (const auto& step : arr)
        out.emplace_back(step.at("state").get<std::size_t>(),
                         step.at("actions").get<game::JointAction>());
      return out;
    };
    lasso.prefix = part(j.at("lasso").at("prefix"));
    lasso.cycle = part(j.at("lasso").at("cycle"));
    v.witness_base = std::move(lasso);
  }
  v.stats.product_states = j.at("stats").at("product_states").get<std::size_t>();
  v.stats.subsets_checked = j.at("stats").at("subsets_checked").get<std::size_t>();
  v.stats.solver_calls = j.at("stats").at("solver_calls").get<std::size_t>();
  return v;
}

}  // namespace teq::equilibrium
