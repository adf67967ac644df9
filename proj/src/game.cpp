// teq -- temporal equilibrium analysis toolkit

#include "teq/game.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace teq::game {

std::vector<JointAction> ConcurrentGameStructure::joint_actions(
    std::size_t s) const {
  std::vector<JointAction> result{JointAction{}};
  for (std::size_t i = 0; i < num_players(); ++i) {
    std::vector<JointAction> grown;
    grown.reserve(result.size() * avail[s][i].size());
    for (const JointAction& partial : result)
      for (std::size_t a : avail[s][i]) {
        JointAction extended = partial;
        extended.push_back(a);
        grown.push_back(std::move(extended));
      }
    result = std::move(grown);
  }
  return result;
}

std::size_t ConcurrentGameStructure::successor(std::size_t s,
                                               const JointAction& a) const {
  auto it = tr[s].find(a);
  if (it == tr[s].end())
    throw std::invalid_argument("successor: joint action not available");
  return it->second;
}

void ConcurrentGameStructure::validate() const {
  if (players.empty()) throw std::invalid_argument("structure: no players");
  if (avail.empty()) throw std::invalid_argument("structure: no states");
  if (initial >= num_states())
    throw std::invalid_argument("structure: initial state out of range");
  if (avail.size() != tr.size() || state_names.size() != avail.size())
    throw std::invalid_argument("structure: inconsistent state tables");
  for (std::size_t s = 0; s < num_states(); ++s) {
    if (avail[s].size() != num_players())
      throw std::invalid_argument("structure: avail row arity mismatch");
    for (std::size_t i = 0; i < num_players(); ++i) {
      if (avail[s][i].empty())
        throw std::invalid_argument("structure: empty action set");
      for (std::size_t a : avail[s][i])
        if (a >= actions[i].size())
          throw std::invalid_argument("structure: action id out of range");
    }
    auto all = joint_actions(s);
    if (tr[s].size() != all.size())
      throw std::invalid_argument("structure: tr not exact on available moves");
    for (const JointAction& a : all) {
      auto it = tr[s].find(a);
      if (it == tr[s].end())
        throw std::invalid_argument("structure: missing transition");
      if (it->second >= num_states())
        throw std::invalid_argument("structure: successor out of range");
    }
  }
}

std::vector<std::size_t> Lasso::state_path() const {
  std::vector<std::size_t> path;
  for (const auto& [s, a] : prefix) path.push_back(s);
  for (const auto& [s, a] : cycle) path.push_back(s);
  return path;
}

ltl::UltimatelyPeriodicWord label_word(const Lasso& lasso,
                                       const std::vector<ltl::LabelSet>& labels) {
  ltl::UltimatelyPeriodicWord w;
  for (const auto& [s, a] : lasso.prefix) w.prefix.push_back(labels[s]);
  for (const auto& [s, a] : lasso.cycle) w.cycle.push_back(labels[s]);
  return w;
}

bool lasso_consistent(const ConcurrentGameStructure& m, const Lasso& lasso) {
  if (lasso.cycle.empty()) return false;
  std::vector<std::pair<std::size_t, JointAction>> steps = lasso.prefix;
  steps.insert(steps.end(), lasso.cycle.begin(), lasso.cycle.end());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& [s, a] = steps[k];
    auto it = m.tr[s].find(a);
    if (it == m.tr[s].end()) return false;
    std::size_t expected =
        k + 1 < steps.size() ? steps[k + 1].first : lasso.cycle.front().first;
    if (it->second != expected) return false;
  }
  return true;
}

ParityGame product_game(
    const LtlGame& g,
    const std::vector<automata::DeterministicParityAutomaton>& dpws,
    std::size_t cap) {
  const std::size_t n = g.structure.num_players();
  if (dpws.size() != n)
    throw std::invalid_argument("product_game: one automaton per player required");

  ParityGame p;
  p.structure.players = g.structure.players;
  p.structure.actions = g.structure.actions;

  using Key = std::pair<std::size_t, std::vector<std::size_t>>;
  std::map<Key, std::size_t> id;
  std::vector<Key> states;
  auto get_state = [&](std::size_t base, std::vector<std::size_t> q) {
    Key key{base, std::move(q)};
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    if (states.size() >= cap)
      throw std::runtime_error("product_game: state cap exceeded");
    std::size_t k = states.size();
    id.emplace(key, k);
    states.push_back(id.find(key)->first);
    return k;
  };

  std::vector<std::size_t> q0(n);
  for (std::size_t i = 0; i < n; ++i) q0[i] = dpws[i].initial;
  p.structure.initial = get_state(g.structure.initial, std::move(q0));

  std::queue<std::size_t> todo;
  todo.push(p.structure.initial);
  while (!todo.empty()) {
    std::size_t v = todo.front();
    todo.pop();
    auto [base, q] = states[v];
    while (p.structure.avail.size() <= v) {
      p.structure.avail.emplace_back();
      p.structure.tr.emplace_back();
    }
    p.structure.avail[v] = g.structure.avail[base];

    // All automata advance on λ(base), independent of the move taken.
    std::vector<std::size_t> qn(n);
    for (std::size_t i = 0; i < n; ++i)
      qn[i] = dpws[i].step(q[i], g.labels[base]);

    for (const auto& [a, succ] : g.structure.tr[base]) {
      std::size_t before = states.size();
      std::size_t w = get_state(succ, qn);
      p.structure.tr[v].emplace(a, w);
      if (w == before) todo.push(w);
    }
  }

  const std::size_t m = states.size();
  p.structure.avail.resize(m);
  p.structure.tr.resize(m);
  p.structure.state_names.resize(m);
  p.labels.resize(m);
  p.base_state.resize(m);
  p.automaton_state.resize(m);
  p.priorities.assign(n, std::vector<int>(m, 0));
  for (std::size_t v = 0; v < m; ++v) {
    auto [base, q] = states[v];
    p.base_state[v] = base;
    p.automaton_state[v] = q;
    p.labels[v] = g.labels[base];
    std::ostringstream name;
    name << g.structure.state_names[base];
    for (std::size_t i = 0; i < n; ++i) name << "." << q[i];
    p.structure.state_names[v] = name.str();
    for (std::size_t i = 0; i < n; ++i)
      p.priorities[i][v] = dpws[i].priority[q[i]];
  }
  return p;
}

Lasso run_profile(const ConcurrentGameStructure& m,
                  const std::vector<StrategyTransducer>& profile) {
  const std::size_t n = m.num_players();
  if (profile.size() != n)
    throw std::invalid_argument("run_profile: one transducer per player required");

  using Config = std::vector<std::size_t>;  // [structure state, internals...]
  std::map<Config, std::size_t> seen;       // config -> step index
  std::vector<std::pair<std::size_t, JointAction>> steps;

  Config cfg(n + 1);
  cfg[0] = m.initial;
  for (std::size_t i = 0; i < n; ++i) cfg[i + 1] = profile[i].initial;

  for (;;) {
    auto it = seen.find(cfg);
    if (it != seen.end()) {
      Lasso lasso;
      lasso.prefix.assign(steps.begin(), steps.begin() + it->second);
      lasso.cycle.assign(steps.begin() + it->second, steps.end());
      return lasso;
    }
    seen.emplace(cfg, steps.size());

    std::size_t s = cfg[0];
    JointAction a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = profile[i].output[cfg[i + 1]];
      const auto& av = m.avail[s][i];
      if (!std::binary_search(av.begin(), av.end(), a[i]))
        throw InvalidStrategy("run_profile: unavailable action emitted");
    }
    steps.emplace_back(s, a);

    Config next(n + 1);
    next[0] = m.successor(s, a);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = profile[i].next[cfg[i + 1]];
      auto jt = row.find(a);
      if (jt == row.end())
        throw InvalidStrategy("run_profile: transducer transition undefined");
      next[i + 1] = jt->second;
    }
    cfg = std::move(next);
  }
}

bool check_bisimilar(const ConcurrentGameStructure& a,
                     const std::vector<ltl::LabelSet>& la,
                     const ConcurrentGameStructure& b,
                     const std::vector<ltl::LabelSet>& lb) {
  if (a.num_players() != b.num_players() || a.actions != b.actions)
    throw std::invalid_argument("check_bisimilar: incompatible signatures");

  // Disjoint union: states of a, then states of b shifted.
  const std::size_t na = a.num_states();
  const std::size_t total = na + b.num_states();
  auto label_of = [&](std::size_t v) -> const ltl::LabelSet& {
    return v < na ? la[v] : lb[v - na];
  };
  auto moves_of = [&](std::size_t v) {
    std::vector<std::pair<JointAction, std::size_t>> out;
    if (v < na)
      for (const auto& [act, succ] : a.tr[v]) out.emplace_back(act, succ);
    else
      for (const auto& [act, succ] : b.tr[v - na]) out.emplace_back(act, succ + na);
    return out;
  };

  std::vector<int> block(total);
  {
    std::map<ltl::LabelSet, int> by_label;
    for (std::size_t v = 0; v < total; ++v) {
      auto it = by_label.find(label_of(v));
      if (it == by_label.end())
        it = by_label.emplace(label_of(v), static_cast<int>(by_label.size())).first;
      block[v] = it->second;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, std::vector<std::pair<JointAction, int>>>, int> sig_id;
    std::vector<int> next_block(total);
    for (std::size_t v = 0; v < total; ++v) {
      std::vector<std::pair<JointAction, int>> moves;
      for (const auto& [act, succ] : moves_of(v)) moves.emplace_back(act, block[succ]);
      auto key = std::make_pair(block[v], std::move(moves));
      auto it = sig_id.find(key);
      if (it == sig_id.end())
        it = sig_id.emplace(std::move(key), static_cast<int>(sig_id.size())).first;
      next_block[v] = it->second;
    }
    if (next_block != block) changed = true;
    block = std::move(next_block);
  }
  return block[a.initial] == block[na + b.initial];
}

namespace {

using nlohmann::json;

[[noreturn]] void arena_error(const std::string& what) {
  throw std::runtime_error("arena: " + what);
}

}  // namespace

LtlGame parse_arena(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    arena_error(e.what());
  }

  LtlGame g;
  auto& m = g.structure;
  if (!doc.contains("players") || !doc["players"].is_array() ||
      doc["players"].empty())
    arena_error("missing or empty 'players'");
  for (const auto& p : doc["players"]) m.players.push_back(p.get<std::string>());
  const std::size_t n = m.players.size();

  if (!doc.contains("actions") || doc["actions"].size() != n)
    arena_error("'actions' must list one action set per player");
  m.actions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& name : doc["actions"][i])
      m.actions[i].push_back(name.get<std::string>());
    if (m.actions[i].empty()) arena_error("empty action set");
  }

  if (!doc.contains("states") || doc["states"].empty())
    arena_error("missing or empty 'states'");
  std::map<std::string, std::size_t> state_id;
  for (const auto& st : doc["states"]) {
    std::string name = st.at("name").get<std::string>();
    if (state_id.count(name)) arena_error("duplicate state '" + name + "'");
    state_id.emplace(name, m.state_names.size());
    m.state_names.push_back(name);
    ltl::LabelSet labels;
    if (st.contains("labels"))
      for (const auto& l : st["labels"]) labels.insert(l.get<std::string>());
    g.labels.push_back(std::move(labels));
  }
  const std::size_t num_states = m.state_names.size();

  {
    std::string init = doc.at("initial").get<std::string>();
    auto it = state_id.find(init);
    if (it == state_id.end()) arena_error("unknown initial state '" + init + "'");
    m.initial = it->second;
  }

  std::vector<std::map<JointAction, std::size_t>> tr(num_states);
  if (!doc.contains("transitions")) arena_error("missing 'transitions'");
  for (const auto& row : doc["transitions"]) {
    if (!row.is_array() || row.size() != 3)
      arena_error("transition rows are [state, [actions...], successor]");
    auto src_it = state_id.find(row[0].get<std::string>());
    auto dst_it = state_id.find(row[2].get<std::string>());
    if (src_it == state_id.end() || dst_it == state_id.end())
      arena_error("transition references unknown state");
    if (row[1].size() != n) arena_error("action tuple arity mismatch");

    // Expand `*` wildcards over the player's full action list.
    std::vector<std::vector<std::size_t>> choices(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::string act = row[1][i].get<std::string>();
      if (act == "*") {
        for (std::size_t k = 0; k < m.actions[i].size(); ++k)
          choices[i].push_back(k);
      } else {
        auto pos = std::find(m.actions[i].begin(), m.actions[i].end(), act);
        if (pos == m.actions[i].end())
          arena_error("unknown action '" + act + "' for player " + m.players[i]);
        choices[i].push_back(
            static_cast<std::size_t>(pos - m.actions[i].begin()));
      }
    }
    std::vector<JointAction> expanded{JointAction{}};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<JointAction> grown;
      for (const JointAction& partial : expanded)
        for (std::size_t k : choices[i]) {
          JointAction e = partial;
          e.push_back(k);
          grown.push_back(std::move(e));
        }
      expanded = std::move(grown);
    }
    for (JointAction& a : expanded) {
      auto [it, fresh] = tr[src_it->second].emplace(std::move(a), dst_it->second);
      if (!fresh && it->second != dst_it->second)
        arena_error("nondeterministic transition at state '" +
                    m.state_names[src_it->second] + "'");
    }
  }

  // Availability: the actions a player uses at a state; the relation must be
  // total on the induced product.
  m.avail.assign(num_states, std::vector<std::vector<std::size_t>>(n));
  m.tr = std::move(tr);
  for (std::size_t s = 0; s < num_states; ++s) {
    std::vector<std::set<std::size_t>> used(n);
    for (const auto& [a, succ] : m.tr[s])
      for (std::size_t i = 0; i < n; ++i) used[i].insert(a[i]);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i].empty())
        arena_error("state '" + m.state_names[s] + "' has no transitions");
      m.avail[s][i].assign(used[i].begin(), used[i].end());
    }
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    arena_error(std::string("transition relation not total: ") + e.what());
  }

  if (!doc.contains("goals") || doc["goals"].size() != n)
    arena_error("'goals' must list one formula per player");
  for (const auto& goal : doc["goals"])
    g.goals.push_back(ltl::parse_ltl(goal.get<std::string>()));
  return g;
}

}  // namespace teq::game
