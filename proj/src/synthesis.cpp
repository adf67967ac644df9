// teq -- temporal equilibrium analysis toolkit

#include "teq/synthesis.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "teq/ltl.hpp"

namespace teq::synthesis {

namespace {

constexpr std::size_t kTop = std::numeric_limits<std::size_t>::max();

std::vector<std::pair<std::size_t, game::JointAction>> lasso_steps(
    const game::Lasso& lasso) {
  auto steps = lasso.prefix;
  steps.insert(steps.end(), lasso.cycle.begin(), lasso.cycle.end());
  return steps;
}

/// Every unilateral deviation by player j against the fixed transducers of
/// the other players: one vertex per (game state, others' internal states,
/// goal-automaton state), one edge per available action of j.  `dpw` may be
/// null, in which case `pri` is read directly off the game state.
struct InducedGame {
  automata::Digraph graph;
  std::vector<int> pri;
};

InducedGame induced_game(const game::ConcurrentGameStructure& m,
                         const std::vector<ltl::LabelSet>& labels,
                         const std::vector<game::StrategyTransducer>& profile,
                         std::size_t j,
                         const automata::DeterministicParityAutomaton* dpw,
                         const std::vector<int>* state_priority) {
  const std::size_t n = m.num_players();
  using Key = std::pair<std::size_t, std::vector<std::size_t>>;  // (s, mem+q)
  std::map<Key, std::size_t> id;
  std::vector<Key> nodes;
  InducedGame out;
  auto intern = [&](std::size_t s, std::vector<std::size_t> mem) {
    auto [it, fresh] = id.emplace(Key{s, std::move(mem)}, nodes.size());
    if (fresh) {
      nodes.push_back(it->first);
      out.graph.succ.emplace_back();
      out.pri.push_back(dpw ? dpw->priority[it->first.second.back()]
                            : (*state_priority)[s]);
    }
    return it->second;
  };

  std::vector<std::size_t> mem0;
  for (std::size_t k = 0; k < n; ++k)
    if (k != j) mem0.push_back(profile[k].initial);
  if (dpw) mem0.push_back(dpw->initial);
  out.graph.initial = intern(m.initial, std::move(mem0));

  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto [s, mem] = nodes[v];
    game::JointAction joint(n);
    std::size_t slot = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      std::size_t a = profile[k].output[mem[slot++]];
      const auto& av = m.avail[s][k];
      if (std::find(av.begin(), av.end(), a) == av.end())
        throw game::InvalidStrategy("transducer output unavailable at " +
                                    m.state_names[s]);
      joint[k] = a;
    }
    for (std::size_t a : m.avail[s][j]) {
      joint[j] = a;
      std::size_t t = m.tr[s].at(joint);
      std::vector<std::size_t> mem2;
      slot = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        mem2.push_back(profile[k].next[mem[slot++]].at(joint));
      }
      if (dpw) mem2.push_back(dpw->step(mem.back(), labels[s]));
      std::size_t w = intern(t, std::move(mem2));  // may reallocate succ
      out.graph.succ[v].push_back(w);
    }
  }
  out.graph.num_vertices = nodes.size();
  return out;
}

bool has_beneficial_deviation(const InducedGame& ig) {
  return automata::streett_emptiness(ig.graph,
                                     automata::parity_to_streett(ig.pri))
      .has_value();
}

}  // namespace

WitnessTransducer witness_transducer(const game::Lasso& witness) {
  WitnessTransducer t;
  const auto steps = lasso_steps(witness);
  t.num_states = steps.size();
  t.initial = 0;
  for (std::size_t pos = 0; pos < steps.size(); ++pos) {
    t.state.push_back(steps[pos].first);
    t.output.push_back(steps[pos].second);
    t.next.push_back(pos + 1 < steps.size() ? pos + 1 : witness.prefix.size());
  }
  return t;
}

std::vector<game::StrategyTransducer> synthesize_profile(
    const game::ParityGame& g, const std::vector<std::size_t>& winners,
    const game::Lasso& witness,
    const std::map<std::size_t, solver::PunishmentResult>& pun) {
  const auto& m = g.structure;
  const std::size_t n = m.num_players();
  std::vector<std::size_t> losers;
  for (std::size_t j = 0; j < n; ++j)
    if (!std::binary_search(winners.begin(), winners.end(), j)) losers.push_back(j);

  const WitnessTransducer eta = witness_transducer(witness);
  if (eta.state.empty() || eta.state[eta.initial] != m.initial)
    throw std::invalid_argument("witness does not start at the initial state");
  for (std::size_t j : losers) {
    const auto& region = pun.at(j).region;
    for (const auto& [s, a] : lasso_steps(witness)) {
      game::JointAction dev = a;
      for (std::size_t alt : m.avail[s][j]) {
        dev[j] = alt;
        if (!region[m.tr[s].at(dev)])
          throw std::invalid_argument("witness is not punishing-secure for player " +
                                      m.players[j]);
      }
    }
  }

  // Shared internal skeleton: nodes (game state, witness position, flag)
  // with flag = kTop on-path / a loser id in punishment mode (position
  // collapsed to 0 there: punishment strategies are memoryless).
  using Node = std::tuple<std::size_t, std::size_t, std::size_t>;
  std::map<Node, std::size_t> id;
  std::vector<Node> nodes;
  auto intern = [&](std::size_t s, std::size_t pos, std::size_t flag) {
    auto [it, fresh] = id.emplace(Node{s, flag == kTop ? pos : 0, flag}, nodes.size());
    if (fresh) nodes.push_back(it->first);
    return it->second;
  };
  intern(m.initial, eta.initial, kTop);

  std::vector<std::map<game::JointAction, std::size_t>> next;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto [s, pos, flag] = nodes[v];
    next.emplace_back();
    for (const game::JointAction& a : m.joint_actions(s)) {
      std::size_t t = m.tr[s].at(a);
      std::size_t w;
      if (flag != kTop) {
        w = intern(t, 0, flag);
      } else if (a == eta.output[pos] && s == eta.state[pos]) {
        w = intern(t, eta.next[pos], kTop);
      } else {
        // Deviation handling: blame the lowest-id deviating loser; with no
        // deviating loser fall back to the lowest-id loser, and with no
        // losers at all just resynchronise on the actual game state.
        std::size_t blame = kTop;
        for (std::size_t j : losers)
          if (a[j] != eta.output[pos][j]) {
            blame = j;
            break;
          }
        if (blame == kTop && !losers.empty()) blame = losers.front();
        w = blame == kTop ? intern(t, eta.next[pos], kTop) : intern(t, 0, blame);
      }
      next[v].emplace(a, w);
    }
  }

  std::vector<game::StrategyTransducer> profile(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& t = profile[i];
    t.num_states = nodes.size();
    t.initial = 0;
    t.next = next;
    for (const auto& [s, pos, flag] : nodes) {
      std::size_t a;
      const auto& av = m.avail[s][i];
      if (flag == kTop && s == eta.state[pos]) {
        a = eta.output[pos][i];
      } else if (flag != kTop && flag != i && pun.at(flag).punish.count(s)) {
        a = pun.at(flag).punish.at(s)[i];
      } else if (flag == kTop &&
                 std::find(av.begin(), av.end(), eta.output[pos][i]) != av.end()) {
        a = eta.output[pos][i];  // desynchronised but the action still fits
      } else {
        a = av.front();  // unconstrained case: any available action
      }
      t.output.push_back(a);
    }
  }
  return profile;
}

bool validate_equilibrium(const game::LtlGame& g,
                          const std::vector<game::StrategyTransducer>& profile) {
  game::Lasso outcome = game::run_profile(g.structure, profile);
  ltl::UltimatelyPeriodicWord word = game::label_word(outcome, g.labels);
  for (std::size_t j = 0; j < g.structure.num_players(); ++j) {
    if (ltl::eval_lasso(g.goals[j], word)) continue;
    automata::DeterministicParityAutomaton dpw = automata::ltl_to_dpw(g.goals[j]);
    if (has_beneficial_deviation(
            induced_game(g.structure, g.labels, profile, j, &dpw, nullptr)))
      return false;
  }
  return true;
}

bool validate_equilibrium(const game::ParityGame& g,
                          const std::vector<game::StrategyTransducer>& profile) {
  game::Lasso outcome = game::run_profile(g.structure, profile);
  for (std::size_t j = 0; j < g.structure.num_players(); ++j) {
    int minp = std::numeric_limits<int>::max();
    for (const auto& [s, a] : outcome.cycle) minp = std::min(minp, g.priorities[j][s]);
    if (minp % 2 == 0) continue;
    if (has_beneficial_deviation(induced_game(g.structure, g.labels, profile, j,
                                              nullptr, &g.priorities[j])))
      return false;
  }
  return true;
}

std::string transducer_to_json(const game::StrategyTransducer& t,
                               const std::vector<std::string>& actions) {
  using nlohmann::json;
  json j;
  json states = json::array();
  for (std::size_t q = 0; q < t.num_states; ++q) states.push_back(q);
  j["states"] = states;
  j["initial"] = t.initial;
  json output = json::object();
  for (std::size_t q = 0; q < t.num_states; ++q)
    output[std::to_string(q)] = {{"action", t.output[q]},
                                 {"action_name", actions[t.output[q]]}};
  j["output"] = output;
  json transitions = json::array();
  for (std::size_t q = 0; q < t.num_states; ++q)
    for (const auto& [a, w] : t.next[q])
      transitions.push_back({{"from", q}, {"on", a}, {"to", w}});
  j["transitions"] = transitions;
  return j.dump(2);
}

std::string transducer_to_dot(const game::StrategyTransducer& t,
                              const std::vector<std::string>& actions) {
  std::ostringstream out;
  out << "digraph strategy {\n  rankdir=LR;\n";
  for (std::size_t q = 0; q < t.num_states; ++q)
    out << "  q" << q << " [label=\"" << q << " / " << actions[t.output[q]]
        << (q == t.initial ? "\", shape=doublecircle];\n" : "\"];\n");
  for (std::size_t q = 0; q < t.num_states; ++q)
    for (const auto& [a, w] : t.next[q]) {
      out << "  q" << q << " -> q" << w << " [label=\"(";
      for (std::size_t k = 0; k < a.size(); ++k)
        out << (k ? "," : "") << a[k];
      out << ")\"];\n";
    }
  out << "}\n";
  return out.str();
}

}  // namespace teq::synthesis
