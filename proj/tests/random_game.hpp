// Random concurrent-game and transducer generators shared by the game,
// solver, and equilibrium test suites.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "random_gen.hpp"
#include "teq/game.hpp"

namespace teq::testgen {

/// Random structure with uniform availability: every player has all of
/// their 1..max_actions actions available at every state.
inline game::ConcurrentGameStructure random_structure(std::mt19937& rng,
                                                      std::size_t num_players,
                                                      std::size_t max_states,
                                                      std::size_t max_actions) {
  game::ConcurrentGameStructure m;
  std::uniform_int_distribution<std::size_t> nstates(1, max_states);
  std::uniform_int_distribution<std::size_t> nacts(1, max_actions);
  const std::size_t states = nstates(rng);
  for (std::size_t i = 0; i < num_players; ++i) {
    m.players.push_back(std::to_string(i + 1));
    std::size_t k = nacts(rng);
    std::vector<std::string> acts;
    for (std::size_t a = 0; a < k; ++a)
      acts.push_back(std::string(1, static_cast<char>('a' + a)));
    m.actions.push_back(std::move(acts));
  }
  std::uniform_int_distribution<std::size_t> pick(0, states - 1);
  m.initial = 0;
  for (std::size_t s = 0; s < states; ++s) {
    m.state_names.push_back("v" + std::to_string(s));
    std::vector<std::vector<std::size_t>> row(num_players);
    for (std::size_t i = 0; i < num_players; ++i)
      for (std::size_t a = 0; a < m.actions[i].size(); ++a) row[i].push_back(a);
    m.avail.push_back(std::move(row));
    m.tr.emplace_back();
  }
  for (std::size_t s = 0; s < states; ++s)
    for (const game::JointAction& a : m.joint_actions(s))
      m.tr[s].emplace(a, pick(rng));
  return m;
}

/// Random labelling over the given atoms.
inline std::vector<ltl::LabelSet> random_labels(
    std::mt19937& rng, std::size_t num_states,
    const std::vector<std::string>& atoms) {
  std::bernoulli_distribution coin(0.5);
  std::vector<ltl::LabelSet> labels(num_states);
  for (auto& set : labels)
    for (const auto& atom : atoms)
      if (coin(rng)) set.insert(atom);
  return labels;
}

/// Random LTL game over `atoms` with uniform availability.
inline game::LtlGame random_ltl_game(std::mt19937& rng, std::size_t num_players,
                                     std::size_t max_states,
                                     std::size_t max_actions,
                                     const std::vector<std::string>& atoms,
                                     int max_goal_ops) {
  game::LtlGame g;
  g.structure = random_structure(rng, num_players, max_states, max_actions);
  g.labels = random_labels(rng, g.structure.num_states(), atoms);
  for (std::size_t i = 0; i < num_players; ++i)
    g.goals.push_back(random_formula(rng, atoms, max_goal_ops));
  return g;
}

/// Random transducer for player i of structure m, total over the joint
/// actions of the global action alphabet.  Valid whenever availability is
/// uniform (all actions available everywhere).
inline game::StrategyTransducer random_transducer(std::mt19937& rng,
                                                  const game::ConcurrentGameStructure& m,
                                                  std::size_t player,
                                                  std::size_t max_internal) {
  game::StrategyTransducer t;
  std::uniform_int_distribution<std::size_t> ninternal(1, max_internal);
  t.num_states = ninternal(rng);
  t.initial = 0;
  std::uniform_int_distribution<std::size_t> act(0, m.actions[player].size() - 1);
  std::uniform_int_distribution<std::size_t> internal(0, t.num_states - 1);

  std::vector<game::JointAction> all{game::JointAction{}};
  for (std::size_t i = 0; i < m.num_players(); ++i) {
    std::vector<game::JointAction> grown;
    for (const game::JointAction& partial : all)
      for (std::size_t a = 0; a < m.actions[i].size(); ++a) {
        game::JointAction e = partial;
        e.push_back(a);
        grown.push_back(std::move(e));
      }
    all = std::move(grown);
  }
  for (std::size_t q = 0; q < t.num_states; ++q) {
    t.output.push_back(act(rng));
    t.next.emplace_back();
    for (const game::JointAction& a : all) t.next[q].emplace(a, internal(rng));
  }
  return t;
}

}  // namespace teq::testgen
