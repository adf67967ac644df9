#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "random_game.hpp"
#include "teq/equilibrium.hpp"
#include "teq/srml.hpp"
#include "teq/synthesis.hpp"

using namespace teq;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(TEQ_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

game::ParityGame goal_product(const game::LtlGame& g) {
  std::vector<automata::DeterministicParityAutomaton> dpws;
  for (const auto& goal : g.goals) dpws.push_back(automata::ltl_to_dpw(goal));
  return game::product_game(g, dpws);
}

std::map<std::size_t, solver::PunishmentResult> loser_punishments(
    const game::ParityGame& par, const std::vector<std::size_t>& winners) {
  std::map<std::size_t, solver::PunishmentResult> pun;
  for (std::size_t j = 0; j < par.structure.num_players(); ++j)
    if (!std::binary_search(winners.begin(), winners.end(), j))
      pun.emplace(j, solver::punishment_region(par, j));
  return pun;
}

/// First `count` steps of the infinite play described by a lasso.
std::vector<std::pair<std::size_t, game::JointAction>> unroll(
    const game::Lasso& lasso, std::size_t count) {
  std::vector<std::pair<std::size_t, game::JointAction>> out;
  for (std::size_t k = 0; out.size() < count; ++k)
    out.push_back(k < lasso.prefix.size()
                      ? lasso.prefix[k]
                      : lasso.cycle[(k - lasso.prefix.size()) % lasso.cycle.size()]);
  return out;
}

void check_same_play(const game::Lasso& a, const game::Lasso& b) {
  std::size_t len = a.prefix.size() + b.prefix.size() +
                    2 * a.cycle.size() * b.cycle.size();
  CHECK(unroll(a, len) == unroll(b, len));
}

/// End-to-end synthesis check for one game: solve, synthesize, reproduce
/// the witness, validate (both goal flavours), and bound transducer sizes.
void check_synthesis(const game::LtlGame& g) {
  equilibrium::Verdict v = equilibrium::non_emptiness(g);
  REQUIRE(v.yes);
  game::ParityGame par = goal_product(g);
  auto pun = loser_punishments(par, v.winners);
  auto profile = synthesis::synthesize_profile(par, v.winners, *v.witness, pun);
  REQUIRE(profile.size() == g.structure.num_players());

  std::size_t losers = g.structure.num_players() - v.winners.size();
  std::size_t positions = v.witness->prefix.size() + v.witness->cycle.size();
  for (const auto& t : profile)
    CHECK(t.num_states <= par.structure.num_states() * positions * (losers + 1));

  check_same_play(game::run_profile(par.structure, profile), *v.witness);
  check_same_play(game::run_profile(g.structure, profile), *v.witness_base);
  CHECK(synthesis::validate_equilibrium(g, profile));
  CHECK(synthesis::validate_equilibrium(par, profile));
}

}  // namespace

TEST_CASE("witness_transducer: generates exactly the witness play") {
  game::Lasso lasso;
  lasso.prefix = {{0, {1, 0}}, {2, {0, 0}}};
  lasso.cycle = {{1, {1, 1}}, {3, {0, 1}}};
  synthesis::WitnessTransducer t = synthesis::witness_transducer(lasso);
  CHECK(t.num_states == 4);
  std::size_t q = t.initial;
  auto steps = unroll(lasso, 9);
  for (const auto& [s, a] : steps) {
    CHECK(t.state[q] == s);
    CHECK(t.output[q] == a);
    q = t.next[q];
  }
}

TEST_CASE("synthesize_profile: figure fixtures round-trip end to end") {
  for (const char* file : {"bisim1.arena", "bisim2.arena"})
    check_synthesis(game::parse_arena(read_fixture(file)));
}

TEST_CASE("synthesize_profile: gossip fixture round-trips end to end") {
  check_synthesis(srml::build_cgs(srml::parse_srml(read_fixture("gossip2.srml"))));
}

TEST_CASE("synthesize_profile: random games round-trip end to end") {
  std::mt19937 rng(811);
  int done = 0;
  while (done < 25) {
    game::LtlGame g = testgen::random_ltl_game(rng, 2, 3, 2, {"x", "y"}, 3);
    if (!equilibrium::non_emptiness(g).yes) continue;
    check_synthesis(g);
    ++done;
  }
}

TEST_CASE("synthesize_profile: losers cannot gain by any memoryless deviation") {
  std::mt19937 rng(907);
  int audited = 0;
  while (audited < 10) {
    game::LtlGame g = testgen::random_ltl_game(rng, 2, 3, 2, {"x"}, 3);
    equilibrium::Verdict v = equilibrium::non_emptiness(g);
    if (!v.yes || v.winners.size() == g.structure.num_players()) continue;
    game::ParityGame par = goal_product(g);
    auto pun = loser_punishments(par, v.winners);
    auto profile = synthesis::synthesize_profile(par, v.winners, *v.witness, pun);

    for (const auto& [j, unused] : pun) {
      // One-player graph: vertices (base state, other players' memories),
      // one edge per action of j; rebuilt here independently.
      const auto& m = g.structure;
      using Key = std::pair<std::size_t, std::vector<std::size_t>>;
      std::map<Key, std::size_t> id;
      std::vector<Key> nodes;
      std::vector<std::vector<std::pair<std::size_t, std::size_t>>> succ;
      auto intern = [&](std::size_t s, std::vector<std::size_t> mem) {
        auto [it, fresh] = id.emplace(Key{s, std::move(mem)}, nodes.size());
        if (fresh) {
          nodes.push_back(it->first);
          succ.emplace_back();
        }
        return it->second;
      };
      std::vector<std::size_t> mem0;
      for (std::size_t k = 0; k < m.num_players(); ++k)
        if (k != j) mem0.push_back(profile[k].initial);
      std::size_t root = intern(m.initial, mem0);
      for (std::size_t u = 0; u < nodes.size(); ++u) {
        auto [s, mem] = nodes[u];
        game::JointAction joint(m.num_players());
        std::size_t slot = 0;
        for (std::size_t k = 0; k < m.num_players(); ++k)
          if (k != j) joint[k] = profile[k].output[mem[slot++]];
        for (std::size_t a : m.avail[s][j]) {
          joint[j] = a;
          std::vector<std::size_t> mem2;
          slot = 0;
          for (std::size_t k = 0; k < m.num_players(); ++k)
            if (k != j) mem2.push_back(profile[k].next[mem[slot++]].at(joint));
          std::size_t w = intern(m.tr[s].at(joint), std::move(mem2));
          succ[u].emplace_back(a, w);
        }
      }
      // Enumerate j's memoryless strategies over this graph exhaustively.
      std::size_t combos = 1;
      for (const auto& row : succ) combos *= row.size();
      if (combos > 1u << 14) continue;  // keep the audit exhaustive yet fast
      std::vector<std::size_t> choice(nodes.size(), 0);
      for (;;) {
        // Follow the unique play until a vertex repeats.
        std::vector<std::size_t> seen(nodes.size(), SIZE_MAX);
        std::vector<std::pair<std::size_t, game::JointAction>> trail;
        std::size_t u = root;
        while (seen[u] == SIZE_MAX) {
          seen[u] = trail.size();
          auto [a, w] = succ[u][choice[u]];
          game::JointAction joint(m.num_players());
          std::size_t slot = 0;
          for (std::size_t k = 0; k < m.num_players(); ++k)
            joint[k] = k == j ? a : profile[k].output[nodes[u].second[slot++]];
          trail.emplace_back(nodes[u].first, joint);
          u = w;
        }
        game::Lasso play;
        play.prefix.assign(trail.begin(), trail.begin() + seen[u]);
        play.cycle.assign(trail.begin() + seen[u], trail.end());
        CHECK(!ltl::eval_lasso(g.goals[j], game::label_word(play, g.labels)));
        std::size_t k = 0;
        while (k < nodes.size() && ++choice[k] == succ[k].size()) choice[k++] = 0;
        if (k == nodes.size()) break;
      }
    }
    ++audited;
  }
}

TEST_CASE("synthesize_profile: refuses a witness that is not punishing-secure") {
  game::LtlGame g = game::parse_arena(read_fixture("bisim1.arena"));
  equilibrium::Verdict v = equilibrium::non_emptiness(g);
  REQUIRE(v.yes);
  REQUIRE(v.winners.size() < g.structure.num_players());
  game::ParityGame par = goal_product(g);
  auto pun = loser_punishments(par, v.winners);
  pun.begin()->second.region.assign(par.structure.num_states(), 0);
  CHECK_THROWS_AS(
      synthesis::synthesize_profile(par, v.winners, *v.witness, pun),
      std::invalid_argument);
}

TEST_CASE("validate_equilibrium: accepts when every goal holds on the outcome") {
  std::mt19937 rng(311);
  for (int round = 0; round < 10; ++round) {
    game::LtlGame g = testgen::random_ltl_game(rng, 2, 3, 2, {"x"}, 3);
    for (auto& goal : g.goals) goal = ltl::f_true();
    std::vector<game::StrategyTransducer> profile;
    for (std::size_t i = 0; i < 2; ++i)
      profile.push_back(testgen::random_transducer(rng, g.structure, i, 2));
    CHECK(synthesis::validate_equilibrium(g, profile));
  }
}

TEST_CASE("validate_equilibrium: rejects an obvious unguarded deviation") {
  // Player 1 can reach the x-state on their own but the profile stays put;
  // player 2 has a single action and no say.
  game::LtlGame g;
  auto& m = g.structure;
  m.players = {"mover", "bystander"};
  m.actions = {{"stay", "go"}, {"wait"}};
  m.state_names = {"home", "goal"};
  m.initial = 0;
  m.avail = {{{0, 1}, {0}}, {{0, 1}, {0}}};
  m.tr.resize(2);
  m.tr[0][{0, 0}] = 0;
  m.tr[0][{1, 0}] = 1;
  m.tr[1][{0, 0}] = 1;
  m.tr[1][{1, 0}] = 1;
  m.validate();
  g.labels = {{}, {"x"}};
  g.goals = {ltl::parse_ltl("F x"), ltl::f_true()};

  game::StrategyTransducer stay;
  stay.num_states = 1;
  stay.output = {0};
  stay.next = {{{{0, 0}, 0}, {{1, 0}, 0}}};
  CHECK(!synthesis::validate_equilibrium(g, {stay, stay}));

  game::StrategyTransducer go = stay;
  go.output = {1};
  CHECK(synthesis::validate_equilibrium(g, {go, stay}));
}

TEST_CASE("strategy export: JSON parses and DOT renders") {
  game::LtlGame g = game::parse_arena(read_fixture("bisim1.arena"));
  equilibrium::Verdict v = equilibrium::non_emptiness(g);
  REQUIRE(v.yes);
  game::ParityGame par = goal_product(g);
  auto pun = loser_punishments(par, v.winners);
  auto profile = synthesis::synthesize_profile(par, v.winners, *v.witness, pun);

  std::string text = synthesis::transducer_to_json(profile[0], g.structure.actions[0]);
  nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("states").size() == profile[0].num_states);
  CHECK(j.at("initial").get<std::size_t>() == profile[0].initial);
  CHECK(j.at("transitions").size() >= profile[0].num_states);

  std::string dot = synthesis::transducer_to_dot(profile[0], g.structure.actions[0]);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("doublecircle") != std::string::npos);
}
