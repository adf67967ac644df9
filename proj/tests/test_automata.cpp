#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "random_gen.hpp"
#include "teq/automata.hpp"
#include "teq/ltl.hpp"

using namespace teq;
using namespace teq::automata;
using ltl::parse_ltl;
using ltl::UltimatelyPeriodicWord;

namespace {

UltimatelyPeriodicWord word(std::vector<ltl::LabelSet> prefix,
                            std::vector<ltl::LabelSet> cycle) {
  return UltimatelyPeriodicWord{std::move(prefix), std::move(cycle)};
}

Digraph random_digraph(std::mt19937& rng, std::size_t n, double p) {
  Digraph g;
  g.num_vertices = n;
  g.initial = 0;
  g.succ.resize(n);
  std::bernoulli_distribution edge(p);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (edge(rng)) g.succ[v].push_back(w);
  return g;
}

// Exact emptiness oracle: a satisfying lasso exists iff some reachable
// vertex subset induces a strongly connected subgraph with an edge whose
// vertex set meets every pair constraint.
bool streett_nonempty_oracle(const Digraph& g,
                             const std::vector<StreettPair>& cond) {
  std::vector<char> reach(g.num_vertices, 0);
  std::vector<std::size_t> stack{g.initial};
  reach[g.initial] = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : g.succ[v])
      if (!reach[w]) reach[w] = 1, stack.push_back(w);
  }
  const std::size_t n = g.num_vertices;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool all_reach = true;
    for (std::size_t v = 0; v < n; ++v)
      if ((mask & (1u << v)) && !reach[v]) all_reach = false;
    if (!all_reach) continue;
    // strong connectivity of the induced subgraph, with at least one edge
    std::size_t first = 0;
    while (!(mask & (1u << first))) ++first;
    bool has_edge = false;
    bool ok = true;
    for (std::size_t src = 0; src < n && ok; ++src) {
      if (!(mask & (1u << src))) continue;
      std::uint32_t seen = 0;
      std::vector<std::size_t> st{src};
      while (!st.empty()) {
        std::size_t v = st.back();
        st.pop_back();
        for (std::size_t w : g.succ[v]) {
          if (!(mask & (1u << w))) continue;
          has_edge = true;
          if (!(seen & (1u << w))) {
            seen |= 1u << w;
            st.push_back(w);
          }
        }
      }
      if ((seen & mask) != mask) ok = false;
    }
    if (!ok || !has_edge) continue;
    bool sat = true;
    for (const auto& pair : cond) {
      bool e_hit = false, c_hit = false;
      for (std::size_t v : pair.E) e_hit = e_hit || (mask & (1u << v));
      for (std::size_t v : pair.C) c_hit = c_hit || (mask & (1u << v));
      if (e_hit && !c_hit) sat = false;
    }
    if (sat) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("NBW for F p: spec examples") {
  auto a = ltl_to_nbw(parse_ltl("F p"));
  CHECK(nbw_accepts_lasso(a, word({{}}, {{"p"}})));
  CHECK_FALSE(nbw_accepts_lasso(a, word({{}}, {{}})));
  CHECK(nbw_accepts_lasso(a, word({{"p"}}, {{}})));
}

TEST_CASE("NBW for G p") {
  auto a = ltl_to_nbw(parse_ltl("G p"));
  CHECK(nbw_accepts_lasso(a, word({}, {{"p"}})));
  CHECK_FALSE(nbw_accepts_lasso(a, word({{"p"}}, {{"p"}, {}})));
}

TEST_CASE("NBW for true accepts every sampled lasso") {
  auto a = ltl_to_nbw(parse_ltl("true"));
  std::mt19937 rng(3);
  auto atoms = testgen::default_atoms(2);
  for (int i = 0; i < 50; ++i)
    CHECK(nbw_accepts_lasso(a, testgen::random_lasso(rng, atoms, 6)));
}

TEST_CASE("NBW agrees with eval_lasso on random formulas") {
  std::mt19937 rng(5);
  auto atoms = testgen::default_atoms(3);
  for (int i = 0; i < 250; ++i) {
    auto f = testgen::random_formula(rng, atoms, 6);
    auto a = ltl_to_nbw(f);
    for (int j = 0; j < 4; ++j) {
      auto w = testgen::random_lasso(rng, atoms, 8);
      INFO("formula: ", ltl::to_string(f));
      CHECK(nbw_accepts_lasso(a, w) == ltl::eval_lasso(f, w));
    }
  }
}

TEST_CASE("DPW is deterministic and complete") {
  auto d = ltl_to_dpw(parse_ltl("G F p -> G F q"));
  for (std::size_t s = 0; s < d.num_states; ++s) {
    REQUIRE(d.rho[s].size() == d.sigma.num_letters());
    for (std::size_t succ : d.rho[s]) CHECK(succ < d.num_states);
  }
}

TEST_CASE("DPW spec examples") {
  auto d = ltl_to_dpw(parse_ltl("F p"));
  CHECK(dpw_accepts_lasso(d, word({{}}, {{"p"}})));
  CHECK_FALSE(dpw_accepts_lasso(d, word({{}, {}}, {{}})));
  auto bot = ltl_to_dpw(parse_ltl("false"));
  std::mt19937 rng(9);
  auto atoms = testgen::default_atoms(2);
  for (int i = 0; i < 30; ++i)
    CHECK_FALSE(dpw_accepts_lasso(bot, testgen::random_lasso(rng, atoms, 6)));
}

TEST_CASE("empty-language NBW determinizes to a rejecting DPW") {
  auto a = ltl_to_nbw(parse_ltl("p"));
  a.accepting.assign(a.num_states, 0);
  auto d = nbw_to_dpw(a);
  std::mt19937 rng(11);
  auto atoms = testgen::default_atoms(1);
  for (int i = 0; i < 30; ++i)
    CHECK_FALSE(dpw_accepts_lasso(d, testgen::random_lasso(rng, atoms, 5)));
}

TEST_CASE("DPW agrees with eval_lasso on 500+ random formula/lasso pairs") {
  std::mt19937 rng(13);
  auto atoms = testgen::default_atoms(3);
  int checks = 0;
  for (int i = 0; i < 180; ++i) {
    auto f = testgen::random_formula(rng, atoms, 6);
    auto d = ltl_to_dpw(f);
    for (int j = 0; j < 3; ++j) {
      auto w = testgen::random_lasso(rng, atoms, 8);
      INFO("formula: ", ltl::to_string(f));
      CHECK(dpw_accepts_lasso(d, w) == ltl::eval_lasso(f, w));
      ++checks;
    }
  }
  CHECK(checks >= 500);
}

TEST_CASE("DPW handles an already-deterministic structure") {
  // G p yields an essentially deterministic NBW; language must be preserved.
  auto a = ltl_to_nbw(parse_ltl("G p"));
  auto d = nbw_to_dpw(a);
  std::mt19937 rng(15);
  auto atoms = testgen::default_atoms(1);
  for (int i = 0; i < 50; ++i) {
    auto w = testgen::random_lasso(rng, atoms, 6);
    CHECK(dpw_accepts_lasso(d, w) == nbw_accepts_lasso(a, w));
  }
}

TEST_CASE("parity_to_streett: spec examples") {
  auto pairs = parity_to_streett({0, 1});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].E == std::vector<std::size_t>{1});
  CHECK(pairs[0].C == std::vector<std::size_t>{0});

  CHECK(parity_to_streett({0, 2, 4}).empty());

  auto three = parity_to_streett({1, 2, 3});
  CHECK(three.size() == 2);
}

TEST_CASE("parity_to_streett equivalent to min-parity on all recurrence sets") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> prio(0, 4);
  for (int iter = 0; iter < 60; ++iter) {
    Digraph g = random_digraph(rng, 6, 0.3);
    std::vector<int> priority(6);
    for (auto& p : priority) p = prio(rng);
    auto pairs = parity_to_streett(priority);
    // Over every strongly connected induced subset (candidate inf-set).
    for (std::uint32_t mask = 1; mask < 64; ++mask) {
      int min_pri = 1 << 20;
      for (std::size_t v = 0; v < 6; ++v)
        if (mask & (1u << v)) min_pri = std::min(min_pri, priority[v]);
      bool pairs_ok = true;
      for (const auto& pair : pairs) {
        bool e_hit = false, c_hit = false;
        for (std::size_t v : pair.E) e_hit = e_hit || (mask & (1u << v));
        for (std::size_t v : pair.C) c_hit = c_hit || (mask & (1u << v));
        if (e_hit && !c_hit) pairs_ok = false;
      }
      CHECK(pairs_ok == (min_pri % 2 == 0));
    }
  }
}

TEST_CASE("streett_emptiness: trivial cases") {
  Digraph g;
  g.num_vertices = 3;
  g.initial = 0;
  g.succ = {{1}, {2}, {1}};
  // zero pairs: some lasso
  auto lasso = streett_emptiness(g, {});
  REQUIRE(lasso.has_value());
  CHECK(lasso_satisfies_streett(g, *lasso, {}));

  // E = all vertices, C = ∅: no lasso
  StreettPair all{{0, 1, 2}, {}};
  CHECK_FALSE(streett_emptiness(g, {all}).has_value());
}

TEST_CASE("streett_emptiness matches exhaustive oracle on random graphs") {
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> npairs(0, 3);
  std::uniform_int_distribution<int> vert(0, 7);
  int count = 0;
  while (count < 220) {
    Digraph g = random_digraph(rng, 8, 0.22);
    std::vector<StreettPair> cond;
    int k = npairs(rng);
    for (int i = 0; i < k; ++i) {
      StreettPair pair;
      int ne = vert(rng) / 2 + 1, nc = vert(rng) / 2;
      for (int j = 0; j < ne; ++j) pair.E.push_back(static_cast<std::size_t>(vert(rng)));
      for (int j = 0; j < nc; ++j) pair.C.push_back(static_cast<std::size_t>(vert(rng)));
      cond.push_back(std::move(pair));
    }
    auto witness = streett_emptiness(g, cond);
    bool expect = streett_nonempty_oracle(g, cond);
    CHECK(witness.has_value() == expect);
    if (witness) CHECK(lasso_satisfies_streett(g, *witness, cond));
    ++count;
  }
}
