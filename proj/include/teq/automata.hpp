// teq -- temporal equilibrium analysis toolkit
//
// ω-automata toolchain: LTL→NBW tableau translation, NBW→DPW
// determinization (Safra-style compact trees emitting parity directly),
// parity→Streett conversion, and Streett emptiness with lasso extraction.

#pragma once

#include <bitset>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teq/ltl.hpp"

namespace teq::automata {

/// Hard cap on NBW sizes fed into determinization (labels are fixed-width
/// bitsets); desk-scale formulas stay far below it.
inline constexpr std::size_t kMaxNbwStates = 512;

/// Alphabet of an automaton: the letters are the subsets of `atoms`,
/// encoded as bitmasks (bit i set iff atoms[i] holds).  Automata built from
/// a formula use only the atoms occurring in it; labels of richer systems
/// are projected onto this set.
struct Alphabet {
  std::vector<std::string> atoms;

  std::size_t num_letters() const { return std::size_t{1} << atoms.size(); }

  /// Project a label set onto this alphabet (atoms not listed are dropped).
  std::uint32_t project(const ltl::LabelSet& labels) const {
    std::uint32_t letter = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (labels.count(atoms[i])) letter |= std::uint32_t{1} << i;
    return letter;
  }
};

struct NondeterministicBuchiAutomaton {
  Alphabet sigma;
  std::size_t num_states = 0;
  std::vector<std::size_t> initial;
  /// delta[state][letter] = ascending successor list.
  std::vector<std::vector<std::vector<std::size_t>>> delta;
  std::vector<char> accepting;
};

struct DeterministicParityAutomaton {
  Alphabet sigma;
  std::size_t num_states = 0;
  std::size_t initial = 0;
  /// rho[state][letter] = unique successor (total).
  std::vector<std::vector<std::size_t>> rho;
  /// Min-even acceptance: a run accepts iff the minimum priority occurring
  /// infinitely often is even.
  std::vector<int> priority;

  std::size_t step(std::size_t state, const ltl::LabelSet& labels) const {
    return rho[state][sigma.project(labels)];
  }
};

/// Tableau translation (declarative expansion over the NNF closure with an
/// Until-counter for degeneralization).  L(result) = models of f.
NondeterministicBuchiAutomaton ltl_to_nbw(const ltl::FormulaPtr& f);

/// Safra-style determinization producing a parity automaton directly.
/// Throws std::runtime_error when `cap` states would be exceeded.
DeterministicParityAutomaton nbw_to_dpw(const NondeterministicBuchiAutomaton& a,
                                        std::size_t cap = 1000000);

DeterministicParityAutomaton ltl_to_dpw(const ltl::FormulaPtr& f,
                                        std::size_t cap = 1000000);

/// Membership oracle: product-graph cycle search of automaton × lasso.
bool nbw_accepts_lasso(const NondeterministicBuchiAutomaton& a,
                       const ltl::UltimatelyPeriodicWord& w);

/// Simulate the unique run; answer = parity of the minimum priority on the
/// run's eventual cycle.
bool dpw_accepts_lasso(const DeterministicParityAutomaton& d,
                       const ltl::UltimatelyPeriodicWord& w);

/// One Streett acceptance pair over graph vertices: visit E finitely often
/// or C infinitely often.
struct StreettPair {
  std::vector<std::size_t> E;
  std::vector<std::size_t> C;
};

/// Normalised parity→Streett conversion: one pair per odd priority value p
/// present — E = vertices of priority exactly p, C = vertices with even
/// priority < p.  A cycle satisfies all pairs iff its minimum priority is
/// even.
std::vector<StreettPair> parity_to_streett(const std::vector<int>& priority);

/// Plain digraph with a designated initial vertex.
struct Digraph {
  std::size_t num_vertices = 0;
  std::size_t initial = 0;
  std::vector<std::vector<std::size_t>> succ;
};

/// Lasso of vertices: prefix from the initial vertex, then a cycle (the
/// last cycle vertex has an edge back to the first).
struct VertexLasso {
  std::vector<std::size_t> prefix;
  std::vector<std::size_t> cycle;
};

/// Emptiness of (graph, Streett condition) by recursive SCC refinement:
/// inside each SCC, pairs with E hit but C unhit delete their E-vertices;
/// a surviving SCC with an edge is accepting and yields a witness cycle
/// stitched through one C-vertex per constrained pair.
std::optional<VertexLasso> streett_emptiness(const Digraph& g,
                                             const std::vector<StreettPair>& cond);

/// Check a lasso against a Streett condition (replay validation).
bool lasso_satisfies_streett(const Digraph& g, const VertexLasso& lasso,
                             const std::vector<StreettPair>& cond);

/// DOT renderings for inspection (debug surface).
std::string to_dot(const NondeterministicBuchiAutomaton& a);
std::string to_dot(const DeterministicParityAutomaton& d);

}  // namespace teq::automata
