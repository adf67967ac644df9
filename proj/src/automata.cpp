#include "teq/automata.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace teq::automata {

using ltl::Formula;
using ltl::FormulaPtr;
using ltl::Op;

// ---------------------------------------------------------------------------
// LTL → NBW (tableau over the NNF closure)
// ---------------------------------------------------------------------------

namespace {

// One way of satisfying an obligation set "now": literal constraints on the
// current letter, obligations postponed to the next position, and the Until
// subformulas whose promise was discharged in this step.
struct Cover {
  std::uint32_t pos = 0;       // atoms required true
  std::uint32_t neg = 0;       // atoms required false
  std::set<int> next;          // obligation ids for the successor state
  std::set<int> fulfilled;     // Until ids whose right-hand side was taken
};

struct Tableau {
  std::vector<const Formula*> nodes;                  // id → node
  std::unordered_map<const Formula*, int> id;         // node → id
  std::vector<int> untils;                            // ids of Until nodes
  std::unordered_map<std::string, int> atom_bit;      // atom → alphabet bit

  int intern(const FormulaPtr& f) {
    auto it = id.find(f.get());
    if (it != id.end()) return it->second;
    if (f->lhs) intern(f->lhs);
    if (f->rhs) intern(f->rhs);
    int k = static_cast<int>(nodes.size());
    id.emplace(f.get(), k);
    nodes.push_back(f.get());
    if (f->op == Op::Until) untils.push_back(k);
    return k;
  }

  // Expand the obligations into all covers.  `work` is the stack of
  // obligation ids still to decompose for the current branch.
  void expand(std::vector<int> work, Cover cur, std::vector<Cover>& out) const {
    while (!work.empty()) {
      int k = work.back();
      work.pop_back();
      const Formula* f = nodes[static_cast<std::size_t>(k)];
      switch (f->op) {
        case Op::True:
          break;
        case Op::False:
          return;  // inconsistent branch
        case Op::Atom: {
          std::uint32_t bit = 1u << atom_bit.at(f->atom);
          if (cur.neg & bit) return;
          cur.pos |= bit;
          break;
        }
        case Op::Not: {
          std::uint32_t bit = 1u << atom_bit.at(f->lhs->atom);
          if (cur.pos & bit) return;
          cur.neg |= bit;
          break;
        }
        case Op::And:
          work.push_back(id.at(f->lhs.get()));
          work.push_back(id.at(f->rhs.get()));
          break;
        case Op::Or: {
          std::vector<int> w2 = work;
          w2.push_back(id.at(f->lhs.get()));
          expand(std::move(w2), cur, out);
          work.push_back(id.at(f->rhs.get()));
          break;
        }
        case Op::Next:
          cur.next.insert(id.at(f->lhs.get()));
          break;
        case Op::Until: {
          // ψ now (promise discharged), or φ now and the Until next.
          std::vector<int> w2 = work;
          w2.push_back(id.at(f->rhs.get()));
          Cover c2 = cur;
          c2.fulfilled.insert(k);
          expand(std::move(w2), std::move(c2), out);
          work.push_back(id.at(f->lhs.get()));
          cur.next.insert(k);
          break;
        }
        case Op::Release: {
          // ψ ∧ φ now (released), or ψ now and the Release next.
          std::vector<int> w2 = work;
          w2.push_back(id.at(f->rhs.get()));
          w2.push_back(id.at(f->lhs.get()));
          expand(std::move(w2), cur, out);
          work.push_back(id.at(f->rhs.get()));
          cur.next.insert(k);
          break;
        }
        default:
          throw std::logic_error("tableau: formula not in NNF core");
      }
    }
    out.push_back(std::move(cur));
  }
};

// Drop states that cannot lie on an accepting run: unreachable states and
// states unable to reach an accepting cycle.  Language-preserving.
NondeterministicBuchiAutomaton prune_dead(const NondeterministicBuchiAutomaton& a) {
  const std::size_t num_letters = a.sigma.num_letters();
  std::vector<std::set<std::size_t>> succ(a.num_states), pred(a.num_states);
  for (std::size_t q = 0; q < a.num_states; ++q)
    for (std::uint32_t l = 0; l < num_letters; ++l)
      for (std::size_t r : a.delta[q][l]) succ[q].insert(r), pred[r].insert(q);

  std::vector<char> reach(a.num_states, 0);
  {
    std::queue<std::size_t> bfs;
    for (std::size_t q : a.initial)
      if (!reach[q]) reach[q] = 1, bfs.push(q);
    while (!bfs.empty()) {
      std::size_t q = bfs.front();
      bfs.pop();
      for (std::size_t r : succ[q])
        if (!reach[r]) reach[r] = 1, bfs.push(r);
    }
  }
  // Anchors: reachable accepting states that can return to themselves.
  std::vector<char> useful(a.num_states, 0);
  std::queue<std::size_t> back;
  for (std::size_t q = 0; q < a.num_states; ++q) {
    if (!reach[q] || !a.accepting[q]) continue;
    std::vector<char> seen(a.num_states, 0);
    std::queue<std::size_t> bfs;
    for (std::size_t r : succ[q])
      if (!seen[r]) seen[r] = 1, bfs.push(r);
    while (!bfs.empty() && !seen[q]) {
      std::size_t v = bfs.front();
      bfs.pop();
      for (std::size_t r : succ[v])
        if (!seen[r]) seen[r] = 1, bfs.push(r);
    }
    if (seen[q] && !useful[q]) useful[q] = 1, back.push(q);
  }
  while (!back.empty()) {
    std::size_t q = back.front();
    back.pop();
    for (std::size_t r : pred[q])
      if (!useful[r] && reach[r]) useful[r] = 1, back.push(r);
  }

  std::vector<char> keep(a.num_states, 0);
  bool live_initial = false;
  for (std::size_t q : a.initial) live_initial = live_initial || (reach[q] && useful[q]);
  for (std::size_t q = 0; q < a.num_states; ++q) keep[q] = reach[q] && useful[q];
  if (!live_initial) {
    // Empty language: single rejecting stuck state.
    NondeterministicBuchiAutomaton out;
    out.sigma = a.sigma;
    out.num_states = 1;
    out.delta.assign(1, std::vector<std::vector<std::size_t>>(num_letters));
    out.accepting.assign(1, 0);
    out.initial = {0};
    return out;
  }

  std::vector<std::size_t> renum(a.num_states, 0);
  std::size_t next = 0;
  for (std::size_t q = 0; q < a.num_states; ++q)
    if (keep[q]) renum[q] = next++;
  NondeterministicBuchiAutomaton out;
  out.sigma = a.sigma;
  out.num_states = next;
  out.delta.assign(next, std::vector<std::vector<std::size_t>>(num_letters));
  out.accepting.assign(next, 0);
  for (std::size_t q = 0; q < a.num_states; ++q) {
    if (!keep[q]) continue;
    out.accepting[renum[q]] = a.accepting[q];
    for (std::uint32_t l = 0; l < num_letters; ++l)
      for (std::size_t r : a.delta[q][l])
        if (keep[r]) out.delta[renum[q]][l].push_back(renum[r]);
  }
  for (std::size_t q : a.initial)
    if (keep[q]) out.initial.push_back(renum[q]);
  std::sort(out.initial.begin(), out.initial.end());
  out.initial.erase(std::unique(out.initial.begin(), out.initial.end()),
                    out.initial.end());
  return out;
}

// Direct-simulation reduction: quotient by simulation equivalence, then drop
// "little brother" transitions (and initial states) that another simulating
// successor subsumes.  Both operations preserve the language and typically
// shrink determinization inputs far more than bisimulation alone.
NondeterministicBuchiAutomaton sim_reduce(const NondeterministicBuchiAutomaton& a) {
  const std::size_t n = a.num_states;
  const std::size_t num_letters = a.sigma.num_letters();
  // sim[q][r] == 1 iff r direct-simulates q.
  std::vector<std::vector<char>> sim(n, std::vector<char>(n, 1));
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t r = 0; r < n; ++r)
      if (a.accepting[q] && !a.accepting[r]) sim[q][r] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t r = 0; r < n; ++r) {
        if (!sim[q][r]) continue;
        bool ok = true;
        for (std::uint32_t l = 0; l < num_letters && ok; ++l) {
          for (std::size_t qs : a.delta[q][l]) {
            bool matched = false;
            for (std::size_t rs : a.delta[r][l])
              if (sim[qs][rs]) { matched = true; break; }
            if (!matched) { ok = false; break; }
          }
        }
        if (!ok) sim[q][r] = 0, changed = true;
      }
    }
  }

  // Blocks of simulation-equivalent states.
  std::vector<int> block(n, -1);
  int num_blocks = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (block[q] >= 0) continue;
    block[q] = num_blocks++;
    for (std::size_t r = q + 1; r < n; ++r)
      if (block[r] < 0 && sim[q][r] && sim[r][q]) block[r] = block[q];
  }
  auto block_sim = [&](int b1, int b2) {
    for (std::size_t q = 0; q < n; ++q)
      if (block[q] == b1)
        for (std::size_t r = 0; r < n; ++r)
          if (block[r] == b2) return sim[q][r] != 0;
    return false;
  };

  NondeterministicBuchiAutomaton out;
  out.sigma = a.sigma;
  out.num_states = static_cast<std::size_t>(num_blocks);
  out.delta.assign(out.num_states,
                   std::vector<std::vector<std::size_t>>(num_letters));
  out.accepting.assign(out.num_states, 0);
  std::vector<std::vector<std::set<std::size_t>>> dset(
      out.num_states, std::vector<std::set<std::size_t>>(num_letters));
  for (std::size_t q = 0; q < n; ++q) {
    std::size_t b = static_cast<std::size_t>(block[q]);
    if (a.accepting[q]) out.accepting[b] = 1;
    for (std::uint32_t l = 0; l < num_letters; ++l)
      for (std::size_t r : a.delta[q][l])
        dset[b][l].insert(static_cast<std::size_t>(block[r]));
  }
  for (std::size_t b = 0; b < out.num_states; ++b) {
    for (std::uint32_t l = 0; l < num_letters; ++l) {
      std::vector<std::size_t> succs(dset[b][l].begin(), dset[b][l].end());
      // Little brothers: drop successors strictly simulated by a sibling.
      std::vector<std::size_t> maximal;
      for (std::size_t s : succs) {
        bool dominated = false;
        for (std::size_t t : succs)
          if (t != s && block_sim(static_cast<int>(s), static_cast<int>(t)))
            dominated = true;
        if (!dominated) maximal.push_back(s);
      }
      out.delta[b][l] = std::move(maximal);
    }
  }
  std::set<std::size_t> inits;
  for (std::size_t q : a.initial) inits.insert(static_cast<std::size_t>(block[q]));
  for (std::size_t b : inits) {
    bool dominated = false;
    for (std::size_t c : inits)
      if (c != b && block_sim(static_cast<int>(b), static_cast<int>(c)))
        dominated = true;
    if (!dominated) out.initial.push_back(b);
  }
  return out;
}

/// Iterate pruning and simulation reduction to a fixpoint (edge removal can
/// create fresh dead states and vice versa).
NondeterministicBuchiAutomaton prune_and_quotient(NondeterministicBuchiAutomaton a) {
  auto weight = [](const NondeterministicBuchiAutomaton& x) {
    std::size_t edges = 0;
    for (const auto& row : x.delta)
      for (const auto& cell : row) edges += cell.size();
    return std::make_pair(x.num_states, edges);
  };
  for (;;) {
    auto before = weight(a);
    a = sim_reduce(prune_dead(a));
    if (weight(a) == before) return a;
  }
}

}  // namespace

NondeterministicBuchiAutomaton ltl_to_nbw(const ltl::FormulaPtr& f) {
  FormulaPtr n = ltl::simplify(ltl::to_nnf(f));

  NondeterministicBuchiAutomaton a;
  {
    auto as = ltl::atoms(n);
    a.sigma.atoms.assign(as.begin(), as.end());
    if (a.sigma.atoms.size() > 20)
      throw std::runtime_error("ltl_to_nbw: too many distinct atoms (> 20)");
  }

  Tableau tab;
  for (std::size_t i = 0; i < a.sigma.atoms.size(); ++i)
    tab.atom_bit.emplace(a.sigma.atoms[i], static_cast<int>(i));
  int root = tab.intern(n);
  const int m = static_cast<int>(tab.untils.size());

  // State = (obligation set, counter ∈ [0, m]); accepting iff counter == m.
  using Oblig = std::vector<int>;  // sorted ids
  std::map<std::pair<Oblig, int>, std::size_t> state_id;
  std::vector<std::pair<Oblig, int>> states;
  std::map<Oblig, std::vector<Cover>> cover_cache;

  auto get_state = [&](Oblig ob, int counter) {
    auto key = std::make_pair(std::move(ob), counter);
    auto it = state_id.find(key);
    if (it != state_id.end()) return it->second;
    std::size_t k = states.size();
    state_id.emplace(key, k);
    states.push_back(state_id.find(key)->first);
    return k;
  };

  std::size_t init = get_state(Oblig{root}, 0);
  a.initial.push_back(init);

  const std::size_t num_letters = a.sigma.num_letters();
  std::vector<char> queued{1};
  std::queue<std::size_t> todo;
  todo.push(init);
  std::vector<std::vector<std::vector<std::size_t>>> delta;
  while (!todo.empty()) {
    std::size_t s = todo.front();
    todo.pop();
    auto [ob, counter] = states[s];
    auto cit = cover_cache.find(ob);
    if (cit == cover_cache.end()) {
      std::vector<Cover> covers;
      tab.expand(std::vector<int>(ob.begin(), ob.end()), Cover{}, covers);
      cit = cover_cache.emplace(ob, std::move(covers)).first;
    }

    std::vector<std::set<std::size_t>> succ(num_letters);
    for (const Cover& c : cit->second) {
      // Counter scheme: at m, reset to 0; below m, advance when the watched
      // Until is not obligated or was discharged in this very step.
      int base = counter == m ? 0 : counter;
      int next_counter = base;
      if (base < m) {
        int u = tab.untils[static_cast<std::size_t>(base)];
        bool good = !std::binary_search(ob.begin(), ob.end(), u) || c.fulfilled.count(u);
        if (good) next_counter = base + 1;
      }
      Oblig next_ob(c.next.begin(), c.next.end());
      std::size_t t = get_state(std::move(next_ob), next_counter);
      queued.resize(states.size(), 0);
      if (!queued[t]) {
        queued[t] = 1;
        todo.push(t);
      }
      for (std::uint32_t letter = 0; letter < num_letters; ++letter)
        if ((letter & c.pos) == c.pos && (letter & c.neg) == 0)
          succ[letter].insert(t);
    }
    delta.resize(states.size());
    delta[s].assign(num_letters, {});
    for (std::uint32_t letter = 0; letter < num_letters; ++letter)
      delta[s][letter].assign(succ[letter].begin(), succ[letter].end());
  }

  a.num_states = states.size();
  delta.resize(a.num_states);
  for (auto& row : delta)
    if (row.empty()) row.assign(num_letters, {});
  a.delta = std::move(delta);
  a.accepting.assign(a.num_states, 0);
  for (std::size_t s = 0; s < a.num_states; ++s)
    a.accepting[s] = states[s].second == m;
  return prune_and_quotient(a);
}

// ---------------------------------------------------------------------------
// NBW membership oracle
// ---------------------------------------------------------------------------

bool nbw_accepts_lasso(const NondeterministicBuchiAutomaton& a,
                       const ltl::UltimatelyPeriodicWord& w) {
  const std::size_t p = w.prefix.size();
  const std::size_t len = p + w.cycle.size();
  // Product nodes: (automaton state, lasso position).
  auto node = [&](std::size_t q, std::size_t t) { return q * len + t; };
  auto tsucc = [&](std::size_t t) { return t + 1 < len ? t + 1 : p; };

  std::vector<char> reach(a.num_states * len, 0);
  std::queue<std::size_t> bfs;
  for (std::size_t q : a.initial) {
    reach[node(q, 0)] = 1;
    bfs.push(node(q, 0));
  }
  auto expand_from = [&](std::vector<char>& seen, std::queue<std::size_t>& qq) {
    while (!qq.empty()) {
      std::size_t v = qq.front();
      qq.pop();
      std::size_t q = v / len, t = v % len;
      std::uint32_t letter = a.sigma.project(w.at(t));
      for (std::size_t r : a.delta[q][letter]) {
        std::size_t u = node(r, tsucc(t));
        if (!seen[u]) {
          seen[u] = 1;
          qq.push(u);
        }
      }
    }
  };
  expand_from(reach, bfs);

  // Accepting iff some reachable accepting node on the cycle part can reach
  // itself.
  for (std::size_t q = 0; q < a.num_states; ++q) {
    if (!a.accepting[q]) continue;
    for (std::size_t t = p; t < len; ++t) {
      std::size_t v = node(q, t);
      if (!reach[v]) continue;
      std::vector<char> seen(a.num_states * len, 0);
      std::queue<std::size_t> qq;
      std::uint32_t letter = a.sigma.project(w.at(t));
      for (std::size_t r : a.delta[q][letter]) {
        std::size_t u = node(r, tsucc(t));
        if (!seen[u]) seen[u] = 1, qq.push(u);
      }
      expand_from(seen, qq);
      if (seen[v]) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// NBW → DPW determinization (Safra-style compact trees)
// ---------------------------------------------------------------------------

namespace {

using StateSet = std::bitset<kMaxNbwStates>;

// Node names are 1-based positions in the vector; invariant: a parent's
// position precedes all its children's, and sibling age order is position
// order (older = smaller).
struct SafraNode {
  int parent = -1;  // index in tree vector, -1 for root
  StateSet label;
};

using SafraTree = std::vector<SafraNode>;

std::string encode(const SafraTree& t, int incoming_priority) {
  std::ostringstream os;
  os << incoming_priority << ';';
  for (const auto& n : t) {
    os << n.parent << ':';
    // Only the low words that can be populated matter; hash the full set.
    os << n.label.to_string() << '|';
  }
  return os.str();
}

}  // namespace

DeterministicParityAutomaton nbw_to_dpw(const NondeterministicBuchiAutomaton& a,
                                        std::size_t cap) {
  if (a.num_states > kMaxNbwStates)
    throw std::runtime_error("nbw_to_dpw: NBW exceeds supported size");
  const std::size_t num_letters = a.sigma.num_letters();
  const int n = static_cast<int>(a.num_states);
  // Neutral priority: strictly larger than any event priority (names during
  // a transition stay ≤ 2n, so odd events stay ≤ 4n-1).
  const int neutral = 4 * n + 1;

  // Per-letter successor sets of single NBW states.
  std::vector<std::vector<StateSet>> image(a.num_states,
                                           std::vector<StateSet>(num_letters));
  StateSet acc_mask;
  for (std::size_t q = 0; q < a.num_states; ++q) {
    if (a.accepting[q]) acc_mask.set(q);
    for (std::uint32_t l = 0; l < num_letters; ++l)
      for (std::size_t r : a.delta[q][l]) image[q][l].set(r);
  }

  DeterministicParityAutomaton d;
  d.sigma = a.sigma;

  std::map<std::string, std::size_t> ids;
  std::vector<std::pair<SafraTree, int>> states;  // (tree, incoming priority)

  auto get_state = [&](const SafraTree& t, int pri) {
    std::string key = encode(t, pri);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (states.size() >= cap)
      throw std::runtime_error("nbw_to_dpw: determinization cap exceeded");
    std::size_t k = states.size();
    ids.emplace(std::move(key), k);
    states.emplace_back(t, pri);
    return k;
  };

  SafraTree init_tree;
  {
    StateSet init_set;
    for (std::size_t q : a.initial) init_set.set(q);
    if (init_set.any()) init_tree.push_back(SafraNode{-1, init_set});
  }
  d.initial = get_state(init_tree, neutral);

  std::queue<std::size_t> todo;
  todo.push(d.initial);
  while (!todo.empty()) {
    std::size_t s = todo.front();
    todo.pop();
    if (d.rho.size() <= s) d.rho.resize(states.size());
    if (!d.rho[s].empty()) continue;
    SafraTree tree = states[s].first;  // copy
    d.rho[s].assign(num_letters, 0);

    for (std::uint32_t letter = 0; letter < num_letters; ++letter) {
      SafraTree t = tree;
      const std::size_t old_count = t.size();

      // 1. Powerset move.
      for (auto& node : t) {
        StateSet img;
        for (std::size_t q = 0; q < a.num_states; ++q)
          if (node.label.test(q)) img |= image[q][letter];
        node.label = img;
      }
      // 2. Spawn a youngest child for every original node hitting F.
      for (std::size_t v = 0; v < old_count; ++v) {
        StateSet hit = t[v].label & acc_mask;
        if (hit.any()) t.push_back(SafraNode{static_cast<int>(v), hit});
      }
      // 3. Horizontal dedup: a state survives only in the oldest sibling
      // containing it; removals propagate through subtrees via clear masks.
      std::vector<StateSet> clearmask(t.size());
      std::vector<StateSet> seen_children(t.size());
      for (std::size_t v = 0; v < t.size(); ++v) {
        if (t[v].parent >= 0) {
          std::size_t p = static_cast<std::size_t>(t[v].parent);
          clearmask[v] |= clearmask[p] | seen_children[p];
          seen_children[p] |= t[v].label & ~clearmask[v];
        }
        t[v].label &= ~clearmask[v];
      }
      // 4. Remove emptied nodes (bad events, min name).
      // 5. Detect green nodes (label covered by children) and drop their
      //    descendants.
      std::vector<char> dead(t.size(), 0);
      int min_dead = -1, min_green = -1;
      std::vector<StateSet> child_union(t.size());
      for (std::size_t v = 0; v < t.size(); ++v) {
        if (t[v].parent >= 0 && dead[static_cast<std::size_t>(t[v].parent)])
          dead[v] = 1;
        if (!dead[v] && t[v].label.none()) {
          dead[v] = 1;
          if (min_dead < 0) min_dead = static_cast<int>(v) + 1;
        }
        if (!dead[v] && t[v].parent >= 0)
          child_union[static_cast<std::size_t>(t[v].parent)] |= t[v].label;
      }
      // Greens are checked top-down against surviving children; a green
      // node's descendants die without counting as bad events.
      std::vector<char> killed_by_green(t.size(), 0);
      for (std::size_t v = 0; v < t.size(); ++v) {
        if (dead[v] || killed_by_green[v]) continue;
        if (t[v].parent >= 0) {
          std::size_t p = static_cast<std::size_t>(t[v].parent);
          if (killed_by_green[p] ||
              (!dead[p] && child_union[p].any() && child_union[p] == t[p].label)) {
            killed_by_green[v] = 1;
            continue;
          }
        }
        if (child_union[v].any() && child_union[v] == t[v].label) {
          if (min_green < 0) min_green = static_cast<int>(v) + 1;
        }
      }
      // Transition priority (min-even convention): a death of name e emits
      // 2e-1, a green of name f emits 2f; neutral otherwise.
      int pri = neutral;
      if (min_dead > 0) pri = std::min(pri, 2 * min_dead - 1);
      if (min_green > 0) pri = std::min(pri, 2 * min_green);

      // Recompute child unions after green kills to clear green subtrees.
      for (std::size_t v = 0; v < t.size(); ++v)
        if (killed_by_green[v]) dead[v] = 1;

      // 6. Rename compactly (order-preserving) and rebuild parents.
      SafraTree out;
      std::vector<int> newname(t.size(), -1);
      for (std::size_t v = 0; v < t.size(); ++v) {
        if (dead[v]) continue;
        newname[v] = static_cast<int>(out.size());
        int par = t[v].parent;
        out.push_back(SafraNode{par < 0 ? -1 : newname[static_cast<std::size_t>(par)],
                                t[v].label});
      }

      std::size_t target = get_state(out, pri);
      d.rho[s][letter] = target;
      if (d.rho.size() <= target) d.rho.resize(states.size());
      if (d.rho[target].empty()) todo.push(target);
    }
  }

  d.num_states = states.size();
  d.rho.resize(d.num_states);
  d.priority.resize(d.num_states);
  for (std::size_t s = 0; s < d.num_states; ++s) d.priority[s] = states[s].second;
  return d;
}

DeterministicParityAutomaton ltl_to_dpw(const ltl::FormulaPtr& f, std::size_t cap) {
  return nbw_to_dpw(ltl_to_nbw(f), cap);
}

bool dpw_accepts_lasso(const DeterministicParityAutomaton& d,
                       const ltl::UltimatelyPeriodicWord& w) {
  std::size_t q = d.initial;
  for (const auto& l : w.prefix) q = d.step(q, l);
  // Iterate the cycle until (state, cycle position) repeats.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  std::vector<std::size_t> trace;  // states at successive cycle steps
  std::size_t pos = 0;
  while (true) {
    auto key = std::make_pair(q, pos);
    auto it = seen.find(key);
    if (it != seen.end()) {
      int min_pri = d.priority[trace[it->second]];
      for (std::size_t i = it->second; i < trace.size(); ++i)
        min_pri = std::min(min_pri, d.priority[trace[i]]);
      return min_pri % 2 == 0;
    }
    seen.emplace(key, trace.size());
    trace.push_back(q);
    q = d.step(q, w.cycle[pos]);
    pos = (pos + 1) % w.cycle.size();
  }
}

// ---------------------------------------------------------------------------
// Parity → Streett
// ---------------------------------------------------------------------------

std::vector<StreettPair> parity_to_streett(const std::vector<int>& priority) {
  std::set<int> odd;
  for (int p : priority)
    if (p % 2 != 0) odd.insert(p);
  std::vector<StreettPair> pairs;
  for (int p : odd) {
    StreettPair pair;
    for (std::size_t v = 0; v < priority.size(); ++v) {
      if (priority[v] == p) pair.E.push_back(v);
      if (priority[v] % 2 == 0 && priority[v] < p) pair.C.push_back(v);
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Streett emptiness (SCC refinement with witness stitching)
// ---------------------------------------------------------------------------

namespace {

// Tarjan SCC restricted to `alive`; returns list of components.
std::vector<std::vector<std::size_t>> sccs(const Digraph& g,
                                           const std::vector<char>& alive) {
  std::vector<int> index(g.num_vertices, -1), low(g.num_vertices, 0);
  std::vector<char> on_stack(g.num_vertices, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;

  // Iterative Tarjan.
  struct Frame {
    std::size_t v;
    std::size_t child;
  };
  for (std::size_t root = 0; root < g.num_vertices; ++root) {
    if (!alive[root] || index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < g.succ[f.v].size()) {
        std::size_t w = g.succ[f.v][f.child++];
        if (!alive[w]) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<std::size_t> comp;
          while (true) {
            std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp.push_back(w);
            if (w == f.v) break;
          }
          out.push_back(std::move(comp));
        }
        std::size_t v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  return out;
}

// BFS shortest path within `alive`, from `from` to any vertex in `targets`;
// when `require_edge` the path must contain at least one edge.
std::optional<std::vector<std::size_t>> bfs_path(const Digraph& g,
                                                 const std::vector<char>& alive,
                                                 std::size_t from,
                                                 const std::vector<char>& target,
                                                 bool require_edge) {
  if (!require_edge && target[from]) return std::vector<std::size_t>{from};
  std::vector<int> pred(g.num_vertices, -2);
  std::queue<std::size_t> q;
  for (std::size_t w : g.succ[from]) {
    if (!alive[w] || pred[w] != -2) continue;
    pred[w] = static_cast<int>(from);
    q.push(w);
  }
  std::optional<std::size_t> found;
  if (!q.empty() && target[q.front()]) found = q.front();
  while (!q.empty() && !found) {
    std::size_t v = q.front();
    q.pop();
    if (target[v]) {
      found = v;
      break;
    }
    for (std::size_t w : g.succ[v]) {
      if (!alive[w] || pred[w] != -2) continue;
      pred[w] = static_cast<int>(v);
      q.push(w);
    }
  }
  if (!found) return std::nullopt;
  std::vector<std::size_t> path{*found};
  while (path.back() != from || path.size() == 1) {
    int p = pred[path.back()];
    if (p < 0) break;
    path.push_back(static_cast<std::size_t>(p));
    if (static_cast<std::size_t>(p) == from) break;
  }
  path.push_back(from);
  // The loop above may push `from` twice when found == from via a cycle.
  if (path.size() >= 2 && path[path.size() - 1] == path[path.size() - 2])
    path.pop_back();
  std::reverse(path.begin(), path.end());
  return path;
}

struct EmptinessSearch {
  const Digraph& g;
  const std::vector<StreettPair>& cond;
  std::optional<std::vector<std::size_t>> cycle;  // result (closed walk)

  // Recursively refine `alive`; on success fills `cycle` and returns true.
  bool refine(std::vector<char> alive) {
    for (const auto& comp : sccs(g, alive)) {
      // Restrict attention to this component.
      std::vector<char> in_comp(g.num_vertices, 0);
      for (std::size_t v : comp) in_comp[v] = 1;
      bool has_edge = false;
      for (std::size_t v : comp) {
        for (std::size_t w : g.succ[v])
          if (in_comp[w]) {
            has_edge = true;
            break;
          }
        if (has_edge) break;
      }
      if (!has_edge) continue;  // trivial SCC

      std::vector<std::size_t> bad;  // pairs with E hit but C unhit
      for (std::size_t k = 0; k < cond.size(); ++k) {
        bool e_hit = false, c_hit = false;
        for (std::size_t v : cond[k].E) e_hit = e_hit || in_comp[v];
        for (std::size_t v : cond[k].C) c_hit = c_hit || in_comp[v];
        if (e_hit && !c_hit) bad.push_back(k);
      }
      if (bad.empty()) {
        build_cycle(in_comp);
        return true;
      }
      std::vector<char> shrunk = in_comp;
      for (std::size_t k : bad)
        for (std::size_t v : cond[k].E) shrunk[v] = 0;
      if (refine(std::move(shrunk))) return true;
    }
    return false;
  }

  // Stitch a closed walk inside the accepting component that visits one
  // C-vertex of every pair whose E intersects the component.
  void build_cycle(const std::vector<char>& in_comp) {
    std::vector<std::size_t> targets;
    for (const auto& pair : cond) {
      bool e_hit = false;
      for (std::size_t v : pair.E) e_hit = e_hit || in_comp[v];
      if (!e_hit) continue;
      for (std::size_t v : pair.C)
        if (in_comp[v]) {
          targets.push_back(v);
          break;
        }
    }
    std::size_t start = 0;
    if (!targets.empty()) {
      start = targets.front();
    } else {
      for (std::size_t v = 0; v < g.num_vertices; ++v)
        if (in_comp[v]) {
          start = v;
          break;
        }
    }
    std::vector<std::size_t> walk{start};
    std::size_t cur = start;
    for (std::size_t t : targets) {
      std::vector<char> tgt(g.num_vertices, 0);
      tgt[t] = 1;
      auto path = bfs_path(g, in_comp, cur, tgt, false);
      assert(path);
      walk.insert(walk.end(), path->begin() + 1, path->end());
      cur = t;
    }
    std::vector<char> home(g.num_vertices, 0);
    home[start] = 1;
    auto back = bfs_path(g, in_comp, cur, home, /*require_edge=*/true);
    assert(back);
    walk.insert(walk.end(), back->begin() + 1, back->end());
    walk.pop_back();  // closed walk: drop the repeated start
    cycle = std::move(walk);
  }
};

}  // namespace

std::optional<VertexLasso> streett_emptiness(const Digraph& g,
                                             const std::vector<StreettPair>& cond) {
  if (g.num_vertices == 0) return std::nullopt;
  // Reachable set from the initial vertex.
  std::vector<char> alive(g.num_vertices, 0);
  {
    std::queue<std::size_t> q;
    alive[g.initial] = 1;
    q.push(g.initial);
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop();
      for (std::size_t w : g.succ[v])
        if (!alive[w]) {
          alive[w] = 1;
          q.push(w);
        }
    }
  }

  EmptinessSearch search{g, cond, std::nullopt};
  if (!search.refine(alive)) return std::nullopt;

  VertexLasso lasso;
  lasso.cycle = *search.cycle;
  // Prefix from the initial vertex through the full reachable graph.
  std::vector<char> tgt(g.num_vertices, 0);
  tgt[lasso.cycle.front()] = 1;
  auto path = bfs_path(g, alive, g.initial, tgt, false);
  assert(path);
  lasso.prefix.assign(path->begin(), path->end() - 1);
  return lasso;
}

bool lasso_satisfies_streett(const Digraph& g, const VertexLasso& lasso,
                             const std::vector<StreettPair>& cond) {
  if (lasso.cycle.empty()) return false;
  // Replay: consecutive edges must exist and the cycle must close.
  std::vector<std::size_t> path = lasso.prefix;
  path.insert(path.end(), lasso.cycle.begin(), lasso.cycle.end());
  if (path.front() != g.initial && !(lasso.prefix.empty() && lasso.cycle.front() == g.initial))
    return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& row = g.succ[path[i]];
    if (std::find(row.begin(), row.end(), path[i + 1]) == row.end()) return false;
  }
  const auto& row = g.succ[path.back()];
  if (std::find(row.begin(), row.end(), lasso.cycle.front()) == row.end()) return false;

  std::vector<char> on_cycle(g.num_vertices, 0);
  for (std::size_t v : lasso.cycle) on_cycle[v] = 1;
  for (const auto& pair : cond) {
    bool e_hit = false, c_hit = false;
    for (std::size_t v : pair.E) e_hit = e_hit || on_cycle[v];
    for (std::size_t v : pair.C) c_hit = c_hit || on_cycle[v];
    if (e_hit && !c_hit) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

namespace {

std::string letter_name(const Alphabet& sigma, std::uint32_t letter) {
  std::string out = "{";
  for (std::size_t i = 0; i < sigma.atoms.size(); ++i)
    if (letter & (1u << i)) {
      if (out.size() > 1) out += ",";
      out += sigma.atoms[i];
    }
  return out + "}";
}

}  // namespace

std::string to_dot(const NondeterministicBuchiAutomaton& a) {
  std::ostringstream os;
  os << "digraph nbw {\n  rankdir=LR;\n";
  for (std::size_t q = 0; q < a.num_states; ++q)
    os << "  q" << q << " [shape=" << (a.accepting[q] ? "doublecircle" : "circle")
       << "];\n";
  for (std::size_t q : a.initial) os << "  init -> q" << q << ";\n";
  os << "  init [shape=point];\n";
  for (std::size_t q = 0; q < a.num_states; ++q)
    for (std::uint32_t l = 0; l < a.sigma.num_letters(); ++l)
      for (std::size_t r : a.delta[q][l])
        os << "  q" << q << " -> q" << r << " [label=\""
           << letter_name(a.sigma, l) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string to_dot(const DeterministicParityAutomaton& d) {
  std::ostringstream os;
  os << "digraph dpw {\n  rankdir=LR;\n";
  for (std::size_t q = 0; q < d.num_states; ++q)
    os << "  q" << q << " [label=\"q" << q << ":" << d.priority[q] << "\"];\n";
  os << "  init [shape=point];\n  init -> q" << d.initial << ";\n";
  for (std::size_t q = 0; q < d.num_states; ++q)
    for (std::uint32_t l = 0; l < d.sigma.num_letters(); ++l)
      os << "  q" << q << " -> q" << d.rho[q][l] << " [label=\""
         << letter_name(d.sigma, l) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace teq::automata
