// Random formula / lasso / graph generators shared by the test suites.
// All generators take an explicit engine so test runs are reproducible.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "teq/ltl.hpp"

namespace teq::testgen {

inline std::vector<std::string> default_atoms(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

/// Random LTL formula with at most `max_ops` operators over the given atoms.
inline ltl::FormulaPtr random_formula(std::mt19937& rng,
                                      const std::vector<std::string>& atoms,
                                      int max_ops) {
  using namespace teq::ltl;
  std::uniform_int_distribution<int> leaf(0, static_cast<int>(atoms.size()) + 1);
  if (max_ops <= 0) {
    int k = leaf(rng);
    if (k == 0) return f_true();
    if (k == 1) return f_false();
    return f_atom(atoms[static_cast<std::size_t>(k - 2)]);
  }
  std::uniform_int_distribution<int> op(0, 8);
  std::uniform_int_distribution<int> split(0, max_ops - 1);
  switch (op(rng)) {
    case 0:
      return f_not(random_formula(rng, atoms, max_ops - 1));
    case 1:
      return f_next(random_formula(rng, atoms, max_ops - 1));
    case 2:
      return f_eventually(random_formula(rng, atoms, max_ops - 1));
    case 3:
      return f_always(random_formula(rng, atoms, max_ops - 1));
    case 4: {
      int l = split(rng);
      return f_and(random_formula(rng, atoms, l),
                   random_formula(rng, atoms, max_ops - 1 - l));
    }
    case 5: {
      int l = split(rng);
      return f_or(random_formula(rng, atoms, l),
                  random_formula(rng, atoms, max_ops - 1 - l));
    }
    case 6: {
      int l = split(rng);
      return f_implies(random_formula(rng, atoms, l),
                       random_formula(rng, atoms, max_ops - 1 - l));
    }
    default: {
      int l = split(rng);
      return f_until(random_formula(rng, atoms, l),
                     random_formula(rng, atoms, max_ops - 1 - l));
    }
  }
}

/// Random ultimately periodic word: prefix length ≤ max_positions-1,
/// cycle length in [1, max_positions - prefix].
inline ltl::UltimatelyPeriodicWord random_lasso(
    std::mt19937& rng, const std::vector<std::string>& atoms,
    int max_positions) {
  ltl::UltimatelyPeriodicWord w;
  std::uniform_int_distribution<int> plen(0, max_positions - 1);
  int p = plen(rng);
  std::uniform_int_distribution<int> clen(1, max_positions - p);
  int c = clen(rng);
  std::bernoulli_distribution coin(0.5);
  auto random_labels = [&]() {
    ltl::LabelSet s;
    for (const auto& a : atoms)
      if (coin(rng)) s.insert(a);
    return s;
  };
  for (int i = 0; i < p; ++i) w.prefix.push_back(random_labels());
  for (int i = 0; i < c; ++i) w.cycle.push_back(random_labels());
  return w;
}

}  // namespace teq::testgen
