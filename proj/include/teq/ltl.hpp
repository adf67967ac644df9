// teq -- temporal equilibrium analysis toolkit
//
// LTL abstract syntax, parsing, normal forms, and direct evaluation of
// formulas on ultimately periodic words.  The evaluator is the ground-truth
// oracle against which every automaton construction downstream is tested.

#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace teq::ltl {

/// Node kinds of the LTL syntax tree.  The surface grammar covers
/// True/False, atoms, ~ & | ->, X, F, G and U; Release is internal only
/// (introduced by negation normal form, never parsed).
enum class Op {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Release,
  Eventually,
  Always,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable LTL syntax tree node.
struct Formula {
  Op op;
  std::string atom;  // valid iff op == Op::Atom
  FormulaPtr lhs;    // first child (unary operand)
  FormulaPtr rhs;    // second child of binary nodes
};

// Constructors.
FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_atom(std::string name);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_next(FormulaPtr a);
FormulaPtr f_until(FormulaPtr a, FormulaPtr b);
FormulaPtr f_release(FormulaPtr a, FormulaPtr b);
FormulaPtr f_eventually(FormulaPtr a);
FormulaPtr f_always(FormulaPtr a);

/// Conjunction/disjunction over a list (empty list = neutral element).
FormulaPtr f_and_all(const std::vector<FormulaPtr>& fs);
FormulaPtr f_or_all(const std::vector<FormulaPtr>& fs);

/// Thrown on malformed input, with 1-based line/column of the offence.
struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line, int column, const std::string& what);
};

/// Parse the surface grammar.  Precedence (tightest first):
/// unary (~ ! X F G) > U (right-associative) > & > | > -> (right-assoc).
FormulaPtr parse_ltl(const std::string& text);

/// Expand the derived operators: F φ = ⊤ U φ, G φ = ¬(⊤ U ¬φ),
/// φ -> ψ = ¬φ ∨ ψ.  Output contains no Eventually/Always/Implies nodes.
FormulaPtr to_core(const FormulaPtr& f);

/// Negation normal form: Not appears only directly above atoms; negated
/// Until becomes Release.  Eventually/Always/Implies are expanded first.
FormulaPtr to_nnf(const FormulaPtr& f);

/// Structural equality.
bool equal(const FormulaPtr& a, const FormulaPtr& b);

/// Bottom-up constant folding (⊤/⊥ absorption, duplicate-child collapse);
/// semantics-preserving, applied before automaton construction.
FormulaPtr simplify(const FormulaPtr& f);

/// Printable form that re-parses to the same tree (Release uses 'R' and is
/// only meaningful for internal diagnostics).
std::string to_string(const FormulaPtr& f);

/// Set of atom names occurring in the formula.
std::set<std::string> atoms(const FormulaPtr& f);

/// Number of operator nodes (atoms and constants count as zero).
int operator_count(const FormulaPtr& f);

/// A position's labelling: the set of atomic propositions holding there.
using LabelSet = std::set<std::string>;

/// Ultimately periodic ω-word  prefix · cycle^ω.
struct UltimatelyPeriodicWord {
  std::vector<LabelSet> prefix;
  std::vector<LabelSet> cycle;  // nonempty

  /// Label at unrolled position t.
  const LabelSet& at(std::size_t t) const {
    if (t < prefix.size()) return prefix[t];
    return cycle[(t - prefix.size()) % cycle.size()];
  }
};

/// Equivalent representation with the first cycle iteration unrolled into
/// the prefix (used by re-representation invariance tests).
UltimatelyPeriodicWord unroll_once(const UltimatelyPeriodicWord& w);

/// Satisfaction of f at position 0 of the unrolled word.  Subformula truth
/// values are computed at every lasso position; Until/Eventually are least
/// fixpoints and Release/Always greatest fixpoints over the cycle, iterated
/// to stabilisation (which is asserted).
bool eval_lasso(const FormulaPtr& f, const UltimatelyPeriodicWord& w);

}  // namespace teq::ltl
