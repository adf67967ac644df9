// teq -- temporal equilibrium analysis toolkit
//
// SRML guarded-command language: parsing and compilation of a module
// system into a concurrent game structure with labelling and goals.

#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "teq/game.hpp"
#include "teq/ltl.hpp"

namespace teq::srml {

/// g : φ ⇝ x'_1 := ψ_1; …; x'_k := ψ_k.  Guard and right-hand sides are
/// propositional formulas over the whole system's variables.
struct GuardedCommand {
  ltl::FormulaPtr guard;
  std::vector<std::pair<std::string, ltl::FormulaPtr>> assigns;
};

/// m_i = (Φ_i, I_i, U_i) plus the module's goal γ_i.
struct SrmlModule {
  std::string name;
  std::vector<std::string> controls;
  std::vector<GuardedCommand> inits;
  std::vector<GuardedCommand> updates;
  ltl::FormulaPtr goal;
};

struct SrmlSystem {
  std::vector<SrmlModule> modules;
  std::set<std::string> variables;  // AP = ∪ Φ_i
};

/// Parse the SRML format; throws ltl::ParseError with 1-based positions on
/// syntax errors and on semantic violations (duplicate controlled variable,
/// assignment to a foreign variable, conflicting assignments).
SrmlSystem parse_srml(const std::string& text);

/// Compile to an LTL game: a fresh pre-initial state (labelled ∅) whose
/// actions are the enabled init commands, then reachable valuations of the
/// system variables.  A module with no enabled command gets a single idle
/// action preserving its variables.  Player i's action names are
/// "init#k" / "update#k" / "idle".  Throws std::runtime_error when more
/// than `cap` states are reached.
game::LtlGame build_cgs(const SrmlSystem& sys, std::size_t cap = 1000000);

}  // namespace teq::srml
