// teq -- temporal equilibrium analysis toolkit
//
// Command-line front end: equilibrium existence and temporal queries over
// games given as guarded-command module systems (.srml) or explicit arenas
// (.arena), plus strategy synthesis and a bisimulation check.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "teq/equilibrium.hpp"
#include "teq/game.hpp"
#include "teq/srml.hpp"
#include "teq/synthesis.hpp"

namespace {

namespace fs = std::filesystem;
using namespace teq;

int log_level() {
  const char* env = std::getenv("EVE_LOG");
  if (!env) return 0;
  std::string v = env;
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// Load a game, picking the parser by extension (falling back on content
/// sniffing: module systems start with the `module` keyword).
game::LtlGame load_game(const std::string& path) {
  std::string text = read_file(path);
  std::string ext = fs::path(path).extension().string();
  bool srml_input = ext == ".srml" ||
                    (ext != ".arena" && text.find_first_not_of(" \t\r\n") !=
                                            std::string::npos &&
                     text.compare(text.find_first_not_of(" \t\r\n"), 6,
                                  "module") == 0);
  try {
    if (srml_input) return srml::build_cgs(srml::parse_srml(text));
    return game::parse_arena(text);
  } catch (const ltl::ParseError& e) {
    throw std::runtime_error(path + ":" + std::to_string(e.line) + ":" +
                             std::to_string(e.column) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct RunConfig {
  std::string input;
  std::string input_b;  // bisim only
  std::string phi;
  std::string phi_file;
  bool json = false;
  std::size_t jobs = 1;
  bool deterministic = false;
  std::size_t max_states = 1000000;
  std::size_t max_automaton = 1000000;
  std::string export_dot;
  std::string out_dir = "strategies";
  bool force = false;
};

equilibrium::Options engine_options(const RunConfig& cfg) {
  equilibrium::Options opt;
  opt.max_product_states = cfg.max_states;
  opt.max_automaton_states = cfg.max_automaton;
  opt.jobs = cfg.deterministic ? 1 : cfg.jobs;
  return opt;
}

ltl::FormulaPtr query_formula(const RunConfig& cfg) {
  std::string text = cfg.phi;
  if (!cfg.phi_file.empty()) text = read_file(cfg.phi_file);
  if (text.empty())
    throw std::runtime_error("this command needs a query (--phi or --phi-file)");
  return ltl::parse_ltl(text);
}

void print_lasso(std::ostream& os, const game::Lasso& lasso,
                 const game::LtlGame& g) {
  const auto& m = g.structure;
  auto step = [&](const std::pair<std::size_t, game::JointAction>& p) {
    os << "    " << m.state_names[p.first] << " {";
    bool first = true;
    for (const auto& atom : g.labels[p.first])
      os << (first ? "" : ",") << atom, first = false;
    os << "} via (";
    for (std::size_t i = 0; i < p.second.size(); ++i)
      os << (i ? "," : "") << m.actions[i][p.second[i]];
    os << ")\n";
  };
  os << "  prefix:\n";
  for (const auto& p : lasso.prefix) step(p);
  os << "  cycle (repeats forever):\n";
  for (const auto& p : lasso.cycle) step(p);
}

void export_lasso_dot(const std::string& path, const game::Lasso& lasso,
                      const game::LtlGame& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "digraph witness {\n";
  auto states = lasso.state_path();
  for (std::size_t s : std::set<std::size_t>(states.begin(), states.end()))
    out << "  s" << s << " [label=\"" << g.structure.state_names[s] << "\"];\n";
  auto edge = [&](std::size_t from, std::size_t to) {
    out << "  s" << from << " -> s" << to << ";\n";
  };
  std::vector<std::pair<std::size_t, game::JointAction>> all = lasso.prefix;
  all.insert(all.end(), lasso.cycle.begin(), lasso.cycle.end());
  for (std::size_t k = 0; k + 1 < all.size(); ++k) edge(all[k].first, all[k + 1].first);
  if (!all.empty()) edge(all.back().first, lasso.cycle.front().first);
  out << "}\n";
}

int report(const equilibrium::Verdict& v, const game::LtlGame& g,
           const RunConfig& cfg, const std::string& yes_text,
           const std::string& no_text) {
  if (cfg.json) {
    std::cout << equilibrium::verdict_to_json(v, g) << "\n";
  } else {
    std::cout << (v.yes ? yes_text : no_text) << "\n";
    if (!v.winners.empty() || v.yes) {
      std::cout << "winners:";
      for (std::size_t i : v.winners) std::cout << " " << g.structure.players[i];
      std::cout << "\n";
    }
    if (v.witness_base) {
      std::cout << (v.yes ? "witness:\n" : "counterexample equilibrium run:\n");
      print_lasso(std::cout, *v.witness_base, g);
    }
    std::cout << "stats: product_states=" << v.stats.product_states
              << " subsets_checked=" << v.stats.subsets_checked
              << " solver_calls=" << v.stats.solver_calls << "\n";
  }
  if (!cfg.export_dot.empty() && v.witness_base)
    export_lasso_dot(cfg.export_dot, *v.witness_base, g);
  return v.yes ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg) {
  game::LtlGame g = load_game(cfg.input);
  log_info("solving non-emptiness over " +
           std::to_string(g.structure.num_states()) + " states");
  return report(equilibrium::non_emptiness(g, engine_options(cfg)), g, cfg,
                "YES: the game has a Nash equilibrium",
                "NO: the game has no Nash equilibrium");
}

int cmd_e_nash(const RunConfig& cfg) {
  game::LtlGame g = load_game(cfg.input);
  return report(equilibrium::e_nash(g, query_formula(cfg), engine_options(cfg)),
                g, cfg, "YES: some Nash equilibrium run satisfies the query",
                "NO: no Nash equilibrium run satisfies the query");
}

int cmd_a_nash(const RunConfig& cfg) {
  game::LtlGame g = load_game(cfg.input);
  return report(equilibrium::a_nash(g, query_formula(cfg), engine_options(cfg)),
                g, cfg, "YES: every Nash equilibrium run satisfies the query",
                "NO: some Nash equilibrium run violates the query");
}

int cmd_synthesize(const RunConfig& cfg) {
  game::LtlGame g = load_game(cfg.input);
  equilibrium::Verdict v = equilibrium::non_emptiness(g, engine_options(cfg));
  if (!v.yes) {
    std::cout << "NO: the game has no Nash equilibrium; nothing written\n";
    return 1;
  }

  std::vector<automata::DeterministicParityAutomaton> dpws;
  for (const auto& goal : g.goals)
    dpws.push_back(automata::ltl_to_dpw(goal, cfg.max_automaton));
  game::ParityGame par = game::product_game(g, dpws, cfg.max_states);
  std::map<std::size_t, solver::PunishmentResult> pun;
  for (std::size_t j = 0; j < g.structure.num_players(); ++j)
    if (!std::binary_search(v.winners.begin(), v.winners.end(), j))
      pun.emplace(j, solver::punishment_region(par, j));
  auto profile = synthesis::synthesize_profile(par, v.winners, *v.witness, pun);
  if (!synthesis::validate_equilibrium(g, profile))
    throw std::runtime_error("internal error: synthesized profile failed validation");

  fs::create_directories(cfg.out_dir);
  std::vector<fs::path> targets;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    fs::path p = fs::path(cfg.out_dir) /
                 ("strategy_" + g.structure.players[i] + ".json");
    if (fs::exists(p) && !cfg.force)
      throw std::runtime_error("refusing to overwrite '" + p.string() +
                               "' (use --force)");
    targets.push_back(p);
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    std::ofstream out(targets[i]);
    out << synthesis::transducer_to_json(profile[i], g.structure.actions[i]);
    if (!cfg.export_dot.empty()) {
      fs::path d = cfg.export_dot + "." + g.structure.players[i] + ".dot";
      std::ofstream dot(d);
      dot << synthesis::transducer_to_dot(profile[i], g.structure.actions[i]);
    }
  }

  std::cout << "YES: equilibrium synthesized and validated\n";
  std::cout << "winners:";
  for (std::size_t i : v.winners) std::cout << " " << g.structure.players[i];
  std::cout << "\nwitness:\n";
  print_lasso(std::cout, *v.witness_base, g);
  std::cout << "strategies written to " << cfg.out_dir << "/\n";
  return 0;
}

int cmd_bisim(const RunConfig& cfg) {
  game::LtlGame a = load_game(cfg.input);
  game::LtlGame b = load_game(cfg.input_b);
  bool same;
  try {
    same = game::check_bisimilar(a.structure, a.labels, b.structure, b.labels);
  } catch (const std::invalid_argument&) {
    same = false;  // incompatible player sets or action alphabets
  }
  std::cout << (same ? "BISIMILAR" : "NOT BISIMILAR") << "\n";
  return same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational verification: Nash equilibria in concurrent games "
               "with temporal-logic goals"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&cfg](CLI::App* cmd, bool with_query) {
    cmd->add_option("input", cfg.input, "game file (.srml or .arena)")
        ->required();
    if (with_query) {
      cmd->add_option("--phi", cfg.phi, "query formula");
      cmd->add_option("--phi-file", cfg.phi_file, "file holding the query formula");
    }
    cmd->add_flag("--json", cfg.json, "emit the verdict as JSON");
    cmd->add_option("--jobs", cfg.jobs, "parallel winner-set checks")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--deterministic", cfg.deterministic,
                  "byte-identical reports across runs (forces --jobs 1)");
    cmd->add_option("--max-states", cfg.max_states, "product state cap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-automaton", cfg.max_automaton,
                    "determinization state cap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--export-dot", cfg.export_dot,
                    "write a DOT rendering of the witness (or strategies)");
  };

  CLI::App* solve = app.add_subcommand("solve", "decide Nash-equilibrium existence");
  add_common(solve, false);
  CLI::App* enash = app.add_subcommand(
      "e-nash", "does some Nash equilibrium run satisfy the query?");
  add_common(enash, true);
  CLI::App* anash = app.add_subcommand(
      "a-nash", "do all Nash equilibrium runs satisfy the query?");
  add_common(anash, true);
  CLI::App* synth = app.add_subcommand(
      "synthesize", "write equilibrium strategy transducers");
  add_common(synth, false);
  synth->add_option("--out", cfg.out_dir, "output directory for strategy files");
  synth->add_flag("--force", cfg.force, "overwrite existing strategy files");
  CLI::App* bisim = app.add_subcommand("bisim", "compare two games for bisimilarity");
  bisim->add_option("input", cfg.input, "first game file")->required();
  bisim->add_option("input_b", cfg.input_b, "second game file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (enash->parsed()) return cmd_e_nash(cfg);
    if (anash->parsed()) return cmd_a_nash(cfg);
    if (synth->parsed()) return cmd_synthesize(cfg);
    if (bisim->parsed()) return cmd_bisim(cfg);
  } catch (const ltl::ParseError& e) {
    std::cerr << "error: " << e.line << ":" << e.column << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
