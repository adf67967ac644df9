// teq -- temporal equilibrium analysis toolkit

#include "teq/srml.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace teq::srml {

namespace {

using ltl::FormulaPtr;
using ltl::Op;
using ltl::ParseError;

struct Token {
  std::string text;
  bool is_word = false;
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (text[i] == '\n') ++line, column = 1;
      else ++column;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = column;
    t.offset = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      t.text = text.substr(i, j - i);
      t.is_word = true;
      advance(j - i);
    } else if (c == ':' && i + 1 < text.size() && text[i + 1] == ':') {
      t.text = "::";
      advance(2);
    } else if (c == ':' && i + 1 < text.size() && text[i + 1] == '=') {
      t.text = ":=";
      advance(2);
    } else if (c == '~' && i + 1 < text.size() && text[i + 1] == '>') {
      t.text = "~>";
      advance(2);
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      t.text = "->";
      advance(2);
    } else if (std::string("~&|();,'").find(c) != std::string::npos) {
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, column, std::string("unexpected character '") + c + "'");
    }
    tokens.push_back(std::move(t));
  }
  Token eof;
  eof.text = "<eof>";
  eof.line = line;
  eof.column = column;
  eof.offset = text.size();
  tokens.push_back(std::move(eof));
  return tokens;
}

struct Parser {
  const std::string& source;
  std::vector<Token> tokens;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : source(text), tokens(tokenize(text)) {}

  const Token& peek() const { return tokens[pos]; }
  const Token& next() { return tokens[pos++]; }
  bool at(const std::string& text) const { return peek().text == text; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(peek().line, peek().column, what);
  }

  void expect(const std::string& text) {
    if (!at(text)) fail("expected '" + text + "', found '" + peek().text + "'");
    ++pos;
  }

  std::string expect_ident() {
    if (!peek().is_word || peek().text == "module" || peek().text == "true" ||
        peek().text == "false")
      fail("expected identifier, found '" + peek().text + "'");
    return next().text;
  }

  // Propositional expression, precedence ~ > & > | > -> (right-assoc).
  FormulaPtr prop() { return prop_implies(); }

  FormulaPtr prop_implies() {
    FormulaPtr lhs = prop_or();
    if (at("->")) {
      ++pos;
      return ltl::f_implies(lhs, prop_implies());
    }
    return lhs;
  }

  FormulaPtr prop_or() {
    FormulaPtr lhs = prop_and();
    while (at("|")) {
      ++pos;
      lhs = ltl::f_or(lhs, prop_and());
    }
    return lhs;
  }

  FormulaPtr prop_and() {
    FormulaPtr lhs = prop_unary();
    while (at("&")) {
      ++pos;
      lhs = ltl::f_and(lhs, prop_unary());
    }
    return lhs;
  }

  FormulaPtr prop_unary() {
    if (at("~")) {
      ++pos;
      return ltl::f_not(prop_unary());
    }
    if (at("(")) {
      ++pos;
      FormulaPtr inner = prop();
      expect(")");
      return inner;
    }
    if (at("true")) {
      ++pos;
      return ltl::f_true();
    }
    if (at("false")) {
      ++pos;
      return ltl::f_false();
    }
    if (peek().is_word) return ltl::f_atom(next().text);
    fail("expected propositional expression, found '" + peek().text + "'");
  }

  GuardedCommand command() {
    expect("::");
    GuardedCommand cmd;
    cmd.guard = prop();
    expect("~>");
    for (;;) {
      const Token& var_tok = peek();
      std::string var = expect_ident();
      expect("'");
      expect(":=");
      FormulaPtr rhs = prop();
      for (const auto& [prev, e] : cmd.assigns)
        if (prev == var)
          throw ParseError(var_tok.line, var_tok.column,
                           "conflicting assignments to '" + var + "'");
      cmd.assigns.emplace_back(std::move(var), std::move(rhs));
      expect(";");
      if (!peek().is_word || !at_assignment_start()) break;
    }
    return cmd;
  }

  /// After a ';', another "v' :=" continues the same command only if an
  /// identifier followed by a prime comes next; a "::" or section keyword
  /// starts something new.
  bool at_assignment_start() const {
    if (!peek().is_word) return false;
    const std::string& w = peek().text;
    if (w == "update" || w == "goal" || w == "module" || w == "init") return false;
    return pos + 1 < tokens.size() && tokens[pos + 1].text == "'";
  }

  ltl::FormulaPtr goal_formula() {
    const Token& start = peek();
    std::size_t begin = start.offset;
    while (!at(";") && !at("<eof>")) ++pos;
    if (at("<eof>")) fail("missing ';' after goal formula");
    std::size_t end = peek().offset;
    ++pos;  // consume ';'
    try {
      return ltl::parse_ltl(source.substr(begin, end - begin));
    } catch (const ParseError& e) {
      int line = start.line + e.line - 1;
      int column = e.line == 1 ? start.column + e.column - 1 : e.column;
      throw ParseError(line, column, e.what());
    }
  }

  SrmlModule module() {
    expect("module");
    SrmlModule m;
    m.name = expect_ident();
    expect("controls");
    m.controls.push_back(expect_ident());
    while (at(",")) {
      ++pos;
      m.controls.push_back(expect_ident());
    }
    expect("init");
    while (at("::")) m.inits.push_back(command());
    expect("update");
    while (at("::")) m.updates.push_back(command());
    expect("goal");
    m.goal = goal_formula();
    return m;
  }
};

bool eval_prop(const FormulaPtr& f, const std::set<std::string>& truths) {
  switch (f->op) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom:
      return truths.count(f->atom) != 0;
    case Op::Not:
      return !eval_prop(f->lhs, truths);
    case Op::And:
      return eval_prop(f->lhs, truths) && eval_prop(f->rhs, truths);
    case Op::Or:
      return eval_prop(f->lhs, truths) || eval_prop(f->rhs, truths);
    case Op::Implies:
      return !eval_prop(f->lhs, truths) || eval_prop(f->rhs, truths);
    default:
      throw std::logic_error("eval_prop: temporal operator in expression");
  }
}

}  // namespace

SrmlSystem parse_srml(const std::string& text) {
  Parser parser(text);
  SrmlSystem sys;
  if (!parser.at("module")) parser.fail("expected 'module'");
  while (parser.at("module")) {
    const Token& head = parser.peek();
    SrmlModule m = parser.module();
    for (const auto& other : sys.modules)
      if (other.name == m.name)
        throw ParseError(head.line, head.column,
                         "duplicate module '" + m.name + "'");
    for (const auto& v : m.controls) {
      if (!sys.variables.insert(v).second)
        throw ParseError(head.line, head.column,
                         "variable '" + v + "' controlled twice");
    }
    // Assignments must target the module's own variables.
    auto owns = [&m](const std::string& v) {
      return std::find(m.controls.begin(), m.controls.end(), v) !=
             m.controls.end();
    };
    for (const auto* cmds : {&m.inits, &m.updates})
      for (const auto& cmd : *cmds)
        for (const auto& [var, rhs] : cmd.assigns)
          if (!owns(var))
            throw ParseError(head.line, head.column,
                             "module '" + m.name + "' assigns foreign variable '" +
                                 var + "'");
    sys.modules.push_back(std::move(m));
  }
  if (!parser.at("<eof>")) parser.fail("trailing input after last module");

  // Guards and right-hand sides may mention any declared variable.
  for (const auto& m : sys.modules)
    for (const auto* cmds : {&m.inits, &m.updates})
      for (const auto& cmd : *cmds) {
        for (const auto& atom : ltl::atoms(cmd.guard))
          if (!sys.variables.count(atom))
            throw ParseError(1, 1, "undeclared variable '" + atom + "' in guard");
        for (const auto& [var, rhs] : cmd.assigns)
          for (const auto& atom : ltl::atoms(rhs))
            if (!sys.variables.count(atom))
              throw ParseError(1, 1,
                               "undeclared variable '" + atom + "' in assignment");
      }
  return sys;
}

game::LtlGame build_cgs(const SrmlSystem& sys, std::size_t cap) {
  const std::size_t n = sys.modules.size();
  if (n == 0) throw std::runtime_error("build_cgs: empty system");

  game::LtlGame g;
  auto& m = g.structure;
  for (const auto& mod : sys.modules) {
    m.players.push_back(mod.name);
    std::vector<std::string> acts;
    for (std::size_t k = 0; k < mod.inits.size(); ++k)
      acts.push_back("init#" + std::to_string(k));
    for (std::size_t k = 0; k < mod.updates.size(); ++k)
      acts.push_back("update#" + std::to_string(k));
    acts.push_back("idle");
    m.actions.push_back(std::move(acts));
    g.goals.push_back(mod.goal);
  }

  // States: index 0 is the pre-initial state; valuation states are interned
  // by their set of true variables.
  std::map<std::set<std::string>, std::size_t> state_id;
  std::vector<std::set<std::string>> valuations{{}};  // slot for pre-initial
  m.state_names.push_back("pre");
  g.labels.push_back({});
  m.initial = 0;

  auto intern = [&](std::set<std::string> truths) {
    auto it = state_id.find(truths);
    if (it != state_id.end()) return it->second;
    if (valuations.size() >= cap)
      throw std::runtime_error("build_cgs: state cap exceeded");
    std::size_t id = valuations.size();
    std::ostringstream name;
    name << "{";
    bool first = true;
    for (const auto& v : truths) {
      if (!first) name << ",";
      name << v;
      first = false;
    }
    name << "}";
    m.state_names.push_back(name.str());
    g.labels.push_back(ltl::LabelSet(truths.begin(), truths.end()));
    state_id.emplace(truths, id);
    valuations.push_back(std::move(truths));
    return id;
  };

  std::queue<std::size_t> todo;
  todo.push(0);
  std::set<std::size_t> expanded;
  while (!todo.empty()) {
    std::size_t s = todo.front();
    todo.pop();
    if (!expanded.insert(s).second) continue;
    const std::set<std::string> current = valuations[s];
    const bool pre = s == 0;

    while (m.avail.size() <= s) {
      m.avail.emplace_back();
      m.tr.emplace_back();
    }
    m.avail[s].assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      const auto& mod = sys.modules[i];
      const auto& cmds = pre ? mod.inits : mod.updates;
      const std::size_t base = pre ? 0 : mod.inits.size();
      for (std::size_t k = 0; k < cmds.size(); ++k)
        if (eval_prop(cmds[k].guard, current)) m.avail[s][i].push_back(base + k);
      if (m.avail[s][i].empty())
        m.avail[s][i].push_back(mod.inits.size() + mod.updates.size());  // idle
    }

    for (const game::JointAction& a : m.joint_actions(s)) {
      std::set<std::string> next = current;  // frame rule
      for (std::size_t i = 0; i < n; ++i) {
        const auto& mod = sys.modules[i];
        const std::size_t idle = mod.inits.size() + mod.updates.size();
        if (a[i] == idle) continue;
        const GuardedCommand& cmd = a[i] < mod.inits.size()
                                        ? mod.inits[a[i]]
                                        : mod.updates[a[i] - mod.inits.size()];
        for (const auto& [var, rhs] : cmd.assigns) {
          if (eval_prop(rhs, current))
            next.insert(var);
          else
            next.erase(var);
        }
      }
      std::size_t t = intern(std::move(next));
      m.tr[s].emplace(a, t);
      if (!expanded.count(t)) todo.push(t);
    }
  }

  m.avail.resize(valuations.size());
  m.tr.resize(valuations.size());
  m.validate();
  return g;
}

}  // namespace teq::srml
