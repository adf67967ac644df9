#include "teq/ltl.hpp"

#include <cassert>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>

namespace teq::ltl {

namespace {

FormulaPtr make(Op op, std::string atom, FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<Formula>(
      Formula{op, std::move(atom), std::move(lhs), std::move(rhs)});
}

}  // namespace

FormulaPtr f_true() { return make(Op::True, {}, nullptr, nullptr); }
FormulaPtr f_false() { return make(Op::False, {}, nullptr, nullptr); }
FormulaPtr f_atom(std::string name) { return make(Op::Atom, std::move(name), nullptr, nullptr); }
FormulaPtr f_not(FormulaPtr a) { return make(Op::Not, {}, std::move(a), nullptr); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return make(Op::And, {}, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return make(Op::Or, {}, std::move(a), std::move(b)); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) { return make(Op::Implies, {}, std::move(a), std::move(b)); }
FormulaPtr f_next(FormulaPtr a) { return make(Op::Next, {}, std::move(a), nullptr); }
FormulaPtr f_until(FormulaPtr a, FormulaPtr b) { return make(Op::Until, {}, std::move(a), std::move(b)); }
FormulaPtr f_release(FormulaPtr a, FormulaPtr b) { return make(Op::Release, {}, std::move(a), std::move(b)); }
FormulaPtr f_eventually(FormulaPtr a) { return make(Op::Eventually, {}, std::move(a), nullptr); }
FormulaPtr f_always(FormulaPtr a) { return make(Op::Always, {}, std::move(a), nullptr); }

FormulaPtr f_and_all(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return f_true();
  FormulaPtr acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = f_and(acc, fs[i]);
  return acc;
}

FormulaPtr f_or_all(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return f_false();
  FormulaPtr acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = f_or(acc, fs[i]);
  return acc;
}

ParseError::ParseError(int line, int column, const std::string& what)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + what),
      line(line),
      column(column) {}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { Ident, True, False, NotT, AndT, OrT, Arrow, NextT, EvT, AlT, UntilT, LPar, RPar, End };
  Kind kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           (std::isspace(static_cast<unsigned char>(text_[pos_])))) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    tok_.line = line_;
    tok_.column = col_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::End;
      return;
    }
    char c = text_[pos_];
    auto single = [&](Token::Kind k) {
      tok_.kind = k;
      tok_.text = std::string(1, c);
      ++pos_;
      ++col_;
    };
    switch (c) {
      case '~':
      case '!':
        single(Token::NotT);
        return;
      case '&':
        single(Token::AndT);
        return;
      case '|':
        single(Token::OrT);
        return;
      case '(':
        single(Token::LPar);
        return;
      case ')':
        single(Token::RPar);
        return;
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          tok_.kind = Token::Arrow;
          tok_.text = "->";
          pos_ += 2;
          col_ += 2;
          return;
        }
        throw ParseError(line_, col_, "expected '->'");
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
        ++col_;
      }
      std::string word = text_.substr(start, pos_ - start);
      if (word == "true")
        tok_.kind = Token::True;
      else if (word == "false")
        tok_.kind = Token::False;
      else if (word == "X")
        tok_.kind = Token::NextT;
      else if (word == "F")
        tok_.kind = Token::EvT;
      else if (word == "G")
        tok_.kind = Token::AlT;
      else if (word == "U")
        tok_.kind = Token::UntilT;
      else {
        tok_.kind = Token::Ident;
        tok_.text = word;
        return;
      }
      tok_.text = word;
      return;
    }
    throw ParseError(line_, col_, std::string("unknown token '") + c + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = implies();
    const Token& t = lex_.peek();
    if (t.kind != Token::End)
      throw ParseError(t.line, t.column, "unexpected trailing input '" + t.text + "'");
    return f;
  }

 private:
  // implies := or ('->' implies)?   (right-associative, weakest)
  FormulaPtr implies() {
    FormulaPtr left = disj();
    if (lex_.peek().kind == Token::Arrow) {
      lex_.take();
      return f_implies(left, implies());
    }
    return left;
  }

  FormulaPtr disj() {
    FormulaPtr left = conj();
    while (lex_.peek().kind == Token::OrT) {
      lex_.take();
      left = f_or(left, conj());
    }
    return left;
  }

  FormulaPtr conj() {
    FormulaPtr left = until();
    while (lex_.peek().kind == Token::AndT) {
      lex_.take();
      left = f_and(left, until());
    }
    return left;
  }

  // until := unary ('U' until)?   (right-associative, tighter than &)
  FormulaPtr until() {
    FormulaPtr left = unary();
    if (lex_.peek().kind == Token::UntilT) {
      lex_.take();
      return f_until(left, until());
    }
    return left;
  }

  FormulaPtr unary() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Token::NotT:
        lex_.take();
        return f_not(unary());
      case Token::NextT:
        lex_.take();
        return f_next(unary());
      case Token::EvT:
        lex_.take();
        return f_eventually(unary());
      case Token::AlT:
        lex_.take();
        return f_always(unary());
      case Token::True:
        lex_.take();
        return f_true();
      case Token::False:
        lex_.take();
        return f_false();
      case Token::Ident:
        lex_.take();
        return f_atom(t.text);
      case Token::LPar: {
        lex_.take();
        FormulaPtr f = implies();
        const Token& r = lex_.peek();
        if (r.kind != Token::RPar)
          throw ParseError(r.line, r.column, "expected ')'");
        lex_.take();
        return f;
      }
      default:
        throw ParseError(t.line, t.column, "expected formula, got '" + t.text + "'");
    }
  }

  Lexer lex_;
};

}  // namespace

FormulaPtr parse_ltl(const std::string& text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Normal forms
// ---------------------------------------------------------------------------

FormulaPtr to_core(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::Not:
      return f_not(to_core(f->lhs));
    case Op::And:
      return f_and(to_core(f->lhs), to_core(f->rhs));
    case Op::Or:
      return f_or(to_core(f->lhs), to_core(f->rhs));
    case Op::Implies:
      return f_or(f_not(to_core(f->lhs)), to_core(f->rhs));
    case Op::Next:
      return f_next(to_core(f->lhs));
    case Op::Until:
      return f_until(to_core(f->lhs), to_core(f->rhs));
    case Op::Release:
      return f_release(to_core(f->lhs), to_core(f->rhs));
    case Op::Eventually:
      return f_until(f_true(), to_core(f->lhs));
    case Op::Always:
      return f_not(f_until(f_true(), f_not(to_core(f->lhs))));
  }
  assert(false);
  return nullptr;
}

namespace {

FormulaPtr nnf(const FormulaPtr& f, bool negated);

FormulaPtr nnf(const FormulaPtr& f, bool negated) {
  switch (f->op) {
    case Op::True:
      return negated ? f_false() : f_true();
    case Op::False:
      return negated ? f_true() : f_false();
    case Op::Atom:
      return negated ? f_not(f) : f;
    case Op::Not:
      return nnf(f->lhs, !negated);
    case Op::And:
      return negated ? f_or(nnf(f->lhs, true), nnf(f->rhs, true))
                     : f_and(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Or:
      return negated ? f_and(nnf(f->lhs, true), nnf(f->rhs, true))
                     : f_or(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Implies:
      return negated ? f_and(nnf(f->lhs, false), nnf(f->rhs, true))
                     : f_or(nnf(f->lhs, true), nnf(f->rhs, false));
    case Op::Next:
      return f_next(nnf(f->lhs, negated));
    case Op::Until:
      return negated ? f_release(nnf(f->lhs, true), nnf(f->rhs, true))
                     : f_until(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Release:
      return negated ? f_until(nnf(f->lhs, true), nnf(f->rhs, true))
                     : f_release(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Eventually:
      // F φ = ⊤ U φ; ¬F φ = ⊥ R ¬φ.
      return negated ? f_release(f_false(), nnf(f->lhs, true))
                     : f_until(f_true(), nnf(f->lhs, false));
    case Op::Always:
      // G φ = ⊥ R φ; ¬G φ = ⊤ U ¬φ.
      return negated ? f_until(f_true(), nnf(f->lhs, true))
                     : f_release(f_false(), nnf(f->lhs, false));
  }
  assert(false);
  return nullptr;
}

}  // namespace

FormulaPtr to_nnf(const FormulaPtr& f) { return nnf(f, false); }

namespace {

// Sound but incomplete syntactic entailment: a ⇒ b at every position of
// every word.  Used by simplify() to collapse vacuous Until/Release nests
// (which otherwise inflate the tableau automaton dramatically).
bool syn_implies(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->op == Op::False || b->op == Op::True) return true;
  if (equal(a, b)) return true;
  switch (a->op) {
    case Op::And:
      if (syn_implies(a->lhs, b) || syn_implies(a->rhs, b)) return true;
      break;
    case Op::Or:
      if (syn_implies(a->lhs, b) && syn_implies(a->rhs, b)) return true;
      break;
    case Op::Until:  // holds now ⇒ lhs or rhs holds now
      if (syn_implies(a->lhs, b) && syn_implies(a->rhs, b)) return true;
      break;
    case Op::Release:  // holds now ⇒ rhs holds now
      if (syn_implies(a->rhs, b)) return true;
      break;
    default:
      break;
  }
  // Monotonicity of the temporal operators.
  if (a->op == b->op &&
      (a->op == Op::Until || a->op == Op::Release) &&
      syn_implies(a->lhs, b->lhs) && syn_implies(a->rhs, b->rhs))
    return true;
  if (a->op == Op::Next && b->op == Op::Next) return syn_implies(a->lhs, b->lhs);
  switch (b->op) {
    case Op::And:
      return syn_implies(a, b->lhs) && syn_implies(a, b->rhs);
    case Op::Or:
      return syn_implies(a, b->lhs) || syn_implies(a, b->rhs);
    case Op::Until:  // rhs holding now suffices
      return syn_implies(a, b->rhs);
    case Op::Release:  // lhs ∧ rhs holding now suffices
      return syn_implies(a, b->lhs) && syn_implies(a, b->rhs);
    default:
      return false;
  }
}

// Pure eventuality: F φ ≡ φ (closed under ∧, ∨, and Until right-nesting).
bool pure_eventuality(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::False:
      return true;
    case Op::Eventually:
      return true;
    case Op::Until:
      return f->lhs->op == Op::True || pure_eventuality(f->rhs);
    case Op::And:
    case Op::Or:
      return pure_eventuality(f->lhs) && pure_eventuality(f->rhs);
    default:
      return false;
  }
}

// Pure universality: G φ ≡ φ (the dual closure).
bool pure_universality(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::False:
      return true;
    case Op::Always:
      return true;
    case Op::Release:
      return f->lhs->op == Op::False || pure_universality(f->rhs);
    case Op::And:
    case Op::Or:
      return pure_universality(f->lhs) && pure_universality(f->rhs);
    default:
      return false;
  }
}

}  // namespace

FormulaPtr simplify(const FormulaPtr& f) {
  FormulaPtr l = f->lhs ? simplify(f->lhs) : nullptr;
  FormulaPtr r = f->rhs ? simplify(f->rhs) : nullptr;
  auto is = [](const FormulaPtr& g, Op op) { return g && g->op == op; };
  switch (f->op) {
    case Op::Not:
      if (is(l, Op::True)) return f_false();
      if (is(l, Op::False)) return f_true();
      return f_not(l);
    case Op::And:
      if (is(l, Op::False) || is(r, Op::False)) return f_false();
      if (is(l, Op::True)) return r;
      if (is(r, Op::True)) return l;
      if (equal(l, r)) return l;
      return f_and(l, r);
    case Op::Or:
      if (is(l, Op::True) || is(r, Op::True)) return f_true();
      if (is(l, Op::False)) return r;
      if (is(r, Op::False)) return l;
      if (equal(l, r)) return l;
      return f_or(l, r);
    case Op::Implies:
      if (is(l, Op::False) || is(r, Op::True)) return f_true();
      if (is(l, Op::True)) return r;
      if (is(r, Op::False)) return f_not(l);
      if (equal(l, r)) return f_true();
      return f_implies(l, r);
    case Op::Next:
      if (is(l, Op::True)) return f_true();
      if (is(l, Op::False)) return f_false();
      return f_next(l);
    case Op::Until:
      if (is(r, Op::True)) return f_true();
      if (is(r, Op::False)) return f_false();
      // l holding settles the obligation immediately: l U r ≡ r.
      if (syn_implies(l, r)) return r;
      // r a pure eventuality: reaching it later is reaching it now.
      if (pure_eventuality(r)) return r;
      // l U (l U r) ≡ l U r.
      if (is(r, Op::Until) && equal(l, r->lhs)) return r;
      // If "eventually r" already forces l along the way, l U r ≡ F r.
      if (!is(l, Op::True) && syn_implies(f_until(f_true(), r), l))
        return f_until(f_true(), r);
      return f_until(l, r);
    case Op::Release:
      if (is(r, Op::True)) return f_true();
      if (is(r, Op::False)) return f_false();
      // Releasing at step one: l R r ≡ r when r ⇒ l.
      if (syn_implies(r, l)) return r;
      // r a pure universality: holding now means holding forever.
      if (pure_universality(r)) return r;
      // l R (l R r) ≡ l R r.
      if (is(r, Op::Release) && equal(l, r->lhs)) return r;
      // If l can only fire while G r persists, l R r ≡ G r.
      if (!is(l, Op::False) && syn_implies(l, f_release(f_false(), r)))
        return f_release(f_false(), r);
      return f_release(l, r);
    case Op::Eventually:
      if (is(l, Op::True)) return f_true();
      if (is(l, Op::False)) return f_false();
      if (is(l, Op::Eventually)) return l;
      return f_eventually(l);
    case Op::Always:
      if (is(l, Op::True)) return f_true();
      if (is(l, Op::False)) return f_false();
      if (is(l, Op::Always)) return l;
      return f_always(l);
    default:
      return f;
  }
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::True:
    case Op::False:
      return true;
    case Op::Atom:
      return a->atom == b->atom;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return equal(a->lhs, b->lhs);
    default:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

std::string to_string(const FormulaPtr& f) {
  auto paren = [](const std::string& s) { return "(" + s + ")"; };
  switch (f->op) {
    case Op::True:
      return "true";
    case Op::False:
      return "false";
    case Op::Atom:
      return f->atom;
    case Op::Not:
      return "~" + paren(to_string(f->lhs));
    case Op::Next:
      return "X" + paren(to_string(f->lhs));
    case Op::Eventually:
      return "F" + paren(to_string(f->lhs));
    case Op::Always:
      return "G" + paren(to_string(f->lhs));
    case Op::And:
      return paren(to_string(f->lhs)) + " & " + paren(to_string(f->rhs));
    case Op::Or:
      return paren(to_string(f->lhs)) + " | " + paren(to_string(f->rhs));
    case Op::Implies:
      return paren(to_string(f->lhs)) + " -> " + paren(to_string(f->rhs));
    case Op::Until:
      return paren(to_string(f->lhs)) + " U " + paren(to_string(f->rhs));
    case Op::Release:
      return paren(to_string(f->lhs)) + " R " + paren(to_string(f->rhs));
  }
  assert(false);
  return {};
}

std::set<std::string> atoms(const FormulaPtr& f) {
  std::set<std::string> out;
  std::vector<const Formula*> stack{f.get()};
  while (!stack.empty()) {
    const Formula* g = stack.back();
    stack.pop_back();
    if (g->op == Op::Atom) out.insert(g->atom);
    if (g->lhs) stack.push_back(g->lhs.get());
    if (g->rhs) stack.push_back(g->rhs.get());
  }
  return out;
}

int operator_count(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return 0;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return 1 + operator_count(f->lhs);
    default:
      return 1 + operator_count(f->lhs) + operator_count(f->rhs);
  }
}

UltimatelyPeriodicWord unroll_once(const UltimatelyPeriodicWord& w) {
  UltimatelyPeriodicWord out;
  out.prefix = w.prefix;
  out.prefix.insert(out.prefix.end(), w.cycle.begin(), w.cycle.end());
  out.cycle = w.cycle;
  return out;
}

// ---------------------------------------------------------------------------
// Lasso evaluation
// ---------------------------------------------------------------------------

namespace {

// Enumerate distinct subformulas bottom-up (children before parents).
void collect(const FormulaPtr& f, std::vector<const Formula*>& order,
             std::unordered_map<const Formula*, int>& index) {
  if (index.count(f.get())) return;
  if (f->lhs) collect(f->lhs, order, index);
  if (f->rhs) collect(f->rhs, order, index);
  index.emplace(f.get(), static_cast<int>(order.size()));
  order.push_back(f.get());
}

}  // namespace

bool eval_lasso(const FormulaPtr& f, const UltimatelyPeriodicWord& w) {
  if (w.cycle.empty())
    throw std::invalid_argument("eval_lasso: cycle must be nonempty");
  const std::size_t p = w.prefix.size();
  const std::size_t m = p + w.cycle.size();
  auto succ = [&](std::size_t i) { return i + 1 < m ? i + 1 : p; };

  std::vector<const Formula*> order;
  std::unordered_map<const Formula*, int> index;
  collect(f, order, index);

  // val[sub][pos]
  std::vector<std::vector<char>> val(order.size(), std::vector<char>(m, 0));
  auto sub = [&](const FormulaPtr& g) -> std::vector<char>& {
    return val[index.at(g.get())];
  };

  for (std::size_t k = 0; k < order.size(); ++k) {
    const Formula* g = order[k];
    std::vector<char>& v = val[k];
    switch (g->op) {
      case Op::True:
        v.assign(m, 1);
        break;
      case Op::False:
        v.assign(m, 0);
        break;
      case Op::Atom:
        for (std::size_t i = 0; i < m; ++i) v[i] = w.at(i).count(g->atom) ? 1 : 0;
        break;
      case Op::Not:
        for (std::size_t i = 0; i < m; ++i) v[i] = !sub(g->lhs)[i];
        break;
      case Op::And:
        for (std::size_t i = 0; i < m; ++i) v[i] = sub(g->lhs)[i] && sub(g->rhs)[i];
        break;
      case Op::Or:
        for (std::size_t i = 0; i < m; ++i) v[i] = sub(g->lhs)[i] || sub(g->rhs)[i];
        break;
      case Op::Implies:
        for (std::size_t i = 0; i < m; ++i) v[i] = !sub(g->lhs)[i] || sub(g->rhs)[i];
        break;
      case Op::Next:
        for (std::size_t i = 0; i < m; ++i) v[i] = sub(g->lhs)[succ(i)];
        break;
      case Op::Until:
      case Op::Eventually: {
        // Least fixpoint of  v = rhs ∨ (lhs ∧ X v)  over the lasso graph;
        // backward sweeps until stable (at most m+1 are ever needed).
        const std::vector<char>* lhs = g->op == Op::Until ? &sub(g->lhs) : nullptr;
        const std::vector<char>& rhs = g->op == Op::Until ? sub(g->rhs) : sub(g->lhs);
        v = rhs;
        bool changed = true;
        std::size_t sweeps = 0;
        while (changed) {
          changed = false;
          if (++sweeps > m + 2) throw std::logic_error("eval_lasso: Until failed to stabilise");
          for (std::size_t i = m; i-- > 0;) {
            char nv = v[i] || ((lhs == nullptr || (*lhs)[i]) && v[succ(i)]);
            if (nv != v[i]) {
              v[i] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      case Op::Release:
      case Op::Always: {
        // Greatest fixpoint of  v = rhs ∧ (lhs ∨ X v).
        const std::vector<char>* lhs = g->op == Op::Release ? &sub(g->lhs) : nullptr;
        const std::vector<char>& rhs = g->op == Op::Release ? sub(g->rhs) : sub(g->lhs);
        v = rhs;
        bool changed = true;
        std::size_t sweeps = 0;
        while (changed) {
          changed = false;
          if (++sweeps > m + 2) throw std::logic_error("eval_lasso: Release failed to stabilise");
          for (std::size_t i = m; i-- > 0;) {
            char nv = v[i] && ((lhs != nullptr && (*lhs)[i]) || v[succ(i)]);
            if (nv != v[i]) {
              v[i] = nv;
              changed = true;
            }
          }
        }
        break;
      }
    }
  }
  return val[index.at(f.get())][0] != 0;
}

}  // namespace teq::ltl
