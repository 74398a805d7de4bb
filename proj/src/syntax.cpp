#include "alk/syntax.hpp"

#include <algorithm>
#include <cctype>

namespace alk {

bool Signature::has_situation(const std::string& s) const {
  return std::find(situations.begin(), situations.end(), s) != situations.end();
}

const ActionDecl* Signature::find_action(const std::string& a) const {
  for (const auto& d : actions)
    if (d.name == a) return &d;
  return nullptr;
}

void Signature::validate() const {
  std::set<std::string> seen;
  for (const auto& s : situations)
    if (!seen.insert(s).second) throw TypeError("duplicate situation " + s);
  std::set<std::string> act_seen;
  for (const auto& d : actions) {
    if (!act_seen.insert(d.name).second) throw TypeError("duplicate action " + d.name);
    if (!has_situation(d.src))
      throw TypeError("action " + d.name + " uses undeclared situation " + d.src);
    if (!has_situation(d.dst))
      throw TypeError("action " + d.name + " uses undeclared situation " + d.dst);
  }
}

std::optional<std::string> VarTuple::type_of(const std::string& var) const {
  for (const auto& [v, s] : entries)
    if (v == var) return s;
  return std::nullopt;
}

std::string print_term(const Term& t) {
  std::string out = t.var;
  for (const auto& a : t.apps) out = a + "(" + out + ")";
  return out;
}

std::string type_of_term(const Signature& sig, const VarTuple& vars, const Term& t) {
  auto ty = vars.type_of(t.var);
  if (!ty) throw TypeError("unbound variable " + t.var + " in " + print_term(t));
  std::string cur = *ty;
  for (const auto& a : t.apps) {
    const ActionDecl* d = sig.find_action(a);
    if (!d) throw TypeError("unknown action " + a + " in " + print_term(t));
    if (d->src != cur)
      throw TypeError("action " + a + " expects " + d->src + ", got " + cur + " in " +
                      print_term(t));
    cur = d->dst;
  }
  return cur;
}

PVFormula& PVFormula::add(Term l, Term r) {
  eqs.push_back({std::move(l), std::move(r)});
  return *this;
}

PVFormula PVFormula::conj(const PVFormula& other) const {
  PVFormula out = *this;
  out.eqs.insert(out.eqs.end(), other.eqs.begin(), other.eqs.end());
  return out;
}

bool multiset_leq(const PVFormula& a, const PVFormula& b) {
  std::multiset<PVEquation> mb(b.eqs.begin(), b.eqs.end());
  for (const auto& e : a.eqs) {
    auto it = mb.find(e);
    if (it == mb.end()) return false;
    mb.erase(it);
  }
  return true;
}

bool multiset_eq(const PVFormula& a, const PVFormula& b) {
  return a.eqs.size() == b.eqs.size() && multiset_leq(a, b);
}

HPVPtr HPVFormula::top() {
  static HPVPtr t = std::make_shared<HPVFormula>();
  return t;
}

HPVPtr HPVFormula::eq(Term l, Term r) {
  auto n = std::make_shared<HPVFormula>();
  n->kind = Kind::Eq;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

HPVPtr HPVFormula::conj(HPVPtr x, HPVPtr y) {
  if (x->kind == Kind::Top) return y;
  if (y->kind == Kind::Top) return x;
  auto n = std::make_shared<HPVFormula>();
  n->kind = Kind::And;
  n->a = std::move(x);
  n->b = std::move(y);
  return n;
}

HPVPtr HPVFormula::imp(HPVPtr x, HPVPtr y) {
  if (y->kind == Kind::Top) return y;
  if (x->kind == Kind::Top) return y;
  auto n = std::make_shared<HPVFormula>();
  n->kind = Kind::Imp;
  n->a = std::move(x);
  n->b = std::move(y);
  return n;
}

HPVPtr HPVFormula::embed(const PVFormula& pv) {
  HPVPtr out = top();
  for (const auto& e : pv.eqs) out = conj(out, eq(e.lhs, e.rhs));
  return out;
}

bool hpv_equal(const HPVPtr& a, const HPVPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case HPVFormula::Kind::Top: return true;
    case HPVFormula::Kind::Eq: return a->lhs == b->lhs && a->rhs == b->rhs;
    default: return hpv_equal(a->a, b->a) && hpv_equal(a->b, b->b);
  }
}

bool hpv_conjuncts_eq(const HPVPtr& a, const HPVPtr& b) {
  auto ca = hpv_conjuncts(a);
  auto cb = hpv_conjuncts(b);
  if (ca.size() != cb.size()) return false;
  std::vector<bool> used(cb.size(), false);
  for (const auto& x : ca) {
    bool hit = false;
    for (size_t i = 0; i < cb.size(); ++i) {
      if (!used[i] && hpv_equal(x, cb[i])) {
        used[i] = true;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

bool hpv_imp_free(const HPVPtr& f) {
  switch (f->kind) {
    case HPVFormula::Kind::Top:
    case HPVFormula::Kind::Eq: return true;
    case HPVFormula::Kind::And: return hpv_imp_free(f->a) && hpv_imp_free(f->b);
    case HPVFormula::Kind::Imp: return false;
  }
  return false;
}

std::optional<PVFormula> hpv_to_pv(const HPVPtr& f) {
  PVFormula out;
  bool ok = true;
  auto walk = [&](auto&& self, const HPVPtr& g) -> void {
    if (!ok) return;
    switch (g->kind) {
      case HPVFormula::Kind::Top: return;
      case HPVFormula::Kind::Eq: out.add(g->lhs, g->rhs); return;
      case HPVFormula::Kind::And:
        self(self, g->a);
        self(self, g->b);
        return;
      case HPVFormula::Kind::Imp: ok = false; return;
    }
  };
  walk(walk, f);
  if (!ok) return std::nullopt;
  return out;
}

std::vector<HPVPtr> hpv_conjuncts(const HPVPtr& f) {
  std::vector<HPVPtr> out;
  auto walk = [&](auto&& self, const HPVPtr& g) -> void {
    switch (g->kind) {
      case HPVFormula::Kind::Top: return;
      case HPVFormula::Kind::And:
        self(self, g->a);
        self(self, g->b);
        return;
      default: out.push_back(g); return;
    }
  };
  walk(walk, f);
  return out;
}

HPVPtr hpv_of_conjuncts(const std::vector<HPVPtr>& cs) {
  HPVPtr out = HPVFormula::top();
  for (const auto& c : cs) out = HPVFormula::conj(out, c);
  return out;
}

std::string print_pv(const PVFormula& f) {
  if (f.eqs.empty()) return "top";
  std::string out;
  for (std::size_t i = 0; i < f.eqs.size(); ++i) {
    if (i) out += " & ";
    const auto& e = f.eqs[i];
    if (e.lhs == e.rhs)
      out += "def " + print_term(e.lhs);
    else
      out += print_term(e.lhs) + " == " + print_term(e.rhs);
  }
  return out;
}

namespace {
// precedence: 0 = imp (lowest, right assoc), 1 = and, 2 = atom
std::string print_hpv_prec(const HPVPtr& f, int prec) {
  std::string out;
  int mine;
  switch (f->kind) {
    case HPVFormula::Kind::Top:
      out = "top";
      mine = 2;
      break;
    case HPVFormula::Kind::Eq:
      out = (f->lhs == f->rhs) ? "def " + print_term(f->lhs)
                               : print_term(f->lhs) + " == " + print_term(f->rhs);
      mine = 2;
      break;
    case HPVFormula::Kind::And:
      out = print_hpv_prec(f->a, 1) + " & " + print_hpv_prec(f->b, 1);
      mine = 1;
      break;
    case HPVFormula::Kind::Imp:
      out = print_hpv_prec(f->a, 1) + " => " + print_hpv_prec(f->b, 0);
      mine = 0;
      break;
    default: out = "top"; mine = 2;
  }
  if (mine < prec) return "(" + out + ")";
  return out;
}
}  // namespace

std::string print_hpv(const HPVPtr& f) { return print_hpv_prec(f, 0); }

// ---------------------------------------------------------------------------
// Tokenizer / parser

namespace {

struct Token {
  enum class Kind { Ident, Symbol, End };
  Kind kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1, col = 1;
  Token cur;

  explicit Lexer(const std::string& s) : src(s) { advance(); }

  void bump(char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') bump(src[pos]);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump(c);
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_ws();
    cur.line = line;
    cur.col = col;
    if (pos >= src.size()) {
      cur = {Token::Kind::End, "", line, col};
      return;
    }
    char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        id += src[pos];
        bump(src[pos]);
      }
      cur = {Token::Kind::Ident, id, cur.line, cur.col};
      return;
    }
    // multi-char symbols: == -> =>
    static const std::vector<std::string> syms = {"==", "->", "=>"};
    for (const auto& s : syms) {
      if (src.compare(pos, s.size(), s) == 0) {
        for (char ch : s) bump(ch);
        cur = {Token::Kind::Symbol, s, cur.line, cur.col};
        return;
      }
    }
    std::string one(1, c);
    bump(c);
    cur = {Token::Kind::Symbol, one, cur.line, cur.col};
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(cur.line, cur.col, msg); }

  bool at_ident(const std::string& kw = "") const {
    return cur.kind == Token::Kind::Ident && (kw.empty() || cur.text == kw);
  }
  bool at_symbol(const std::string& s) const {
    return cur.kind == Token::Kind::Symbol && cur.text == s;
  }
  std::string expect_ident(const std::string& what) {
    if (cur.kind != Token::Kind::Ident) fail("expected " + what);
    std::string t = cur.text;
    advance();
    return t;
  }
  void expect_symbol(const std::string& s) {
    if (!at_symbol(s)) fail("expected '" + s + "'");
    advance();
  }
};

bool is_keyword(const std::string& s) {
  return s == "sit" || s == "act" || s == "axiom" || s == "top" || s == "def";
}

Term parse_term(Lexer& lx) {
  // parse as nested applications: name ( name ( ... ( var ) ) )
  std::vector<std::string> names;
  names.push_back(lx.expect_ident("term"));
  int parens = 0;
  while (lx.at_symbol("(")) {
    lx.advance();
    ++parens;
    names.push_back(lx.expect_ident("term"));
  }
  for (int i = 0; i < parens; ++i) lx.expect_symbol(")");
  Term t;
  t.var = names.back();
  for (std::size_t i = names.size() - 1; i-- > 0;) t.apps.push_back(names[i]);
  return t;
}

HPVPtr parse_hpv_expr(Lexer& lx, int prec);

HPVPtr parse_hpv_atom(Lexer& lx) {
  if (lx.at_symbol("(")) {
    lx.advance();
    HPVPtr inner = parse_hpv_expr(lx, 0);
    lx.expect_symbol(")");
    return inner;
  }
  if (lx.at_ident("top")) {
    lx.advance();
    return HPVFormula::top();
  }
  if (lx.at_ident("def")) {
    lx.advance();
    Term t = parse_term(lx);
    return HPVFormula::def(t);
  }
  Term l = parse_term(lx);
  lx.expect_symbol("==");
  Term r = parse_term(lx);
  return HPVFormula::eq(std::move(l), std::move(r));
}

HPVPtr parse_hpv_expr(Lexer& lx, int prec) {
  HPVPtr left = parse_hpv_atom(lx);
  for (;;) {
    if (prec <= 1 && lx.at_symbol("&")) {
      lx.advance();
      left = HPVFormula::conj(left, parse_hpv_atom(lx));
    } else if (prec == 0 && lx.at_symbol("=>")) {
      lx.advance();
      HPVPtr right = parse_hpv_expr(lx, 0);  // right associative
      left = HPVFormula::imp(left, right);
    } else {
      break;
    }
  }
  return left;
}

void typecheck_hpv(const Signature& sig, const VarTuple& vars, const HPVPtr& f) {
  switch (f->kind) {
    case HPVFormula::Kind::Top: return;
    case HPVFormula::Kind::Eq: {
      std::string lt = type_of_term(sig, vars, f->lhs);
      std::string rt = type_of_term(sig, vars, f->rhs);
      if (lt != rt)
        throw TypeError("equation sides have different situations: " + print_term(f->lhs) +
                        " : " + lt + " vs " + print_term(f->rhs) + " : " + rt);
      return;
    }
    default:
      typecheck_hpv(sig, vars, f->a);
      typecheck_hpv(sig, vars, f->b);
  }
}

VarTuple parse_var_tuple(Lexer& lx, const Signature& sig) {
  VarTuple vt;
  lx.expect_symbol("(");
  if (!lx.at_symbol(")")) {
    for (;;) {
      std::string v = lx.expect_ident("variable");
      lx.expect_symbol(":");
      std::string s = lx.expect_ident("situation");
      if (!sig.has_situation(s)) lx.fail("undeclared situation " + s);
      if (vt.type_of(v)) lx.fail("duplicate variable " + v);
      vt.entries.emplace_back(v, s);
      if (lx.at_symbol(",")) {
        lx.advance();
        continue;
      }
      break;
    }
  }
  lx.expect_symbol(")");
  return vt;
}

}  // namespace

Theory parse_theory(const std::string& text) {
  Lexer lx(text);
  Theory th;
  while (!(lx.cur.kind == Token::Kind::End)) {
    if (lx.at_ident("sit")) {
      lx.advance();
      while (lx.at_ident() && !is_keyword(lx.cur.text))
        th.sig.situations.push_back(lx.expect_ident("situation"));
      lx.expect_symbol(";");
    } else if (lx.at_ident("act")) {
      lx.advance();
      ActionDecl d;
      d.name = lx.expect_ident("action name");
      lx.expect_symbol(":");
      d.src = lx.expect_ident("situation");
      lx.expect_symbol("->");
      d.dst = lx.expect_ident("situation");
      lx.expect_symbol(";");
      if (!th.sig.has_situation(d.src))
        throw TypeError("action " + d.name + " uses undeclared situation " + d.src);
      if (!th.sig.has_situation(d.dst))
        throw TypeError("action " + d.name + " uses undeclared situation " + d.dst);
      th.sig.actions.push_back(d);
    } else if (lx.at_ident("axiom")) {
      lx.advance();
      Axiom ax;
      ax.vars = parse_var_tuple(lx, th.sig);
      ax.formula = parse_hpv_expr(lx, 0);
      lx.expect_symbol(";");
      typecheck_hpv(th.sig, ax.vars, ax.formula);
      th.axioms.push_back(std::move(ax));
    } else {
      lx.fail("expected 'sit', 'act' or 'axiom'");
    }
  }
  th.sig.validate();
  return th;
}

std::string print_theory(const Theory& t) {
  std::string out;
  if (!t.sig.situations.empty()) {
    out += "sit";
    for (const auto& s : t.sig.situations) out += " " + s;
    out += ";\n";
  }
  for (const auto& a : t.sig.actions)
    out += "act " + a.name + " : " + a.src + " -> " + a.dst + ";\n";
  for (const auto& ax : t.axioms) {
    out += "axiom (";
    for (std::size_t i = 0; i < ax.vars.entries.size(); ++i) {
      if (i) out += ", ";
      out += ax.vars.entries[i].first + ":" + ax.vars.entries[i].second;
    }
    out += ") " + print_hpv(ax.formula) + ";\n";
  }
  return out;
}

HPVPtr parse_constraint(const Signature& sig, const VarTuple& vars, const std::string& text) {
  Lexer lx(text);
  HPVPtr f = parse_hpv_expr(lx, 0);
  if (lx.cur.kind != Token::Kind::End) lx.fail("trailing input after constraint");
  typecheck_hpv(sig, vars, f);
  return f;
}

PVFormula parse_pv_constraint(const Signature& sig, const VarTuple& vars,
                              const std::string& text) {
  HPVPtr f = parse_constraint(sig, vars, text);
  auto pv = hpv_to_pv(f);
  if (!pv) throw TypeError("constraint uses '=>' where a plain conjunction is required");
  return *pv;
}

Term substitute(const Term& t, const std::map<std::string, Term>& repl) {
  auto it = repl.find(t.var);
  if (it == repl.end()) return t;
  Term out = it->second;
  out.apps.insert(out.apps.end(), t.apps.begin(), t.apps.end());
  return out;
}

namespace {
void check_repl(const Signature& sig, const VarTuple& from_vars,
                const std::map<std::string, Term>& repl, const VarTuple& to_vars) {
  for (const auto& [v, ty] : from_vars.entries) {
    auto it = repl.find(v);
    if (it == repl.end())
      throw TypeError("substitution misses variable " + v);
    std::string got = type_of_term(sig, to_vars, it->second);
    if (got != ty)
      throw TypeError("substitution for " + v + " has situation " + got + ", expected " + ty);
  }
}
}  // namespace

PVFormula substitute(const Signature& sig, const VarTuple& from_vars, const PVFormula& f,
                     const std::map<std::string, Term>& repl, const VarTuple& to_vars) {
  check_repl(sig, from_vars, repl, to_vars);
  PVFormula out;
  for (const auto& e : f.eqs) out.add(substitute(e.lhs, repl), substitute(e.rhs, repl));
  return out;
}

HPVPtr substitute(const Signature& sig, const VarTuple& from_vars, const HPVPtr& f,
                  const std::map<std::string, Term>& repl, const VarTuple& to_vars) {
  check_repl(sig, from_vars, repl, to_vars);
  auto walk = [&](auto&& self, const HPVPtr& g) -> HPVPtr {
    switch (g->kind) {
      case HPVFormula::Kind::Top: return g;
      case HPVFormula::Kind::Eq:
        return HPVFormula::eq(substitute(g->lhs, repl), substitute(g->rhs, repl));
      case HPVFormula::Kind::And: return HPVFormula::conj(self(self, g->a), self(self, g->b));
      case HPVFormula::Kind::Imp: return HPVFormula::imp(self(self, g->a), self(self, g->b));
    }
    return g;
  };
  return walk(walk, f);
}

std::set<Term> subterms(const Term& t) {
  std::set<Term> out;
  Term cur;
  cur.var = t.var;
  out.insert(cur);
  for (const auto& a : t.apps) {
    cur.apps.push_back(a);
    out.insert(cur);
  }
  return out;
}

std::set<Term> subterms(const PVFormula& f) {
  std::set<Term> out;
  for (const auto& e : f.eqs) {
    auto l = subterms(e.lhs), r = subterms(e.rhs);
    out.insert(l.begin(), l.end());
    out.insert(r.begin(), r.end());
  }
  return out;
}

std::set<Term> subterms(const HPVPtr& f) {
  std::set<Term> out;
  auto walk = [&](auto&& self, const HPVPtr& g) -> void {
    switch (g->kind) {
      case HPVFormula::Kind::Top: return;
      case HPVFormula::Kind::Eq: {
        auto l = subterms(g->lhs), r = subterms(g->rhs);
        out.insert(l.begin(), l.end());
        out.insert(r.begin(), r.end());
        return;
      }
      default:
        self(self, g->a);
        self(self, g->b);
    }
  };
  walk(walk, f);
  return out;
}

}  // namespace alk
