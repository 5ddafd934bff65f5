#include "ipc/term.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace ipc {

struct TermNode {
  TermTag tag;
  std::string name;             // Var, Abs binder, Case first binder
  std::string name2;            // Case second binder
  Formula ann;                  // Abs annotation, Absurd target, Case first binder
  Formula ann2;                 // Case second binder
  std::optional<Formula> disj;  // Inj1/Inj2 cached disjunction type
  Term a, b, c;
};

Term make_term(TermNode node) { return Term(std::make_shared<const TermNode>(std::move(node))); }

namespace {
Term make(TermNode n) { return make_term(std::move(n)); }
}  // namespace

Term Term::var(std::string name) { return make({TermTag::Var, std::move(name), {}, {}, {}, {}, {}, {}, {}}); }
Term Term::abs(std::string name, Formula annotation, Term body) {
  return make({TermTag::Abs, std::move(name), {}, annotation, {}, {}, std::move(body), {}, {}});
}
Term Term::app(Term fun, Term arg) {
  return make({TermTag::App, {}, {}, {}, {}, {}, std::move(fun), std::move(arg), {}});
}
Term Term::pair(Term first, Term second) {
  return make({TermTag::Pair, {}, {}, {}, {}, {}, std::move(first), std::move(second), {}});
}
Term Term::proj1(Term of) { return make({TermTag::Proj1, {}, {}, {}, {}, {}, std::move(of), {}, {}}); }
Term Term::proj2(Term of) { return make({TermTag::Proj2, {}, {}, {}, {}, {}, std::move(of), {}, {}}); }
Term Term::inj1(Term of, std::optional<Formula> disj) {
  return make({TermTag::Inj1, {}, {}, {}, {}, std::move(disj), std::move(of), {}, {}});
}
Term Term::inj2(Term of, std::optional<Formula> disj) {
  return make({TermTag::Inj2, {}, {}, {}, {}, std::move(disj), std::move(of), {}, {}});
}
Term Term::case_of(Term scrutinee, std::string name1, Formula ann1, Term branch1,
                   std::string name2, Formula ann2, Term branch2) {
  return make({TermTag::Case, std::move(name1), std::move(name2), ann1, ann2, {},
               std::move(scrutinee), std::move(branch1), std::move(branch2)});
}
Term Term::absurd(Term of, Formula target) {
  return make({TermTag::Absurd, {}, {}, target, {}, {}, std::move(of), {}, {}});
}

TermTag Term::tag() const { return node_->tag; }
const std::string& Term::name() const { return node_->name; }
const std::string& Term::name2() const { return node_->name2; }
Formula Term::annotation() const { return node_->ann; }
Formula Term::annotation2() const { return node_->ann2; }
const std::optional<Formula>& Term::inj_disj() const { return node_->disj; }
Term Term::child() const { return node_->a; }
Term Term::child2() const { return node_->b; }
Term Term::child3() const { return node_->c; }

// ---------------------------------------------------------------------------
// Printing

namespace {

// 0: abstractions, cases, injections, absurd; 1: applications; 2: primaries.
int term_level(const Term& t) {
  switch (t.tag()) {
    case TermTag::Abs:
    case TermTag::Case:
    case TermTag::Inj1:
    case TermTag::Inj2:
    case TermTag::Absurd: return 0;
    case TermTag::App: return 1;
    default: return 2;
  }
}

void print_rec(const Term& t, int min_level, std::string& out) {
  bool parens = term_level(t) < min_level;
  if (parens) out += '(';
  switch (t.tag()) {
    case TermTag::Var: out += t.name(); break;
    case TermTag::Abs:
      out += '\\';
      out += t.name();
      out += ':';
      out += print_formula(t.annotation());
      out += ". ";
      print_rec(t.child(), 0, out);
      break;
    case TermTag::App:
      print_rec(t.child(), 1, out);
      out += ' ';
      print_rec(t.child2(), 2, out);
      break;
    case TermTag::Pair:
      out += '<';
      print_rec(t.child(), 0, out);
      out += ", ";
      print_rec(t.child2(), 0, out);
      out += '>';
      break;
    case TermTag::Proj1:
      print_rec(t.child(), 2, out);
      out += ".1";
      break;
    case TermTag::Proj2:
      print_rec(t.child(), 2, out);
      out += ".2";
      break;
    case TermTag::Inj1:
      out += "in1 ";
      print_rec(t.child(), 0, out);
      break;
    case TermTag::Inj2:
      out += "in2 ";
      print_rec(t.child(), 0, out);
      break;
    case TermTag::Case:
      out += "case ";
      print_rec(t.child(), 1, out);
      out += " of ";
      out += t.name();
      out += ':';
      out += print_formula(t.annotation());
      out += " => ";
      print_rec(t.child2(), 0, out);
      out += " | ";
      out += t.name2();
      out += ':';
      out += print_formula(t.annotation2());
      out += " => ";
      print_rec(t.child3(), 0, out);
      break;
    case TermTag::Absurd:
      out += "absurd ";
      print_rec(t.child(), 2, out);
      out += " : ";
      out += print_formula(t.annotation());
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string print_term(const Term& t) {
  std::string out;
  print_rec(t, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const char* const kKeywords[] = {"in1", "in2", "case", "of", "absurd"};

bool is_keyword(std::string_view s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

class TermParser {
public:
  explicit TermParser(std::string_view text) : text_(text) {}

  Term parse() {
    Term t = term();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return t;
  }

private:
  Term term() {
    skip_ws();
    if (peek('\\')) {
      ++pos_;
      std::string x = ident();
      expect(':');
      Formula ann = formula_prefix();
      expect('.');
      return Term::abs(std::move(x), ann, term());
    }
    std::size_t save = pos_;
    std::string word = try_ident();
    if (word == "case") {
      Term scrut = term();
      keyword("of");
      std::string x = ident();
      expect(':');
      Formula xa = formula_prefix();
      token("=>");
      Term b1 = term();
      expect('|');
      std::string y = ident();
      expect(':');
      Formula ya = formula_prefix();
      token("=>");
      Term b2 = term();
      return Term::case_of(scrut, std::move(x), xa, b1, std::move(y), ya, b2);
    }
    if (word == "in1") return Term::inj1(term());
    if (word == "in2") return Term::inj2(term());
    if (word == "absurd") {
      Term t = appterm();
      expect(':');
      return Term::absurd(t, formula_prefix());
    }
    pos_ = save;
    return appterm();
  }

  Term appterm() {
    Term t = primary();
    while (true) {
      skip_ws();
      if (!starts_primary()) return t;
      t = Term::app(t, primary());
    }
  }

  bool starts_primary() {
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    if (c == '(' || c == '<') return true;
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
    std::size_t save = pos_;
    std::string word = try_ident();
    pos_ = save;
    return !is_keyword(word);
  }

  Term primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    Term t;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      t = term();
      expect(')');
    } else if (c == '<') {
      ++pos_;
      Term a = term();
      expect(',');
      Term b = term();
      expect('>');
      t = Term::pair(a, b);
    } else {
      std::string x = ident();
      if (is_keyword(x)) fail("'" + x + "' cannot appear here");
      t = Term::var(std::move(x));
    }
    while (true) {
      skip_ws();
      if (text_.substr(pos_, 2) == ".1") {
        pos_ += 2;
        t = Term::proj1(t);
      } else if (text_.substr(pos_, 2) == ".2") {
        pos_ += 2;
        t = Term::proj2(t);
      } else {
        return t;
      }
    }
  }

  Formula formula_prefix() {
    skip_ws();
    try {
      return parse_formula_prefix(text_, pos_);
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }

  std::string ident() {
    skip_ws();
    std::string word = try_ident();
    if (word.empty()) fail("expected identifier");
    return word;
  }

  std::string try_ident() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_])))
      return {};
    std::size_t start = pos_;
    ++pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'')
        ++pos_;
      else
        break;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void keyword(std::string_view k) {
    std::size_t save = pos_;
    if (try_ident() != k) {
      pos_ = save;
      fail("expected '" + std::string(k) + "'");
    }
  }

  void token(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok) fail("expected '" + std::string(tok) + "'");
    pos_ += tok.size();
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    std::ostringstream os;
    os << "term syntax error at position " << pos_ << ": " << msg;
    throw ParseError(os.str(), pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(std::string_view text) { return TermParser(text).parse(); }

// ---------------------------------------------------------------------------
// Free variables and substitution

namespace {

void free_vars_rec(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (t.tag()) {
    case TermTag::Var:
      if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.name());
      break;
    case TermTag::Abs:
      bound.push_back(t.name());
      free_vars_rec(t.child(), bound, out);
      bound.pop_back();
      break;
    case TermTag::App:
    case TermTag::Pair:
      free_vars_rec(t.child(), bound, out);
      free_vars_rec(t.child2(), bound, out);
      break;
    case TermTag::Proj1:
    case TermTag::Proj2:
    case TermTag::Inj1:
    case TermTag::Inj2:
    case TermTag::Absurd:
      free_vars_rec(t.child(), bound, out);
      break;
    case TermTag::Case:
      free_vars_rec(t.child(), bound, out);
      bound.push_back(t.name());
      free_vars_rec(t.child2(), bound, out);
      bound.pop_back();
      bound.push_back(t.name2());
      free_vars_rec(t.child3(), bound, out);
      bound.pop_back();
      break;
  }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string name = base;
  while (avoid.count(name)) name += '\'';
  return name;
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_rec(t, bound, out);
  return out;
}

namespace {

// One binder of a term with possible renaming before substitution descends.
Term subst_under_binder(const std::string& binder, const Term& body, const std::string& x,
                        const Term& n, std::set<std::string>* fv_n,
                        std::string* renamed) {
  if (binder == x) {
    *renamed = binder;
    return body;  // x is shadowed; nothing to substitute
  }
  std::set<std::string> fv_body = free_vars(body);
  if (fv_n->count(binder) && fv_body.count(x)) {
    std::set<std::string> avoid = *fv_n;
    avoid.insert(fv_body.begin(), fv_body.end());
    avoid.insert(x);
    std::string fresh = fresh_name(binder, avoid);
    *renamed = fresh;
    return subst_term(subst_term(body, binder, Term::var(fresh)), x, n);
  }
  *renamed = binder;
  return subst_term(body, x, n);
}

}  // namespace

Term subst_term(const Term& m, const std::string& x, const Term& n) {
  switch (m.tag()) {
    case TermTag::Var: return m.name() == x ? n : m;
    case TermTag::App: return Term::app(subst_term(m.child(), x, n), subst_term(m.child2(), x, n));
    case TermTag::Pair: return Term::pair(subst_term(m.child(), x, n), subst_term(m.child2(), x, n));
    case TermTag::Proj1: return Term::proj1(subst_term(m.child(), x, n));
    case TermTag::Proj2: return Term::proj2(subst_term(m.child(), x, n));
    case TermTag::Inj1: return Term::inj1(subst_term(m.child(), x, n), m.inj_disj());
    case TermTag::Inj2: return Term::inj2(subst_term(m.child(), x, n), m.inj_disj());
    case TermTag::Absurd: return Term::absurd(subst_term(m.child(), x, n), m.annotation());
    case TermTag::Abs: {
      if (m.name() == x) return m;
      std::set<std::string> fv_n = free_vars(n);
      std::string renamed;
      Term body = subst_under_binder(m.name(), m.child(), x, n, &fv_n, &renamed);
      return Term::abs(renamed, m.annotation(), body);
    }
    case TermTag::Case: {
      std::set<std::string> fv_n = free_vars(n);
      Term scrut = subst_term(m.child(), x, n);
      std::string r1 = m.name(), r2 = m.name2();
      Term b1 = m.name() == x
                    ? m.child2()
                    : subst_under_binder(m.name(), m.child2(), x, n, &fv_n, &r1);
      Term b2 = m.name2() == x
                    ? m.child3()
                    : subst_under_binder(m.name2(), m.child3(), x, n, &fv_n, &r2);
      return Term::case_of(scrut, r1, m.annotation(), b1, r2, m.annotation2(), b2);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Type checking
//
// Inference computes a type with holes standing for the unknown component of
// bare injections; case analysis merges the two branch types, which resolves
// holes whenever the term determines them.

namespace {

Formula hole() { return Formula::var("?"); }

bool has_hole(Formula f) {
  if (f == hole()) return true;
  if (f.is_atom()) return false;
  return has_hole(f.left()) || has_hole(f.right());
}

std::optional<Formula> merge_types(Formula a, Formula b) {
  if (a == hole()) return b;
  if (b == hole()) return a;
  if (a == b) return a;
  if (a.tag() != b.tag()) return std::nullopt;
  if (a.is_atom()) return std::nullopt;
  auto l = merge_types(a.left(), b.left());
  auto r = merge_types(a.right(), b.right());
  if (!l || !r) return std::nullopt;
  switch (a.tag()) {
    case Conn::Impl: return Formula::impl(*l, *r);
    case Conn::Conj: return Formula::conj(*l, *r);
    case Conn::Disj: return Formula::disj(*l, *r);
    default: return std::nullopt;
  }
}

class Scope {
public:
  explicit Scope(const Context& ctx) : ctx_(ctx) {}

  std::optional<Formula> lookup(const std::string& name) const {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
      if (it->first == name) return it->second;
    return ctx_.lookup(name);
  }
  void push(const std::string& name, Formula f) { locals_.emplace_back(name, f); }
  void pop() { locals_.pop_back(); }

private:
  const Context& ctx_;
  std::vector<std::pair<std::string, Formula>> locals_;
};

[[noreturn]] void type_fail(const std::string& rule, const Term& t, const std::string& why) {
  throw TypeError("ill-typed term at " + rule + ": " + why + " in `" + print_term(t) + "`");
}

Formula infer(Scope& env, const Term& t) {
  switch (t.tag()) {
    case TermTag::Var: {
      auto f = env.lookup(t.name());
      if (!f) throw TypeError("unbound proof variable `" + t.name() + "`");
      return *f;
    }
    case TermTag::Abs: {
      env.push(t.name(), t.annotation());
      Formula body = infer(env, t.child());
      env.pop();
      return Formula::impl(t.annotation(), body);
    }
    case TermTag::App: {
      Formula fun = infer(env, t.child());
      if (!fun.is_impl()) type_fail("(->E)", t, "applying a non-implication " + print_formula(fun));
      Formula arg = infer(env, t.child2());
      if (!merge_types(arg, fun.left()))
        type_fail("(->E)", t, "argument type " + print_formula(arg) + " does not match " +
                                  print_formula(fun.left()));
      return fun.right();
    }
    case TermTag::Pair:
      return Formula::conj(infer(env, t.child()), infer(env, t.child2()));
    case TermTag::Proj1:
    case TermTag::Proj2: {
      Formula p = infer(env, t.child());
      if (!p.is_conj()) type_fail("(/\\E)", t, "projecting from " + print_formula(p));
      return t.tag() == TermTag::Proj1 ? p.left() : p.right();
    }
    case TermTag::Inj1:
    case TermTag::Inj2: {
      Formula inner = infer(env, t.child());
      if (t.inj_disj()) {
        Formula d = *t.inj_disj();
        if (!d.is_disj()) type_fail("(\\/I)", t, "injection type is not a disjunction");
        Formula side = t.tag() == TermTag::Inj1 ? d.left() : d.right();
        if (!merge_types(inner, side))
          type_fail("(\\/I)", t, "component type " + print_formula(inner) + " does not match " +
                                     print_formula(side));
        return d;
      }
      return t.tag() == TermTag::Inj1 ? Formula::disj(inner, hole())
                                      : Formula::disj(hole(), inner);
    }
    case TermTag::Case: {
      Formula scrut = infer(env, t.child());
      Formula want = Formula::disj(t.annotation(), t.annotation2());
      if (!merge_types(scrut, want))
        type_fail("(\\/E)", t, "scrutinee type " + print_formula(scrut) +
                                   " does not match binders " + print_formula(want));
      env.push(t.name(), t.annotation());
      Formula b1 = infer(env, t.child2());
      env.pop();
      env.push(t.name2(), t.annotation2());
      Formula b2 = infer(env, t.child3());
      env.pop();
      auto merged = merge_types(b1, b2);
      if (!merged)
        type_fail("(\\/E)", t, "branch types " + print_formula(b1) + " and " + print_formula(b2) +
                                   " disagree");
      return *merged;
    }
    case TermTag::Absurd: {
      Formula inner = infer(env, t.child());
      if (!merge_types(inner, Formula::falsum()))
        type_fail("(falseE)", t, "subject has type " + print_formula(inner));
      return t.annotation();
    }
  }
  throw TypeError("malformed term");
}

bool check_rec(Scope& env, const Term& t, Formula goal);

bool infer_matches(Scope& env, const Term& t, Formula goal) {
  try {
    Formula got = infer(env, t);
    auto merged = merge_types(got, goal);
    return merged && *merged == goal;
  } catch (const TypeError&) {
    return false;
  }
}

bool check_rec(Scope& env, const Term& t, Formula goal) {
  switch (t.tag()) {
    case TermTag::Abs: {
      if (!goal.is_impl() || goal.left() != t.annotation()) return false;
      env.push(t.name(), t.annotation());
      bool ok = check_rec(env, t.child(), goal.right());
      env.pop();
      return ok;
    }
    case TermTag::Pair:
      return goal.is_conj() && check_rec(env, t.child(), goal.left()) &&
             check_rec(env, t.child2(), goal.right());
    case TermTag::Inj1:
      if (!goal.is_disj()) return false;
      if (t.inj_disj() && *t.inj_disj() != goal) return false;
      return check_rec(env, t.child(), goal.left());
    case TermTag::Inj2:
      if (!goal.is_disj()) return false;
      if (t.inj_disj() && *t.inj_disj() != goal) return false;
      return check_rec(env, t.child(), goal.right());
    case TermTag::Case: {
      try {
        Formula scrut = infer(env, t.child());
        if (!merge_types(scrut, Formula::disj(t.annotation(), t.annotation2()))) return false;
      } catch (const TypeError&) {
        return false;
      }
      env.push(t.name(), t.annotation());
      bool ok1 = check_rec(env, t.child2(), goal);
      env.pop();
      if (!ok1) return false;
      env.push(t.name2(), t.annotation2());
      bool ok2 = check_rec(env, t.child3(), goal);
      env.pop();
      return ok2;
    }
    case TermTag::Absurd:
      return t.annotation() == goal && check_rec(env, t.child(), Formula::falsum());
    default:
      return infer_matches(env, t, goal);
  }
}

}  // namespace

Formula typecheck(const Context& ctx, const Term& t) {
  Scope env(ctx);
  Formula f = infer(env, t);
  if (has_hole(f))
    throw TypeError("ambiguous injection type; the term only determines " + print_formula(f));
  return f;
}

bool checks_against(const Context& ctx, const Term& t, Formula goal) {
  Scope env(ctx);
  try {
    return check_rec(env, t, goal);
  } catch (const TypeError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Reduction

namespace {

bool is_eliminator_head(const Term& t) {
  switch (t.tag()) {
    case TermTag::App:
    case TermTag::Proj1:
    case TermTag::Proj2:
    case TermTag::Case:
    case TermTag::Absurd: return true;
    default: return false;
  }
}

// The subject an eliminator eliminates (function part, projected pair, case
// scrutinee, absurd subject).
Term eliminated_subject(const Term& t) { return t.child(); }

// Contract t when t itself is a redex.
std::optional<Term> contract(Scope& env, const Term& t) {
  if (!is_eliminator_head(t)) return std::nullopt;
  Term subject = eliminated_subject(t);

  // Beta rules: introduction met by the matching elimination.
  switch (t.tag()) {
    case TermTag::App:
      if (subject.tag() == TermTag::Abs)
        return subst_term(subject.child(), subject.name(), t.child2());
      break;
    case TermTag::Proj1:
      if (subject.tag() == TermTag::Pair) return subject.child();
      break;
    case TermTag::Proj2:
      if (subject.tag() == TermTag::Pair) return subject.child2();
      break;
    case TermTag::Case:
      if (subject.tag() == TermTag::Inj1)
        return subst_term(t.child2(), t.name(), subject.child());
      if (subject.tag() == TermTag::Inj2)
        return subst_term(t.child3(), t.name2(), subject.child());
      break;
    default: break;
  }

  // Permutations: an eliminator applied to a case is pushed into both
  // branches; an eliminator applied to an ex falso re-targets it. The case
  // binders are refreshed when they would capture variables of the pushed
  // eliminator.
  if (subject.tag() == TermTag::Case) {
    std::set<std::string> avoid;
    switch (t.tag()) {
      case TermTag::App: avoid = free_vars(t.child2()); break;
      case TermTag::Case: {
        std::set<std::string> f1 = free_vars(t.child2());
        f1.erase(t.name());
        std::set<std::string> f2 = free_vars(t.child3());
        f2.erase(t.name2());
        avoid = std::move(f1);
        avoid.insert(f2.begin(), f2.end());
        break;
      }
      default: break;
    }
    auto refresh = [&](const std::string& binder, Term branch) -> std::pair<std::string, Term> {
      if (!avoid.count(binder)) return {binder, branch};
      std::set<std::string> taken = avoid;
      std::set<std::string> fv = free_vars(branch);
      taken.insert(fv.begin(), fv.end());
      std::string fresh = fresh_name(binder, taken);
      return {fresh, subst_term(branch, binder, Term::var(fresh))};
    };
    auto [n1, br1] = refresh(subject.name(), subject.child2());
    auto [n2, br2] = refresh(subject.name2(), subject.child3());
    auto push = [&](const Term& branch) -> Term {
      switch (t.tag()) {
        case TermTag::App: return Term::app(branch, t.child2());
        case TermTag::Proj1: return Term::proj1(branch);
        case TermTag::Proj2: return Term::proj2(branch);
        case TermTag::Absurd: return Term::absurd(branch, t.annotation());
        case TermTag::Case:
          return Term::case_of(branch, t.name(), t.annotation(), t.child2(), t.name2(),
                               t.annotation2(), t.child3());
        default: throw TypeError("unreachable");
      }
    };
    return Term::case_of(subject.child(), n1, subject.annotation(), push(br1), n2,
                         subject.annotation2(), push(br2));
  }
  if (subject.tag() == TermTag::Absurd) {
    Formula from = subject.annotation();
    switch (t.tag()) {
      case TermTag::App:
        if (!from.is_impl()) type_fail("(falseE)", t, "absurd target applied but not an implication");
        return Term::absurd(subject.child(), from.right());
      case TermTag::Proj1:
        if (!from.is_conj()) type_fail("(falseE)", t, "absurd target projected but not a conjunction");
        return Term::absurd(subject.child(), from.left());
      case TermTag::Proj2:
        if (!from.is_conj()) type_fail("(falseE)", t, "absurd target projected but not a conjunction");
        return Term::absurd(subject.child(), from.right());
      case TermTag::Case: {
        // New target is the type of the case expression, read off a branch.
        env.push(t.name(), t.annotation());
        Formula target = infer(env, t.child2());
        env.pop();
        if (has_hole(target))
          throw TypeError("cannot retype case permutation over `" + print_term(t) + "`");
        return Term::absurd(subject.child(), target);
      }
      case TermTag::Absurd:
        return Term::absurd(subject.child(), t.annotation());
      default: break;
    }
  }
  return std::nullopt;
}

std::optional<Term> step_rec(Scope& env, const Term& t, Strategy strategy);

// Try to reduce inside children, left to right; returns the rebuilt term.
std::optional<Term> step_children(Scope& env, const Term& t, Strategy strategy) {
  auto step_child = [&](const Term& c) { return step_rec(env, c, strategy); };
  switch (t.tag()) {
    case TermTag::Var: return std::nullopt;
    case TermTag::Abs: {
      env.push(t.name(), t.annotation());
      auto b = step_child(t.child());
      env.pop();
      if (b) return Term::abs(t.name(), t.annotation(), *b);
      return std::nullopt;
    }
    case TermTag::App:
      if (auto f = step_child(t.child())) return Term::app(*f, t.child2());
      if (auto a = step_child(t.child2())) return Term::app(t.child(), *a);
      return std::nullopt;
    case TermTag::Pair:
      if (auto a = step_child(t.child())) return Term::pair(*a, t.child2());
      if (auto b = step_child(t.child2())) return Term::pair(t.child(), *b);
      return std::nullopt;
    case TermTag::Proj1:
      if (auto a = step_child(t.child())) return Term::proj1(*a);
      return std::nullopt;
    case TermTag::Proj2:
      if (auto a = step_child(t.child())) return Term::proj2(*a);
      return std::nullopt;
    case TermTag::Inj1:
      if (auto a = step_child(t.child())) return Term::inj1(*a, t.inj_disj());
      return std::nullopt;
    case TermTag::Inj2:
      if (auto a = step_child(t.child())) return Term::inj2(*a, t.inj_disj());
      return std::nullopt;
    case TermTag::Case: {
      if (auto s = step_child(t.child()))
        return Term::case_of(*s, t.name(), t.annotation(), t.child2(), t.name2(),
                             t.annotation2(), t.child3());
      env.push(t.name(), t.annotation());
      auto b1 = step_child(t.child2());
      env.pop();
      if (b1)
        return Term::case_of(t.child(), t.name(), t.annotation(), *b1, t.name2(),
                             t.annotation2(), t.child3());
      env.push(t.name2(), t.annotation2());
      auto b2 = step_child(t.child3());
      env.pop();
      if (b2)
        return Term::case_of(t.child(), t.name(), t.annotation(), t.child2(), t.name2(),
                             t.annotation2(), *b2);
      return std::nullopt;
    }
    case TermTag::Absurd:
      if (auto a = step_child(t.child())) return Term::absurd(*a, t.annotation());
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Term> step_rec(Scope& env, const Term& t, Strategy strategy) {
  if (strategy == Strategy::LeftmostOutermost) {
    if (auto r = contract(env, t)) return r;
    return step_children(env, t, strategy);
  }
  if (auto r = step_children(env, t, strategy)) return r;
  return contract(env, t);
}

}  // namespace

std::optional<Term> reduce_step(const Context& ctx, const Term& t, Strategy strategy) {
  Scope env(ctx);
  return step_rec(env, t, strategy);
}

Term normalize(const Context& ctx, const Term& t, Strategy strategy) {
  typecheck(ctx, t);
  Term cur = t;
  for (int steps = 0; steps < 200000; ++steps) {
    auto next = reduce_step(ctx, cur, strategy);
    if (!next) return cur;
    cur = *next;
  }
  throw std::runtime_error("normalization exceeded the step bound");
}

// ---------------------------------------------------------------------------
// Long normal forms

namespace {

bool lnf_rec(Scope& env, const Term& t, Formula goal);

// Validates a head-variable spine x E1 ... En where every eliminator is a
// projection or an application of an lnf argument. Returns its type.
std::optional<Formula> spine_type(Scope& env, const Term& t) {
  switch (t.tag()) {
    case TermTag::Var: return env.lookup(t.name());
    case TermTag::App: {
      auto f = spine_type(env, t.child());
      if (!f || !f->is_impl()) return std::nullopt;
      if (!lnf_rec(env, t.child2(), f->left())) return std::nullopt;
      return f->right();
    }
    case TermTag::Proj1:
    case TermTag::Proj2: {
      auto p = spine_type(env, t.child());
      if (!p || !p->is_conj()) return std::nullopt;
      return t.tag() == TermTag::Proj1 ? p->left() : p->right();
    }
    default: return std::nullopt;
  }
}

bool lnf_rec(Scope& env, const Term& t, Formula goal) {
  switch (t.tag()) {
    case TermTag::Abs: {
      if (!goal.is_impl() || t.annotation() != goal.left()) return false;
      env.push(t.name(), t.annotation());
      bool ok = lnf_rec(env, t.child(), goal.right());
      env.pop();
      return ok;
    }
    case TermTag::Pair:
      return goal.is_conj() && lnf_rec(env, t.child(), goal.left()) &&
             lnf_rec(env, t.child2(), goal.right());
    case TermTag::Inj1:
      return goal.is_disj() && lnf_rec(env, t.child(), goal.left());
    case TermTag::Inj2:
      return goal.is_disj() && lnf_rec(env, t.child(), goal.right());
    case TermTag::Case: {
      if (!goal.is_atom() && !goal.is_disj()) return false;
      auto scrut = spine_type(env, t.child());
      if (!scrut || !scrut->is_disj()) return false;
      if (scrut->left() != t.annotation() || scrut->right() != t.annotation2()) return false;
      env.push(t.name(), t.annotation());
      bool ok1 = lnf_rec(env, t.child2(), goal);
      env.pop();
      if (!ok1) return false;
      env.push(t.name2(), t.annotation2());
      bool ok2 = lnf_rec(env, t.child3(), goal);
      env.pop();
      return ok2;
    }
    case TermTag::Absurd: {
      if (!goal.is_atom() && !goal.is_disj()) return false;
      if (t.annotation() != goal) return false;
      auto scrut = spine_type(env, t.child());
      return scrut && *scrut == Formula::falsum();
    }
    default: {
      if (!goal.is_atom()) return false;
      auto ty = spine_type(env, t);
      return ty && *ty == goal;
    }
  }
}

}  // namespace

bool is_long_normal(const Context& ctx, const Term& t, Formula goal) {
  Scope env(ctx);
  return lnf_rec(env, t, goal);
}

// ---------------------------------------------------------------------------
// Alpha equality and beta-eta comparison

namespace {

bool alpha_rec(const Term& a, const Term& b, std::vector<std::string>& ba,
               std::vector<std::string>& bb) {
  if (a.tag() != b.tag()) return false;
  auto bound_index = [](const std::vector<std::string>& env, const std::string& n) -> int {
    for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
      if (env[i] == n) return static_cast<int>(env.size()) - 1 - i;
    return -1;
  };
  switch (a.tag()) {
    case TermTag::Var: {
      int ia = bound_index(ba, a.name());
      int ib = bound_index(bb, b.name());
      if (ia != ib) return false;
      return ia >= 0 || a.name() == b.name();
    }
    case TermTag::Abs: {
      if (a.annotation() != b.annotation()) return false;
      ba.push_back(a.name());
      bb.push_back(b.name());
      bool ok = alpha_rec(a.child(), b.child(), ba, bb);
      ba.pop_back();
      bb.pop_back();
      return ok;
    }
    case TermTag::App:
    case TermTag::Pair:
      return alpha_rec(a.child(), b.child(), ba, bb) && alpha_rec(a.child2(), b.child2(), ba, bb);
    case TermTag::Proj1:
    case TermTag::Proj2:
    case TermTag::Inj1:
    case TermTag::Inj2:
      return alpha_rec(a.child(), b.child(), ba, bb);
    case TermTag::Absurd:
      return a.annotation() == b.annotation() && alpha_rec(a.child(), b.child(), ba, bb);
    case TermTag::Case: {
      if (a.annotation() != b.annotation() || a.annotation2() != b.annotation2()) return false;
      if (!alpha_rec(a.child(), b.child(), ba, bb)) return false;
      ba.push_back(a.name());
      bb.push_back(b.name());
      bool ok1 = alpha_rec(a.child2(), b.child2(), ba, bb);
      ba.pop_back();
      bb.pop_back();
      if (!ok1) return false;
      ba.push_back(a.name2());
      bb.push_back(b.name2());
      bool ok2 = alpha_rec(a.child3(), b.child3(), ba, bb);
      ba.pop_back();
      bb.pop_back();
      return ok2;
    }
  }
  return false;
}

bool pure_lambda(const Term& t) {
  switch (t.tag()) {
    case TermTag::Var: return true;
    case TermTag::Abs: return pure_lambda(t.child());
    case TermTag::App: return pure_lambda(t.child()) && pure_lambda(t.child2());
    default: return false;
  }
}

// Beta normalization for the pure lambda fragment; no typing needed.
Term beta_normalize_lambda(Term t) {
  Context empty;
  for (int steps = 0; steps < 200000; ++steps) {
    auto next = reduce_step(empty, t);
    if (!next) return t;
    t = *next;
  }
  throw std::runtime_error("beta normalization exceeded the step bound");
}

Term eta_reduce_all(const Term& t) {
  switch (t.tag()) {
    case TermTag::Var: return t;
    case TermTag::App: return Term::app(eta_reduce_all(t.child()), eta_reduce_all(t.child2()));
    case TermTag::Abs: {
      Term body = eta_reduce_all(t.child());
      if (body.tag() == TermTag::App && body.child2().tag() == TermTag::Var &&
          body.child2().name() == t.name() && !free_vars(body.child()).count(t.name()))
        return body.child();
      return Term::abs(t.name(), t.annotation(), body);
    }
    default: return t;
  }
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
  std::vector<std::string> ba, bb;
  return alpha_rec(a, b, ba, bb);
}

bool beta_eta_equal(const Term& m, const Term& n) {
  if (!pure_lambda(m) || !pure_lambda(n))
    throw std::invalid_argument("beta_eta_equal is defined on the implicational fragment only");
  Term nm = beta_normalize_lambda(m);
  Term nn = beta_normalize_lambda(n);
  for (int i = 0; i < 1000; ++i) {
    Term next = eta_reduce_all(nm);
    if (alpha_equal(next, nm)) break;
    nm = next;
  }
  for (int i = 0; i < 1000; ++i) {
    Term next = eta_reduce_all(nn);
    if (alpha_equal(next, nn)) break;
    nn = next;
  }
  return alpha_equal(nm, nn);
}

std::size_t term_size(const Term& t) {
  switch (t.tag()) {
    case TermTag::Var: return 1;
    case TermTag::Abs:
    case TermTag::Proj1:
    case TermTag::Proj2:
    case TermTag::Inj1:
    case TermTag::Inj2:
    case TermTag::Absurd: return 1 + term_size(t.child());
    case TermTag::App:
    case TermTag::Pair: return 1 + term_size(t.child()) + term_size(t.child2());
    case TermTag::Case:
      return 1 + term_size(t.child()) + term_size(t.child2()) + term_size(t.child3());
  }
  return 1;
}

}  // namespace ipc
