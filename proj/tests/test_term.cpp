#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "ipc/term.hpp"

using namespace ipc;

namespace {
Formula F(const char* s) { return parse_formula(s); }
Term T(const char* s) { return parse_term(s); }
}  // namespace

TEST_CASE("term parsing and printing round trip") {
  const char* samples[] = {
      "x",
      "\\x:p. x",
      "\\x:p -> q. \\y:p. x y",
      "<x, y>.1",
      "x.1.2",
      "in1 x",
      "in2 (f x)",
      "case z of x:p => in1 x | y:q => in2 y",
      "absurd x : q",
      "\\x:false. absurd x : q",
      "f (in1 x) <a, b>",
  };
  for (const char* s : samples) {
    Term t = T(s);
    CHECK(alpha_equal(parse_term(print_term(t)), t));
  }
  CHECK_THROWS_AS(parse_term("\\x. x"), ParseError);
  CHECK_THROWS_AS(parse_term("case x of y:p => y"), ParseError);
  CHECK_THROWS_AS(parse_term(""), ParseError);
}

TEST_CASE("typecheck basics") {
  Context empty;
  CHECK(typecheck(empty, T("\\x:p. x")) == F("p -> p"));

  Context cpair;
  cpair.add("x", F("p /\\ q"));
  CHECK(typecheck(cpair, T("<x.2, x.1>")) == F("q /\\ p"));

  // Long normal form example: z y [v1. in1 v1 ; v2. in2 v2] has the
  // disjunction type even though the injections carry no annotation.
  Context clnf;
  clnf.add("x", F("a -> p"));
  clnf.add("y", F("a"));
  clnf.add("z", F("a -> b \\/ c"));
  clnf.add("u1", F("b -> p"));
  clnf.add("u2", F("c -> p"));
  Term lnf = T("case z y of v1:b => in1 v1 | v2:c => in2 v2");
  CHECK(typecheck(clnf, lnf) == F("b \\/ c"));
  CHECK(typecheck(clnf, T("case z y of v1:b => u1 v1 | v2:c => u2 v2")) == F("p"));

  CHECK_THROWS_AS(typecheck(empty, T("x")), TypeError);
  CHECK_THROWS_AS(typecheck(empty, T("\\x:p. x x")), TypeError);
  CHECK_THROWS_AS(typecheck(cpair, T("x.1 x.2")), TypeError);
  // A bare injection does not determine its type.
  CHECK_THROWS_AS(typecheck(cpair, T("in1 x.1")), TypeError);
  CHECK(typecheck(cpair, Term::inj1(T("x.1"), F("p \\/ r"))) == F("p \\/ r"));

  CHECK(checks_against(cpair, T("in1 x.1"), F("p \\/ r")));
  CHECK_FALSE(checks_against(cpair, T("in1 x.1"), F("r \\/ p")));
  CHECK(checks_against(empty, T("\\x:false. absurd x : q"), F("false -> q")));
}

TEST_CASE("free variables") {
  CHECK(free_vars(T("x")) == std::set<std::string>{"x"});
  CHECK(free_vars(T("\\x:p. x")).empty());
  // case binders are removed per branch
  Term t = Term::case_of(T("z"), "x", F("p"), T("x"), "y", F("q"), T("w"));
  CHECK(free_vars(t) == std::set<std::string>{"z", "w"});
  CHECK(free_vars(T("\\x:p. x y <z, x>")) == std::set<std::string>{"y", "z"});
}

TEST_CASE("substitution is capture free") {
  CHECK(alpha_equal(subst_term(T("x"), "x", T("\\y:p. y")), T("\\y:p. y")));
  // (\y:p. x)[x := y] renames the binder
  Term s = subst_term(T("\\y:p. x"), "x", T("y"));
  CHECK(alpha_equal(s, T("\\z:p. y")));
  CHECK(print_term(s) == "\\y':p. y");
  CHECK(alpha_equal(subst_term(T("x x'"), "x", T("z")), T("z x'")));
  // no-op when x is shadowed
  CHECK(alpha_equal(subst_term(T("\\x:p. x"), "x", T("y")), T("\\x:p. x")));

  // FV(m[x:=n]) is contained in (FV(m) minus x) with FV(n)
  gen::TermGen tg(5);
  for (int i = 0; i < 200; ++i) {
    auto [m, ty] = tg.closed_term(4);
    auto [n, ty2] = tg.closed_term(3);
    Term body = m.tag() == TermTag::Abs ? m.child() : m;
    std::set<std::string> before = free_vars(body);
    Term after = subst_term(body, "vq", n);
    std::set<std::string> expect = before;
    expect.erase("vq");
    for (const std::string& v : free_vars(n)) expect.insert(v);
    for (const std::string& v : free_vars(after)) CHECK(expect.count(v));
  }
}

TEST_CASE("single reductions") {
  Context ctx;
  ctx.add("m", F("p"));
  ctx.add("n", F("q"));
  // <m, n>.1 => m
  CHECK(alpha_equal(*reduce_step(ctx, T("<m, n>.1")), T("m")));
  CHECK(alpha_equal(*reduce_step(ctx, T("<m, n>.2")), T("n")));
  // (in1 m)[x. n1; y. n2] => n1[x := m]
  Term red = *reduce_step(ctx, T("case in1 m of x:p => <x, n> | y:r => <m, n>"));
  CHECK(alpha_equal(red, T("<m, n>")));
  // beta
  CHECK(alpha_equal(*reduce_step(ctx, T("(\\x:p. x) m")), T("m")));
  // ex falso permutation: (absurd z : p -> q) n => absurd z : q
  Context cf;
  cf.add("z", F("false"));
  cf.add("n", F("p"));
  Term perm = *reduce_step(cf, T("(absurd z : p -> q) n"));
  CHECK(alpha_equal(perm, T("absurd z : q")));
  // case permutation: (case s of .. => f | .. => g) n pushes the application
  Context cc;
  cc.add("s", F("a \\/ b"));
  cc.add("f", F("p -> q"));
  cc.add("g", F("p -> q"));
  cc.add("n", F("p"));
  Term t = T("(case s of x:a => f | y:b => g) n");
  Term pushed = *reduce_step(cc, t);
  CHECK(alpha_equal(pushed, T("case s of x:a => f n | y:b => g n")));
  CHECK(typecheck(cc, pushed) == F("q"));
  // normal terms have no redex
  CHECK_FALSE(reduce_step(ctx, T("m")).has_value());
  CHECK_FALSE(reduce_step(ctx, T("\\x:p. x")).has_value());
}

TEST_CASE("permutation chains") {
  Context ctx;
  ctx.add("z", F("a \\/ b"));
  ctx.add("m", F("p"));
  ctx.add("n", F("q"));

  // projection pushed into the branches, then beta
  Term proj = T("(case z of x:a => <m, n> | y:b => <m, n>).1");
  CHECK(typecheck(ctx, proj) == F("p"));
  Term pn = normalize(ctx, proj);
  CHECK(alpha_equal(pn, T("case z of x:a => m | y:b => m")));
  CHECK(typecheck(ctx, pn) == F("p"));

  // case of case: the outer eliminator moves into the inner branches
  Context c2;
  c2.add("z", F("a \\/ b"));
  c2.add("f", F("p -> t"));
  c2.add("g", F("q -> t"));
  c2.add("m", F("p"));
  c2.add("n", F("q"));
  Term nested = T(
      "case (case z of x:a => in1 m | y:b => in2 n) of u:p => f u | v:q => g v");
  CHECK(checks_against(c2, nested, F("t")));
  Term nn = normalize(c2, nested);
  CHECK(alpha_equal(nn, T("case z of x:a => f m | y:b => g n")));
  CHECK(typecheck(c2, nn) == F("t"));
  CHECK(alpha_equal(normalize(c2, nested, Strategy::RightmostInnermost), nn));

  // absurd of a case: both branches get the ex falso
  Context c3;
  c3.add("z", F("a \\/ b"));
  c3.add("ka", F("a -> false"));
  c3.add("kb", F("b -> false"));
  Term boom = Term::absurd(T("case z of x:a => ka x | y:b => kb y"), F("t"));
  CHECK(typecheck(c3, boom) == F("t"));
  Term bn = normalize(c3, boom);
  CHECK(alpha_equal(bn, T("case z of x:a => absurd ka x : t | y:b => absurd kb y : t")));

  // case of an absurd: retyped through one typing step
  Context c4;
  c4.add("w", F("false"));
  c4.add("f", F("p -> t"));
  c4.add("g", F("q -> t"));
  Term coa = T("case (absurd w : p \\/ q) of u:p => f u | v:q => g v");
  CHECK(typecheck(c4, coa) == F("t"));
  CHECK(alpha_equal(normalize(c4, coa), T("absurd w : t")));
}

TEST_CASE("case permutation avoids capture") {
  Context ctx;
  ctx.add("z", F("a \\/ b"));
  ctx.add("f", F("p -> t"));
  ctx.add("x", F("p"));  // collides with the case binder below
  Term t = Term::app(Term::case_of(T("z"), "x", F("a"), T("f"), "y", F("b"), T("f")), T("x"));
  CHECK(typecheck(ctx, t) == F("t"));
  Term n = normalize(ctx, t);
  CHECK(typecheck(ctx, n) == F("t"));
  // the argument x must still mean the outer hypothesis in both branches
  CHECK(alpha_equal(n, T("case z of u:a => f x | v:b => f x")));
}

TEST_CASE("normalize") {
  Context ctx;
  ctx.add("y", F("p"));
  CHECK(alpha_equal(normalize(ctx, T("(\\x:p. x) y")), T("y")));
  CHECK(alpha_equal(normalize(ctx, T("<(\\x:p. x) y, y>.2")), T("y")));
  Term already = T("\\x:p. x");
  CHECK(alpha_equal(normalize(ctx, already), already));
  CHECK_THROWS_AS(normalize(ctx, T("x y")), TypeError);
}

TEST_CASE("long normal forms") {
  Context c;
  c.add("x", F("a -> p"));
  c.add("y", F("a"));
  c.add("z", F("a -> b \\/ c"));
  c.add("u1", F("b -> p"));
  c.add("u2", F("c -> p"));
  CHECK(is_long_normal(c, T("\\w:a. x w"), F("a -> p")));
  CHECK_FALSE(is_long_normal(c, T("z y"), F("b \\/ c")));
  CHECK(is_long_normal(c, T("case z y of v1:b => in1 v1 | v2:c => in2 v2"), F("b \\/ c")));
  CHECK(is_long_normal(c, T("case z y of v1:b => u1 v1 | v2:c => u2 v2"), F("p")));

  Context catom;
  catom.add("x", F("p"));
  CHECK(is_long_normal(catom, T("x"), F("p")));

  // eta-short at implication type is not lnf
  Context cfun;
  cfun.add("f", F("p -> q"));
  CHECK_FALSE(is_long_normal(cfun, T("f"), F("p -> q")));
  CHECK(is_long_normal(cfun, T("\\x:p. f x"), F("p -> q")));

  // absurd spines
  Context cbot;
  cbot.add("z", F("false"));
  CHECK(is_long_normal(cbot, T("absurd z : q"), F("q")));
  CHECK(is_long_normal(cbot, T("z"), F("false")));

  // every lnf is normal
  for (const char* s : {"\\w:a. x w", "case z y of v1:b => in1 v1 | v2:c => in2 v2",
                        "case z y of v1:b => u1 v1 | v2:c => u2 v2"}) {
    CHECK_FALSE(reduce_step(c, T(s)).has_value());
  }
}

TEST_CASE("beta eta equality") {
  CHECK(beta_eta_equal(T("\\x:p. (\\y:p. y) x"), T("\\x:p. x")));
  // eta: \x.\y. x y == \x. x at type (p -> q) -> p -> q
  CHECK(beta_eta_equal(T("\\x:p -> q. \\y:p. x y"), T("\\x:p -> q. x")));
  CHECK_FALSE(beta_eta_equal(T("\\x:p. \\y:q. y"), T("\\x:p. \\y:q. x")));
  CHECK_THROWS_AS(beta_eta_equal(T("<x, y>"), T("x")), std::invalid_argument);
}

TEST_CASE("calculus properties on generated terms") {
  gen::TermGen tg(42);
  Context empty;
  int with_redexes = 0;
  for (int i = 0; i < 400; ++i) {
    auto [t, goal] = tg.closed_term(5);
    Formula ty = typecheck(empty, t);
    CHECK(ty == goal);

    // subject reduction along the leftmost-outermost sequence
    Term cur = t;
    int steps = 0;
    while (auto next = reduce_step(empty, cur)) {
      ++steps;
      REQUIRE_MESSAGE(steps < 4000, "runaway reduction");
      cur = *next;
      CHECK(typecheck(empty, cur) == ty);
    }
    if (steps > 0) ++with_redexes;

    // both strategies agree up to alpha conversion
    Term lo = normalize(empty, t, Strategy::LeftmostOutermost);
    Term ri = normalize(empty, t, Strategy::RightmostInnermost);
    CHECK(alpha_equal(lo, ri));
    CHECK(alpha_equal(lo, cur));
    CHECK_FALSE(reduce_step(empty, lo).has_value());
  }
  // the generator must actually exercise reduction
  CHECK(with_redexes > 100);
}
