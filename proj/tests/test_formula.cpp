#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ipc/formula.hpp"

using namespace ipc;

namespace {

Formula v(const char* n) { return Formula::var(n); }

// Random formula over the given atoms, used for round-trip properties.
Formula random_formula(std::mt19937& rng, int max_depth, const std::vector<Formula>& atoms) {
  std::uniform_int_distribution<int> pick(0, max_depth <= 0 ? 1 : 5);
  switch (pick(rng)) {
    case 2: return Formula::impl(random_formula(rng, max_depth - 1, atoms),
                                 random_formula(rng, max_depth - 1, atoms));
    case 3: return Formula::conj(random_formula(rng, max_depth - 1, atoms),
                                 random_formula(rng, max_depth - 1, atoms));
    case 4: return Formula::disj(random_formula(rng, max_depth - 1, atoms),
                                 random_formula(rng, max_depth - 1, atoms));
    case 5: return Formula::neg(random_formula(rng, max_depth - 1, atoms));
    case 0: return Formula::falsum();
    default: {
      std::uniform_int_distribution<std::size_t> a(0, atoms.size() - 1);
      return atoms[a(rng)];
    }
  }
}

}  // namespace

TEST_CASE("parsing basics") {
  CHECK(parse_formula("p -> p") == Formula::impl(v("p"), v("p")));
  CHECK(parse_formula("~p") == Formula::impl(v("p"), Formula::falsum()));
  CHECK(parse_formula("p -> q -> r") == Formula::impl(v("p"), Formula::impl(v("q"), v("r"))));
  CHECK(parse_formula("(p -> q) -> r") == Formula::impl(Formula::impl(v("p"), v("q")), v("r")));
  CHECK(parse_formula("false") == Formula::falsum());
  CHECK(parse_formula("p /\\ q \\/ r") == Formula::disj(Formula::conj(v("p"), v("q")), v("r")));
  CHECK(parse_formula("  p' -> q_1  ") == Formula::impl(v("p'"), v("q_1")));
  CHECK_THROWS_AS(parse_formula("p ->"), ParseError);
  CHECK_THROWS_AS(parse_formula("(p"), ParseError);
  CHECK_THROWS_AS(parse_formula("p q"), ParseError);
  CHECK_THROWS_AS(parse_formula(""), ParseError);
}

TEST_CASE("interning gives structural identity") {
  Formula a = parse_formula("p -> q /\\ r");
  Formula b = Formula::impl(v("p"), Formula::conj(v("q"), v("r")));
  CHECK(a == b);
  CHECK(a.id() == b.id());
  CHECK(parse_formula("p") != parse_formula("q"));
}

TEST_CASE("printing uses minimal parentheses") {
  CHECK(print_formula(parse_formula("p -> q -> r")) == "p -> q -> r");
  CHECK(print_formula(parse_formula("(p -> q) -> r")) == "(p -> q) -> r");
  CHECK(print_formula(parse_formula("p /\\ (q \\/ r)")) == "p /\\ (q \\/ r)");
  CHECK(print_formula(parse_formula("(p /\\ q) \\/ r")) == "p /\\ q \\/ r");
  CHECK(print_formula(parse_formula("~p")) == "p -> false");
}

TEST_CASE("round trip on random formulas") {
  std::mt19937 rng(7);
  std::vector<Formula> atoms{v("p"), v("q"), v("r")};
  for (int i = 0; i < 500; ++i) {
    Formula f = random_formula(rng, 5, atoms);
    CHECK(parse_formula(print_formula(f)) == f);
  }
}

TEST_CASE("order") {
  CHECK(order(v("p")) == 0);
  CHECK(order(parse_formula("p -> q")) == 1);
  CHECK(order(phi_k(5)) == 4);
  CHECK(order(parse_formula("(p -> q) -> (r -> s) -> t")) == 2);
  CHECK_THROWS_AS(order(parse_formula("p /\\ q")), std::invalid_argument);
  CHECK_THROWS_AS(order(parse_formula("~p")), std::invalid_argument);
  for (int k = 1; k <= 8; ++k) CHECK(order(phi_k(k)) == k - 1);
}

TEST_CASE("targets") {
  CHECK(targets(v("p")) == std::vector<Formula>{v("p")});
  Formula f = parse_formula("r -> p /\\ (q -> p) /\\ (s -> p \\/ q)");
  CHECK(targets(f) == std::vector<Formula>{v("p"), parse_formula("p \\/ q")});
  Formula g = parse_formula("(p \\/ q) -> r /\\ s");
  CHECK(targets(g) == std::vector<Formula>{v("r"), v("s")});
  // Every target is an atom or disjunction and a subformula.
  Formula h = parse_formula("(a -> b \\/ c) /\\ (false -> d)");
  auto subs = subformulas(h);
  for (Formula t : targets(h)) {
    CHECK((t.is_atom() || t.is_disj()));
    CHECK(std::find(subs.begin(), subs.end(), t) != subs.end());
  }
}

TEST_CASE("traces") {
  Formula f = parse_formula("r -> p /\\ (q -> p) /\\ (s -> p \\/ q)");
  auto tr = traces(v("p"), f);
  REQUIRE(tr.size() == 2);
  std::vector<Formula> t1{v("r")};
  std::vector<Formula> t2{v("q"), v("r")};
  std::sort(t2.begin(), t2.end());
  CHECK(std::find(tr.begin(), tr.end(), t1) != tr.end());
  CHECK(std::find(tr.begin(), tr.end(), t2) != tr.end());

  CHECK(traces(v("p"), v("p")) == std::vector<std::vector<Formula>>{{}});
  CHECK(traces(v("q"), v("p")).empty());

  // For implicational formulas the single trace is the argument set.
  Formula g = parse_formula("a -> b -> a -> c");
  auto tg = targets(g);
  REQUIRE(tg.size() == 1);
  auto trg = traces(tg[0], g);
  REQUIRE(trg.size() == 1);
  std::vector<Formula> args{v("a"), v("b")};
  std::sort(args.begin(), args.end());
  CHECK(trg[0] == args);
  // Trace members are subformulas.
  auto subs = subformulas(f);
  for (const auto& t : traces(v("p"), f))
    for (Formula x : t) CHECK(std::find(subs.begin(), subs.end(), x) != subs.end());
}

TEST_CASE("subformulas") {
  CHECK(subformulas(v("p")) == std::vector<Formula>{v("p")});
  auto s = subformulas(parse_formula("p -> q"));
  CHECK(s == std::vector<Formula>{parse_formula("p -> q"), v("p"), v("q")});
  auto s2 = subformulas(parse_formula("p \\/ false"));
  CHECK(s2.size() == 3);
  // Shared subterms are listed once.
  CHECK(subformulas(parse_formula("(p -> p) -> p")).size() == 3);
  CHECK(subformulas(parse_formula("(p -> p) -> p -> p")).size() == 3);
}

TEST_CASE("substitute") {
  CHECK(substitute(parse_formula("p -> q"), "p", parse_formula("r /\\ s")) ==
        parse_formula("(r /\\ s) -> q"));
  CHECK(substitute(v("p"), "q", v("r")) == v("p"));
  CHECK(substitute(parse_formula("p -> p"), "p", Formula::falsum()) ==
        parse_formula("false -> false"));
}

TEST_CASE("phi_k") {
  CHECK(phi_k(1) == v("p1"));
  CHECK(phi_k(2) == parse_formula("p1 -> p2"));
  CHECK(phi_k(5) == parse_formula("(((p1 -> p2) -> p3) -> p4) -> p5"));
  CHECK_THROWS_AS(phi_k(0), std::invalid_argument);
  for (int k = 1; k <= 8; ++k) CHECK(classify(phi_k(k)).is_implicational);
}

TEST_CASE("classify fragments") {
  FragmentClass c1 = classify(parse_formula("p -> q"));
  CHECK(c1.in_t1_minus);
  CHECK(c1.in_t2_minus);
  CHECK(c1.in_t3_minus);
  CHECK(c1.data_atoms == std::vector<std::string>{"p"});
  CHECK(c1.control_atoms == std::vector<std::string>{"q"});

  FragmentClass c2 = classify(parse_formula("((p1 -> q2) -> q1) -> q1"));
  CHECK(c2.in_t3_minus);
  CHECK_FALSE(c2.in_t2_minus);
  CHECK_FALSE(c2.in_t1_minus);
  CHECK(c2.data_atoms == std::vector<std::string>{"p1"});
  CHECK(c2.control_atoms == std::vector<std::string>{"q2", "q1"});

  FragmentClass c3 = classify(parse_formula("(~p -> q) -> (~r -> q) -> (p -> ~r) -> q"));
  CHECK(c3.in_order_two_plus);
  CHECK_FALSE(c3.is_implicational);
  CHECK_FALSE(c3.order.has_value());

  // q -> q forces q both ways for T1-, but q can be a bare control argument in T2-.
  FragmentClass c4 = classify(parse_formula("q -> q"));
  CHECK_FALSE(c4.in_t1_minus);
  CHECK(c4.in_t2_minus);
  CHECK(c4.in_t3_minus);

  // Depth-four arguments leave all the fragments.
  FragmentClass c5 = classify(parse_formula("(((p -> q) -> r) -> s) -> t"));
  CHECK_FALSE(c5.in_t3_minus);
  CHECK_FALSE(c5.in_order_two_plus);

  // Two non-atomic arguments inside one would-be T2- argument.
  FragmentClass c6 = classify(parse_formula("((p -> q) -> (r -> s) -> t) -> u"));
  CHECK_FALSE(c6.in_t3_minus);

  FragmentClass c7 = classify(parse_formula("~~p -> p"));
  CHECK(c7.in_order_two_plus);

  FragmentClass c8 = classify(parse_formula("(~p -> q) -> q"));
  CHECK(c8.in_order_two_plus);

  FragmentClass c9 = classify(parse_formula("p /\\ q"));
  CHECK_FALSE(c9.is_implicational);
  CHECK_FALSE(c9.in_t3_minus);
  CHECK_FALSE(c9.in_order_two_plus);

  // T1- implies T2- implies T3- on a small random corpus.
  std::mt19937 rng(11);
  std::vector<Formula> atoms{v("p"), v("q")};
  for (int i = 0; i < 300; ++i) {
    FragmentClass c = classify(random_formula(rng, 4, atoms));
    if (c.in_t1_minus) CHECK(c.in_t2_minus);
    if (c.in_t2_minus) CHECK(c.in_t3_minus);
    if (c.in_t3_minus) {
      CHECK(c.is_implicational);
      CHECK(*c.order <= 3);
    }
  }
}

TEST_CASE("contexts") {
  Context ctx;
  ctx.add("x", parse_formula("p"));
  ctx.add("y", parse_formula("q"));
  CHECK(ctx.size() == 2);
  CHECK(*ctx.lookup("x") == v("p"));
  CHECK_FALSE(ctx.lookup("z").has_value());
  // re-adding the same binding is a no-op; rebinding is rejected
  ctx.add("x", parse_formula("p"));
  CHECK(ctx.size() == 2);
  CHECK_THROWS_AS(ctx.add("x", parse_formula("q")), std::invalid_argument);
  // iteration order is insertion order
  CHECK(ctx.items()[0].first == "x");
  CHECK(ctx.items()[1].first == "y");
}

TEST_CASE("implicational formulas have a singleton target") {
  std::mt19937 rng(21);
  std::vector<Formula> atoms{v("p"), v("q"), v("r")};
  for (int i = 0; i < 200; ++i) {
    Formula f = random_formula(rng, 4, atoms);
    if (!is_implicational(f)) continue;
    auto tg = targets(f);
    REQUIRE(tg.size() == 1);
    CHECK(tg[0] == implicational_target(f));
    auto tr = traces(tg[0], f);
    CHECK_FALSE(tr.empty());
    // each trace is the argument set of the (single) dissection path
    auto args = implicational_arguments(f);
    std::sort(args.begin(), args.end());
    args.erase(std::unique(args.begin(), args.end()), args.end());
    REQUIRE(tr.size() == 1);
    CHECK(tr[0] == args);
  }
}

TEST_CASE("formula length counts atom occurrences") {
  CHECK(formula_length(v("p")) == 1);
  CHECK(formula_length(parse_formula("~p")) == 2);
  CHECK(formula_length(parse_formula("(p -> q) -> p \\/ q")) == 4);
}
