#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "ipc/kripke.hpp"

using namespace ipc;

namespace {
Formula F(const char* s) { return parse_formula(s); }
}  // namespace

TEST_CASE("forcing clauses") {
  KripkeModel single(1);
  single.force("p", 0);
  CHECK(forces(single, 0, F("p \\/ q")));
  CHECK_FALSE(forces(single, 0, F("q")));
  CHECK_FALSE(forces(single, 0, F("false")));
  CHECK(forces(single, 0, F("p /\\ (q -> q)")));

  KripkeModel bare(1);
  CHECK(forces(bare, 0, F("p -> q")));  // no successor forces p

  // two-state chain, p only at the top: double negation holds, p does not
  KripkeModel chain(2);
  chain.add_leq(0, 1);
  chain.force("p", 1);
  CHECK(chain.defects().empty());
  CHECK(forces(chain, 0, F("~~p")));
  CHECK_FALSE(forces(chain, 0, F("p")));
  CHECK_FALSE(forces(chain, 0, F("~p")));
  CHECK(forces(chain, 1, F("p")));

  // monotonicity of forcing over subformulas
  Formula sample = F("(~p -> q) -> p \\/ (q -> p)");
  for (Formula sub : subformulas(sample))
    if (forces(chain, 0, sub)) CHECK(forces(chain, 1, sub));
}

TEST_CASE("model defects") {
  KripkeModel m(2);
  m.add_leq(0, 1);
  m.force("p", 0);  // not monotone: 0 forces p, 1 does not
  auto d = m.defects();
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("monotone") != std::string::npos);
  m.force("p", 1);
  CHECK(m.defects().empty());

  KripkeModel bad(2);
  bad.add_leq(0, 1);
  bad.add_leq(1, 0);
  CHECK_FALSE(bad.defects().empty());
}

TEST_CASE("countermodel search basics") {
  Context empty;
  // Peirce's law: two-state refutation
  auto peirce = countermodel_search(empty, F("((p -> q) -> p) -> p"), 2);
  REQUIRE(peirce.has_value());
  CHECK(peirce->model.size() == 2);
  CHECK(peirce->model.defects().empty());
  CHECK_FALSE(forces(peirce->model, peirce->state, F("((p -> q) -> p) -> p")));

  CHECK_FALSE(countermodel_search(empty, F("p -> p"), 3).has_value());

  // the example needing three states
  Formula three = F("(~p -> q) -> (~r -> q) -> (p -> ~r) -> q");
  CHECK_FALSE(countermodel_search(empty, three, 2).has_value());
  auto cm3 = countermodel_search(empty, three, 3);
  REQUIRE(cm3.has_value());
  CHECK(cm3->model.size() == 3);
  CHECK(cm3->model.defects().empty());
  CHECK_FALSE(forces(cm3->model, cm3->state, three));

  // context hypotheses must be forced at the countermodel state
  Context ctx;
  ctx.add("h", F("p -> q"));
  auto cm = countermodel_search(ctx, F("q"), 3);
  REQUIRE(cm.has_value());
  CHECK(forces(cm->model, cm->state, F("p -> q")));
  CHECK_FALSE(forces(cm->model, cm->state, F("q")));

  CHECK_FALSE(countermodel_search(ctx, F("p -> q"), 3).has_value());
}

TEST_CASE("countermodel search is deterministic") {
  Context empty;
  Formula f = F("p \\/ ~p");
  auto a = countermodel_search(empty, f, 3);
  auto b = countermodel_search(empty, f, 3);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->state == b->state);
  CHECK(a->model.to_text() == b->model.to_text());
  CHECK(a->model.size() == 2);  // smallest refutation of excluded middle
}

TEST_CASE("depth-2 countermodels for order two plus") {
  auto dn = countermodel_2plus(F("~~p -> p"));
  REQUIRE(dn.has_value());
  CHECK(dn->model.size() == 2);
  CHECK(dn->model.defects().empty());
  CHECK_FALSE(forces(dn->model, dn->state, F("~~p -> p")));

  CHECK_FALSE(countermodel_2plus(F("p -> p")).has_value());
  CHECK_FALSE(countermodel_2plus(F("p -> q -> p")).has_value());

  Formula three = F("(~p -> q) -> (~r -> q) -> (p -> ~r) -> q");
  auto cm3 = countermodel_2plus(three);
  REQUIRE(cm3.has_value());
  CHECK(cm3->model.size() == 3);
  CHECK(cm3->model.size() <= formula_length(three));
  CHECK_FALSE(forces(cm3->model, cm3->state, three));
  // depth 2: every non-root state is maximal
  for (std::size_t i = 1; i < cm3->model.size(); ++i)
    for (std::size_t j = 0; j < cm3->model.size(); ++j)
      if (i != j) CHECK_FALSE(cm3->model.leq(i, j));

  CHECK_THROWS_AS(countermodel_2plus(F("((p -> q) -> r) -> s")), std::invalid_argument);
  CHECK_THROWS_AS(countermodel_2plus(F("p /\\ q")), std::invalid_argument);
}

TEST_CASE("depth-2 search agrees with the general search") {
  std::mt19937 rng(3);
  std::vector<Formula> atoms{Formula::var("p"), Formula::var("q")};
  Context empty;
  int fragment_hits = 0;
  for (int i = 0; i < 4000 && fragment_hits < 120; ++i) {
    Formula f = gen::random_formula(rng, 3, atoms);
    if (!classify(f).in_order_two_plus) continue;
    ++fragment_hits;
    auto quick = countermodel_2plus(f);
    auto slow = countermodel_search(empty, f, 4);
    CHECK(quick.has_value() == slow.has_value());
    if (quick) {
      CHECK(quick->model.defects().empty());
      CHECK_FALSE(forces(quick->model, quick->state, f));
      CHECK(quick->model.size() <= formula_length(f));
    }
  }
  CHECK(fragment_hits >= 120);
}
