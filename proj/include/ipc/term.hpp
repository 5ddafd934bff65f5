// Proof terms for intuitionistic propositional logic: the lambda calculus
// with pairs, injections, case analysis and ex falso, together with type
// checking, reduction, normal forms and comparison.
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "ipc/formula.hpp"

namespace ipc {

enum class TermTag : unsigned char {
  Var, Abs, App, Pair, Proj1, Proj2, Inj1, Inj2, Case, Absurd
};

struct TermNode;

// Immutable shared term tree. Injections optionally cache the full
// disjunction type they construct; the cache is ignored by alpha_equal and
// printing and lets typecheck report a unique type for synthesized proofs.
class Term {
public:
  Term() = default;

  static Term var(std::string name);
  static Term abs(std::string name, Formula annotation, Term body);
  static Term app(Term fun, Term arg);
  static Term pair(Term first, Term second);
  static Term proj1(Term of);
  static Term proj2(Term of);
  static Term inj1(Term of, std::optional<Formula> disj = std::nullopt);
  static Term inj2(Term of, std::optional<Formula> disj = std::nullopt);
  static Term case_of(Term scrutinee, std::string name1, Formula ann1, Term branch1,
                      std::string name2, Formula ann2, Term branch2);
  static Term absurd(Term of, Formula target);

  bool ok() const { return node_ != nullptr; }
  TermTag tag() const;
  const std::string& name() const;    // Var, Abs binder, Case first binder
  const std::string& name2() const;   // Case second binder
  Formula annotation() const;         // Abs, Absurd target, Case first binder
  Formula annotation2() const;        // Case second binder
  const std::optional<Formula>& inj_disj() const;
  Term child() const;                 // Abs body, Proj/Inj/Absurd subject, Case scrutinee, App fun, Pair first
  Term child2() const;                // App arg, Pair second, Case branch1
  Term child3() const;                // Case branch2

private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
  friend Term make_term(TermNode node);
};

class TypeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The unique type derivable for t in ctx; throws TypeError when the term is
// ill-typed, has an unbound variable, or an injection type stays ambiguous.
Formula typecheck(const Context& ctx, const Term& t);

// Bidirectional variant: does t prove goal in ctx? Resolves bare injection
// types against the goal instead of failing on them.
bool checks_against(const Context& ctx, const Term& t, Formula goal);

std::set<std::string> free_vars(const Term& t);

// Capture-free substitution of n for x in m; binders are renamed with
// primes when needed.
Term subst_term(const Term& m, const std::string& x, const Term& n);

enum class Strategy { LeftmostOutermost, RightmostInnermost };

// One contraction of a beta or permutation redex in the given strategy
// order, or nullopt when t is normal. The context types the free variables
// (needed to retype ex-falso eliminations under case permutations).
std::optional<Term> reduce_step(const Context& ctx, const Term& t,
                                Strategy strategy = Strategy::LeftmostOutermost);

// Iterated reduce_step; checks typing upfront and guards against runaway
// reduction with a step bound.
Term normalize(const Context& ctx, const Term& t,
               Strategy strategy = Strategy::LeftmostOutermost);

// Long normal form recognition. Precondition: typecheck(ctx, t) == goal.
bool is_long_normal(const Context& ctx, const Term& t, Formula goal);

bool alpha_equal(const Term& a, const Term& b);

// Equality after beta normalization and exhaustive eta reduction, for terms
// of the implicational fragment (variables, abstractions, applications).
bool beta_eta_equal(const Term& m, const Term& n);

std::size_t term_size(const Term& t);

// Concrete syntax:
//   \x:F. t   juxtaposition   <t, u>   t.1   t.2
//   in1 t   in2 t   case t of x:F => u | y:G => v   absurd t : F
Term parse_term(std::string_view text);
std::string print_term(const Term& t);

}  // namespace ipc
