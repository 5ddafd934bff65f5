// Propositional formulas of intuitionistic logic: hash-consed syntax,
// concrete text format, contexts, and the structural machinery used by
// proof search (order, targets, traces, fragment classification).
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ipc {

enum class Conn : unsigned char { Var, Falsum, Impl, Conj, Disj };

struct FormulaNode;

// Immutable handle to an interned formula. Structural equality is pointer
// equality; id() is a dense integer suitable for bitsets and memo keys.
class Formula {
public:
  Formula() = default;

  static Formula var(std::string_view name);
  static Formula falsum();
  static Formula impl(Formula lhs, Formula rhs);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula neg(Formula f) { return impl(f, falsum()); }

  bool ok() const { return node_ != nullptr; }
  Conn tag() const;
  bool is_var() const { return tag() == Conn::Var; }
  bool is_falsum() const { return tag() == Conn::Falsum; }
  bool is_impl() const { return tag() == Conn::Impl; }
  bool is_conj() const { return tag() == Conn::Conj; }
  bool is_disj() const { return tag() == Conn::Disj; }
  bool is_atom() const { return is_var() || is_falsum(); }

  const std::string& var_name() const;
  Formula left() const;
  Formula right() const;
  std::uint32_t id() const;

  friend bool operator==(Formula a, Formula b) { return a.node_ == b.node_; }
  friend bool operator!=(Formula a, Formula b) { return a.node_ != b.node_; }
  // Total order by intern id, used for canonical set layouts.
  friend bool operator<(Formula a, Formula b);

private:
  explicit Formula(const FormulaNode* node) : node_(node) {}
  const FormulaNode* node_ = nullptr;
  friend struct FormulaHash;
};

struct FormulaHash {
  std::size_t operator()(Formula f) const {
    return std::hash<const void*>()(f.node_);
  }
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

// Text grammar (→ right-associative, ~u sugar for u -> false):
//   formula  := disjpart ("->" formula)?
//   disjpart := conjpart ("\/" conjpart)*
//   conjpart := unit ("/\" unit)*
//   unit     := ident | "false" | "~" unit | "(" formula ")"
//   ident    := [a-zA-Z][a-zA-Z0-9_']*
Formula parse_formula(std::string_view text);
// Parses the longest formula starting at pos; advances pos past it.
Formula parse_formula_prefix(std::string_view text, std::size_t& pos);
std::string print_formula(Formula f);

// Ordered hypothesis list: proof-variable name -> formula, no name twice.
class Context {
public:
  void add(const std::string& name, Formula f);
  std::optional<Formula> lookup(std::string_view name) const;
  bool contains(std::string_view name) const { return lookup(name).has_value(); }
  const std::vector<std::pair<std::string, Formula>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

private:
  std::vector<std::pair<std::string, Formula>> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Implicational order: atoms are 0, r(s -> t) = max(r(t), r(s)+1).
// Rejects formulas containing /\, \/ or false.
int order(Formula f);
bool is_implicational(Formula f);

// Target of an implicational formula s1 -> ... -> sn -> p.
Formula implicational_target(Formula f);
std::vector<Formula> implicational_arguments(Formula f);

// TG(f): atoms and disjunctions reachable through arguments and conjuncts.
std::vector<Formula> targets(Formula f);

// Traces to alpha in f, as canonical sets of formulas (each sorted by id,
// duplicates removed, traces deduplicated).
std::vector<std::vector<Formula>> traces(Formula alpha, Formula f);

// One dissection path leading from f to the target alpha: the eliminations
// to perform (left/right projection at a conjunction, argument discharge at
// an implication). Used to assemble eliminator spines.
struct TraceStep {
  enum class Kind : unsigned char { Arg, ProjLeft, ProjRight } kind;
  Formula arg;  // set for Kind::Arg
};
struct TracePath {
  std::vector<TraceStep> steps;
  std::vector<Formula> trace_set() const;  // canonical set of Arg formulas
};
std::vector<TracePath> trace_paths(Formula alpha, Formula f);

// All subformulas of f including f itself, preorder, no duplicates.
std::vector<Formula> subformulas(Formula f);

// Every occurrence of the propositional variable `atom` replaced by g.
Formula substitute(Formula f, std::string_view atom, Formula g);

// The hierarchy formula over p1..pk: phi_k(1) = p1, phi_k(k+1) = phi_k(k) -> p_{k+1}.
Formula phi_k(int k);

struct FragmentClass {
  bool is_implicational = false;
  std::optional<int> order;  // present iff is_implicational
  bool in_t1_minus = false;
  bool in_t2_minus = false;
  bool in_t3_minus = false;
  // Inferred atom partition witnessing the strongest T-fragment membership.
  std::vector<std::string> data_atoms;
  std::vector<std::string> control_atoms;
  bool in_order_two_plus = false;
};
FragmentClass classify(Formula f);

// Length of a formula counting atom occurrences (variables and false).
std::size_t formula_length(Formula f);

// Propositional variable names occurring in f, in first-occurrence order.
std::vector<std::string> atom_names(Formula f);

}  // namespace ipc
