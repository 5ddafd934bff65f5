// Translations between formalisms: formulas to monotonic automata and back,
// the order-3 implicational reduction, finite-automaton and LBA encodings,
// the NP and coNP fragment encoders, and classical order-3 normalization.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "ipc/automaton.hpp"
#include "ipc/formula.hpp"

namespace ipc {

struct AutomatonWithStart {
  MonotonicAutomaton automaton;
  Configuration start;
};

struct EncodedJudgement {
  Context context;
  Formula goal;
};

// Fold a judgement into the single implicational formula h1 -> ... -> goal.
Formula judgement_formula(const EncodedJudgement& j);

// The automaton whose configuration <state(phi'), Gamma> accepts exactly
// when Gamma |- phi' holds, for subformula judgements of phi. The start
// configuration corresponds to |- phi.
AutomatonWithStart ipc_to_automaton(Formula phi);

// Axiomatization of a configuration's acceptance: one atom per initially
// raised register plus the final state, one order-<=2 axiom per instruction;
// the goal is the start state's atom. Registers are renamed apart when the
// state and register identifier sets overlap.
EncodedJudgement automaton_to_formula(const MonotonicAutomaton& a, const Configuration& c0);

// Composition of the two translations: an implicational formula of order at
// most three, provable iff phi is.
Formula ipc_to_iipc3(Formula phi);

// Nondeterministic finite automaton with states 0..state_count-1, initial
// state 0 and final state state_count-1.
struct Nfa {
  std::size_t state_count = 0;
  std::vector<std::string> alphabet;
  // delta[state][symbol index] = successor states
  std::vector<std::vector<std::vector<std::size_t>>> delta;
};

// The run-encoding of a finite automaton on a word: registers r<t>_<i> mean
// "after t letters the automaton can be in state i".
AutomatonWithStart nfa_to_automaton(const Nfa& nfa, const std::vector<std::string>& word);

struct LbaTransition {
  std::string from;
  std::string read;
  std::string to;
  std::string write;
  char move = 'S';  // L, R or S
};

struct LbaDescription {
  std::vector<std::string> states;
  std::string initial;
  std::string accept;
  std::vector<std::string> alphabet;
  std::vector<LbaTransition> transitions;
};

std::vector<std::string> validate_lba(const LbaDescription& lba);

// Exponent bound sufficient for any reachability in the configuration
// graph: ceil(log2(|Q| * n * |Sigma|^n)) + 1.
int default_time_exponent(const LbaDescription& lba, std::size_t input_length);

// Halving simulation of a linear bounded automaton: the result accepts its
// start configuration iff the LBA reaches its accepting state on the input
// within 2^time_exponent steps.
AutomatonWithStart lba_to_automaton(const LbaDescription& lba,
                                    const std::vector<std::string>& input, int time_exponent);

struct Cnf3 {
  struct Lit {
    int var = 0;  // 1-based
    bool positive = true;
  };
  int num_vars = 0;
  std::vector<std::array<Lit, 3>> clauses;
};

// Satisfiability as provability: a T3- formula over data atoms p<i>, p<i>'
// and control atoms q<i>, c<j>, provable iff the instance is satisfiable.
Formula cnf_to_np_formula(const Cnf3& psi);

// Unsatisfiability as provability: order-two-plus hypotheses X<i>, Y<j> with
// goal false; derivable iff the instance is unsatisfiable.
EncodedJudgement cnf_to_conp_context(const Cnf3& psi);

// A classically equivalent formula of order at most three. Accepts any
// formula whose arguments are classical (the target must be a variable),
// including intermediate clause forms with disjunctions of literals.
Formula classical_order3(Formula phi);

// DIMACS cnf reader; clauses must have exactly three literals, or fewer
// with pad_short_clauses, which repeats the last literal.
Cnf3 parse_dimacs(std::string_view text, bool pad_short_clauses = false);

// Line format: `states:`, `initial:`, `accept:`, `alphabet:` headers and
// transition lines `q,a -> q',b,M` with M in {L,R,S}; `#` comments.
LbaDescription parse_lba(std::string_view text);

}  // namespace ipc
