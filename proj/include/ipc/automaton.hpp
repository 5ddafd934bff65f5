// Monotonic automata: alternating machines with write-once registers,
// check-set-goto and universal-split instructions, inductive acceptance
// with witness trees, and a line-based text format.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ipc/search_stats.hpp"

namespace ipc {

struct Instruction {
  enum class Kind : unsigned char { CheckSet, Split };
  Kind kind;
  std::string at;
  // CheckSet fields
  std::vector<std::string> check;
  std::vector<std::string> set;
  std::string go;
  // Split fields
  std::string left;
  std::string right;

  static Instruction check_set(std::string at, std::vector<std::string> check,
                               std::vector<std::string> set, std::string go);
  static Instruction split(std::string at, std::string left, std::string right);
};

// A fixed-width bitset over an automaton's register table.
class RegisterSet {
public:
  RegisterSet() = default;
  explicit RegisterSet(std::size_t bits) : words_((bits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= 1ull << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ull; }
  bool subset_of(const RegisterSet& o) const;
  RegisterSet union_with(const RegisterSet& o) const;
  RegisterSet intersect(const RegisterSet& o) const;
  std::size_t count() const;
  bool operator==(const RegisterSet& o) const { return words_ == o.words_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

private:
  std::vector<std::uint64_t> words_;
};

struct Configuration {
  std::uint32_t state = 0;
  RegisterSet store;
  bool operator==(const Configuration& o) const { return state == o.state && store == o.store; }
};

struct WitnessTree {
  Configuration config;
  std::optional<std::size_t> instruction;  // index into instructions(); none at the final state
  std::vector<WitnessTree> children;
};

class MonotonicAutomaton {
public:
  void add_state(const std::string& name);
  void add_register(const std::string& name);
  void set_final(const std::string& name) { final_ = name; }
  void add_instruction(Instruction i) { instructions_.push_back(std::move(i)); }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& registers() const { return registers_; }
  const std::string& final_state() const { return final_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }

  std::optional<std::size_t> state_index(std::string_view name) const;
  std::optional<std::size_t> register_index(std::string_view name) const;

  // Configuration helpers (throw on unknown names).
  Configuration config(const std::string& state, const std::vector<std::string>& store) const;
  std::string describe(const Configuration& c) const;

private:
  std::vector<std::string> states_;
  std::vector<std::string> registers_;
  std::unordered_map<std::string, std::size_t> state_map_;
  std::unordered_map<std::string, std::size_t> register_map_;
  std::string final_;
  std::vector<Instruction> instructions_;
};

// Empty iff all structural invariants hold: the final state is declared,
// instructions name declared states and registers, and the state and
// register identifier sets are disjoint.
std::vector<std::string> validate(const MonotonicAutomaton& a);

// Successor configurations of c under instruction i: one for an applicable
// check-set, both branches for a split, empty when inapplicable.
std::vector<Configuration> step(const MonotonicAutomaton& a, const Configuration& c,
                                const Instruction& i);

struct AcceptanceResult {
  bool accepting = false;
  std::optional<WitnessTree> witness;  // present iff accepting
  SearchStats stats;
};

// Inductive acceptance: final state, an applicable check-set instruction
// with accepting successor, or a split with both branches accepting.
AcceptanceResult accepts(const MonotonicAutomaton& a, const Configuration& c);

bool is_nondeterministic(const MonotonicAutomaton& a);

// Re-validates a witness tree against the transition relation.
bool witness_consistent(const MonotonicAutomaton& a, const WitnessTree& w);

struct ParsedAutomaton {
  MonotonicAutomaton automaton;
  std::optional<Configuration> initial;
};

// Text format, one item per line, `#` starts a comment:
//   states: q0 q1 f
//   registers: r0 r1
//   final: f
//   init: q0 {r0}
//   q0: check {r0} set {r1} goto q1
//   q0: split q1 q2
ParsedAutomaton parse_automaton(std::string_view text);
std::string print_automaton(const MonotonicAutomaton& a,
                            const std::optional<Configuration>& initial = std::nullopt);

}  // namespace ipc
