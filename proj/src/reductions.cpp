#include "ipc/reductions.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ipc {

Formula judgement_formula(const EncodedJudgement& j) {
  Formula out = j.goal;
  const auto& items = j.context.items();
  for (std::size_t i = items.size(); i-- > 0;) out = Formula::impl(items[i].second, out);
  return out;
}

// ---------------------------------------------------------------------------
// Formula -> automaton

namespace {

// Builder wrapper holding the subformula numbering of the source formula.
class IpcAutomatonBuilder {
public:
  explicit IpcAutomatonBuilder(Formula phi) : subs_(subformulas(phi)) {
    for (std::size_t i = 0; i < subs_.size(); ++i) index_[subs_[i].id()] = i;
    for (std::size_t i = 0; i < subs_.size(); ++i) {
      a_.add_state(state(subs_[i]));
      a_.add_register(reg(subs_[i]));
    }
    a_.add_state("fin");
    a_.set_final("fin");
  }

  std::string state(Formula f) const { return "s" + std::to_string(index_.at(f.id())); }
  std::string reg(Formula f) const { return "r" + std::to_string(index_.at(f.id())); }

  // One instruction chain that checks `check`, then reaches all goal states
  // through universal splits; empty goals go straight to the final state.
  void spawn(const std::string& from, const std::vector<std::string>& check,
             const std::vector<std::string>& goals, const std::string& aux_base) {
    if (goals.empty()) {
      a_.add_instruction(Instruction::check_set(from, check, {}, "fin"));
      return;
    }
    if (goals.size() == 1) {
      a_.add_instruction(Instruction::check_set(from, check, {}, goals[0]));
      return;
    }
    // chain of fresh split states x1..x_{k-1}
    std::vector<std::string> chain;
    for (std::size_t k = 0; k + 1 < goals.size(); ++k) {
      chain.push_back(aux_base + "_" + std::to_string(k));
      a_.add_state(chain.back());
    }
    a_.add_instruction(Instruction::check_set(from, check, {}, chain[0]));
    for (std::size_t k = 0; k + 1 < goals.size(); ++k) {
      const std::string& next = k + 2 < goals.size() ? chain[k + 1] : goals[k + 1];
      a_.add_instruction(Instruction::split(chain[k], goals[k], next));
    }
  }

  AutomatonWithStart build(Formula phi) {
    // families 1 and 2 plus disjunction introduction, per subformula
    for (Formula f : subs_) {
      if (f.is_conj()) {
        a_.add_instruction(Instruction::split(state(f), state(f.left()), state(f.right())));
      } else if (f.is_impl()) {
        a_.add_instruction(
            Instruction::check_set(state(f), {}, {reg(f.left())}, state(f.right())));
      } else if (f.is_disj()) {
        a_.add_instruction(Instruction::check_set(state(f), {}, {}, state(f.left())));
        a_.add_instruction(Instruction::check_set(state(f), {}, {}, state(f.right())));
      }
    }
    // family 3: eliminations at atom and disjunction goal states
    for (std::size_t gi = 0; gi < subs_.size(); ++gi) {
      Formula goal = subs_[gi];
      if (!goal.is_atom() && !goal.is_disj()) continue;
      for (std::size_t hi = 0; hi < subs_.size(); ++hi) {
        Formula psi = subs_[hi];
        std::vector<Formula> tg = targets(psi);
        for (std::size_t ai = 0; ai < tg.size(); ++ai) {
          Formula alpha = tg[ai];
          if (alpha.is_var() && alpha != goal) continue;
          std::vector<std::vector<Formula>> trs = traces(alpha, psi);
          for (std::size_t ti = 0; ti < trs.size(); ++ti) {
            std::string base = "a" + std::to_string(gi) + "_" + std::to_string(hi) + "_" +
                               std::to_string(ai) + "_" + std::to_string(ti);
            std::vector<std::string> goals;
            for (Formula rho : trs[ti]) goals.push_back(state(rho));
            if (alpha.is_disj()) {
              // resume states raise one disjunct and return to the goal
              std::string s1 = base + "_L";
              std::string s2 = base + "_R";
              a_.add_state(s1);
              a_.add_state(s2);
              a_.add_instruction(
                  Instruction::check_set(s1, {}, {reg(alpha.left())}, state(goal)));
              a_.add_instruction(
                  Instruction::check_set(s2, {}, {reg(alpha.right())}, state(goal)));
              goals.push_back(s1);
              goals.push_back(s2);
            }
            spawn(state(goal), {reg(psi)}, goals, base);
          }
        }
      }
    }
    Configuration start;
    start.state = static_cast<std::uint32_t>(*a_.state_index(state(phi)));
    start.store = RegisterSet(a_.registers().size());
    return {std::move(a_), start};
  }

private:
  std::vector<Formula> subs_;
  std::map<std::uint32_t, std::size_t> index_;
  MonotonicAutomaton a_;
};

}  // namespace

AutomatonWithStart ipc_to_automaton(Formula phi) {
  IpcAutomatonBuilder b(phi);
  return b.build(phi);
}

// ---------------------------------------------------------------------------
// Automaton -> formula

EncodedJudgement automaton_to_formula(const MonotonicAutomaton& a, const Configuration& c0) {
  // rename registers apart from states when the name sets overlap
  std::vector<std::string> reg_atom(a.registers().size());
  bool overlap = false;
  for (const std::string& r : a.registers())
    if (a.state_index(r)) overlap = true;
  std::string prefix = "v_";
  if (overlap) {
    bool fresh = false;
    while (!fresh) {
      fresh = true;
      for (const std::string& r : a.registers())
        if (a.state_index(prefix + r) || a.register_index(prefix + r)) {
          fresh = false;
          prefix = "v" + prefix;
          break;
        }
    }
  }
  for (std::size_t i = 0; i < a.registers().size(); ++i)
    reg_atom[i] = overlap ? prefix + a.registers()[i] : a.registers()[i];

  auto reg_var = [&](const std::string& name) {
    return Formula::var(reg_atom[*a.register_index(name)]);
  };
  auto state_var = [&](const std::string& name) { return Formula::var(name); };

  EncodedJudgement out;
  std::size_t h = 0;
  auto add = [&](Formula f) { out.context.add("h" + std::to_string(h++), f); };

  for (std::size_t i = 0; i < a.registers().size(); ++i)
    if (c0.store.test(i)) add(Formula::var(reg_atom[i]));
  add(state_var(a.final_state()));

  for (const Instruction& ins : a.instructions()) {
    if (ins.kind == Instruction::Kind::Split) {
      add(Formula::impl(state_var(ins.left),
                        Formula::impl(state_var(ins.right), state_var(ins.at))));
      continue;
    }
    // s1_1 -> ... -> s1_k -> (s2_1 -> ... -> s2_l -> p) -> q
    Formula inner = state_var(ins.go);
    for (std::size_t i = ins.set.size(); i-- > 0;)
      inner = Formula::impl(reg_var(ins.set[i]), inner);
    Formula axiom = Formula::impl(inner, state_var(ins.at));
    for (std::size_t i = ins.check.size(); i-- > 0;)
      axiom = Formula::impl(reg_var(ins.check[i]), axiom);
    add(axiom);
  }

  out.goal = Formula::var(a.states().at(c0.state));
  return out;
}

Formula ipc_to_iipc3(Formula phi) {
  AutomatonWithStart aw = ipc_to_automaton(phi);
  return judgement_formula(automaton_to_formula(aw.automaton, aw.start));
}

// ---------------------------------------------------------------------------
// Finite automata on words

AutomatonWithStart nfa_to_automaton(const Nfa& nfa, const std::vector<std::string>& word) {
  if (nfa.state_count == 0) throw std::invalid_argument("finite automaton has no states");
  if (nfa.delta.size() != nfa.state_count)
    throw std::invalid_argument("transition table size mismatch");
  auto symbol_index = [&](const std::string& s) {
    for (std::size_t i = 0; i < nfa.alphabet.size(); ++i)
      if (nfa.alphabet[i] == s) return i;
    throw std::invalid_argument("word symbol outside the alphabet: " + s);
  };

  MonotonicAutomaton a;
  std::size_t n = word.size();
  std::size_t k = nfa.state_count - 1;  // final state index
  for (std::size_t t = 0; t <= n; ++t) a.add_state("q" + std::to_string(t));
  a.add_state("f");
  a.set_final("f");
  auto reg = [](std::size_t t, std::size_t i) {
    return "r" + std::to_string(t) + "_" + std::to_string(i);
  };
  for (std::size_t t = 0; t <= n; ++t)
    for (std::size_t i = 0; i <= k; ++i) a.add_register(reg(t, i));

  for (std::size_t t = 0; t < n; ++t) {
    std::size_t sym = symbol_index(word[t]);
    for (std::size_t i = 0; i <= k; ++i)
      for (std::size_t j : nfa.delta[i][sym])
        a.add_instruction(Instruction::check_set("q" + std::to_string(t), {reg(t, i)},
                                                 {reg(t + 1, j)}, "q" + std::to_string(t + 1)));
  }
  a.add_instruction(
      Instruction::check_set("q" + std::to_string(n), {reg(n, k)}, {}, "f"));

  Configuration start = a.config("q0", {reg(0, 0)});
  return {std::move(a), start};
}

// ---------------------------------------------------------------------------
// Linear bounded automata

std::vector<std::string> validate_lba(const LbaDescription& lba) {
  std::vector<std::string> out;
  auto has_state = [&](const std::string& s) {
    return std::find(lba.states.begin(), lba.states.end(), s) != lba.states.end();
  };
  auto has_symbol = [&](const std::string& s) {
    return std::find(lba.alphabet.begin(), lba.alphabet.end(), s) != lba.alphabet.end();
  };
  if (!has_state(lba.initial)) out.push_back("initial state is not declared");
  if (!has_state(lba.accept)) out.push_back("accepting state is not declared");
  for (const LbaTransition& t : lba.transitions) {
    if (!has_state(t.from)) out.push_back("transition from unknown state " + t.from);
    if (!has_state(t.to)) out.push_back("transition to unknown state " + t.to);
    if (!has_symbol(t.read)) out.push_back("transition reads unknown symbol " + t.read);
    if (!has_symbol(t.write)) out.push_back("transition writes unknown symbol " + t.write);
    if (t.move != 'L' && t.move != 'R' && t.move != 'S')
      out.push_back("transition move must be L, R or S");
    if (t.from == lba.accept) out.push_back("accepting state has an outgoing transition");
  }
  return out;
}

int default_time_exponent(const LbaDescription& lba, std::size_t input_length) {
  // configurations: |Q| * n * |Sigma|^n, capped to keep the arithmetic sane
  long double configs = static_cast<long double>(lba.states.size()) *
                        static_cast<long double>(input_length ? input_length : 1);
  for (std::size_t i = 0; i < input_length; ++i)
    configs *= static_cast<long double>(lba.alphabet.size());
  int e = 0;
  long double pow = 1;
  while (pow < configs && e < 62) {
    pow *= 2;
    ++e;
  }
  return e + 1;
}

namespace {

class LbaEncoder {
public:
  LbaEncoder(const LbaDescription& lba, const std::vector<std::string>& input, int p)
      : lba_(lba), input_(input), n_(input.size()), p_(p) {
    auto defects = validate_lba(lba);
    if (!defects.empty()) throw std::invalid_argument("invalid LBA: " + defects.front());
    if (p < 1) throw std::invalid_argument("time exponent must be at least 1");
    if (n_ < 1) throw std::invalid_argument("input must be nonempty");
    for (const std::string& s : input)
      if (std::find(lba.alphabet.begin(), lba.alphabet.end(), s) == lba.alphabet.end())
        throw std::invalid_argument("input symbol outside the alphabet: " + s);
  }

  AutomatonWithStart build() {
    declare_registers();
    a_.add_state("fin");
    a_.set_final("fin");
    guess_final_configuration();
    for (int d = p_; d >= 1; --d) level(d);
    verify_equal();
    verify_one_step();

    Configuration start;
    a_.add_state("q_init");
    start.state = static_cast<std::uint32_t>(*a_.state_index("q_init"));
    start.store = RegisterSet(a_.registers().size());
    start.store.set(*a_.register_index(s_reg("B", p_, lba_.initial)));
    for (std::size_t i = 1; i <= n_; ++i)
      start.store.set(*a_.register_index(c_reg("B", p_, i, input_[i - 1])));
    start.store.set(*a_.register_index(h_reg("B", p_, 1)));
    return {std::move(a_), start};
  }

private:
  std::string s_reg(const std::string& x, int d, const std::string& q) const {
    return "s_" + x + std::to_string(d) + "_" + q;
  }
  std::string c_reg(const std::string& x, int d, std::size_t i, const std::string& sym) const {
    return "c_" + x + std::to_string(d) + "_" + std::to_string(i) + "_" + sym;
  }
  std::string h_reg(const std::string& x, int d, std::size_t i) const {
    return "h_" + x + std::to_string(d) + "_" + std::to_string(i);
  }

  void declare_registers() {
    for (const char* x : {"B", "H", "E"})
      for (int d = 0; d <= p_; ++d) {
        for (const std::string& q : lba_.states) a_.add_register(s_reg(x, d, q));
        for (std::size_t i = 1; i <= n_; ++i)
          for (const std::string& sym : lba_.alphabet) a_.add_register(c_reg(x, d, i, sym));
        for (std::size_t i = 1; i <= n_; ++i) a_.add_register(h_reg(x, d, i));
      }
  }

  void check_set(const std::string& at, std::vector<std::string> check,
                 std::vector<std::string> set, const std::string& go) {
    a_.add_state(at);
    a_.add_state(go);
    a_.add_instruction(Instruction::check_set(at, std::move(check), std::move(set), go));
  }

  void split(const std::string& at, const std::string& l, const std::string& r) {
    a_.add_state(at);
    a_.add_state(l);
    a_.add_state(r);
    a_.add_instruction(Instruction::split(at, l, r));
  }

  // Initial phase: guess an accepting configuration into E_p.
  void guess_final_configuration() {
    check_set("q_init", {}, {s_reg("E", p_, lba_.accept)}, "gf_1");
    for (std::size_t i = 1; i <= n_; ++i)
      for (const std::string& sym : lba_.alphabet)
        check_set("gf_" + std::to_string(i), {}, {c_reg("E", p_, i, sym)},
                  "gf_" + std::to_string(i + 1));
    std::string from = "gf_" + std::to_string(n_ + 1);
    for (std::size_t j = 1; j <= n_; ++j)
      check_set(from, {}, {h_reg("E", p_, j)}, level_state(p_));
  }

  std::string level_state(int d) const { return "Q_" + std::to_string(d); }

  // Guess the midpoint H_d, split, and copy codes one level down.
  void level(int d) {
    std::string D = std::to_string(d);
    // (1) guess the intermediate configuration into H_d
    for (const std::string& q : lba_.states)
      check_set(level_state(d), {}, {s_reg("H", d, q)}, "Qg_" + D + "_1");
    for (std::size_t i = 1; i <= n_; ++i)
      for (const std::string& sym : lba_.alphabet)
        check_set("Qg_" + D + "_" + std::to_string(i), {}, {c_reg("H", d, i, sym)},
                  "Qg_" + D + "_" + std::to_string(i + 1));
    for (std::size_t j = 1; j <= n_; ++j)
      check_set("Qg_" + D + "_" + std::to_string(n_ + 1), {}, {h_reg("H", d, j)}, "Qs_" + D);
    // (2) universal split into the two halves
    split("Qs_" + D, "QB_" + D, "QE_" + D);
    // (3) first half: B_{d-1} := B_d, E_{d-1} := H_d
    copy_code("QB_" + D, "B", d, "B", d - 1, "QBH_" + D);
    copy_code("QBH_" + D, "H", d, "E", d - 1, level_state(d - 1));
    // (4) second half: B_{d-1} := H_d, E_{d-1} := E_d
    copy_code("QE_" + D, "H", d, "B", d - 1, "QEE_" + D);
    copy_code("QEE_" + D, "E", d, "E", d - 1, level_state(d - 1));
  }

  // Copy the (src,d)-code to (dst,d-1) by guessing which registers are set.
  void copy_code(const std::string& entry, const std::string& src, int d, const std::string& dst,
                 int dd, const std::string& exit) {
    for (const std::string& q : lba_.states)
      check_set(entry, {s_reg(src, d, q)}, {s_reg(dst, dd, q)}, entry + "_c1");
    for (std::size_t i = 1; i <= n_; ++i)
      for (const std::string& sym : lba_.alphabet)
        check_set(entry + "_c" + std::to_string(i), {c_reg(src, d, i, sym)},
                  {c_reg(dst, dd, i, sym)}, entry + "_c" + std::to_string(i + 1));
    for (std::size_t j = 1; j <= n_; ++j)
      check_set(entry + "_c" + std::to_string(n_ + 1), {h_reg(src, d, j)}, {h_reg(dst, dd, j)},
                exit);
  }

  // Zero-step verification at level 0: the B and E codes agree everywhere.
  void verify_equal() {
    for (const std::string& q : lba_.states)
      check_set(level_state(0), {s_reg("B", 0, q), s_reg("E", 0, q)}, {}, "Vc_1");
    for (std::size_t i = 1; i <= n_; ++i)
      for (const std::string& sym : lba_.alphabet)
        check_set("Vc_" + std::to_string(i), {c_reg("B", 0, i, sym), c_reg("E", 0, i, sym)}, {},
                  "Vc_" + std::to_string(i + 1));
    for (std::size_t j = 1; j <= n_; ++j)
      check_set("Vc_" + std::to_string(n_ + 1), {h_reg("B", 0, j), h_reg("E", 0, j)}, {}, "fin");
  }

  // One-step verification: some transition relates the two codes; the codes
  // agree on every cell except possibly the scanned one.
  void verify_one_step() {
    for (std::size_t t = 0; t < lba_.transitions.size(); ++t) {
      const LbaTransition& tr = lba_.transitions[t];
      for (std::size_t j = 1; j <= n_; ++j) {
        long jj = static_cast<long>(j) + (tr.move == 'L' ? -1 : tr.move == 'R' ? 1 : 0);
        if (jj < 1 || jj > static_cast<long>(n_)) continue;  // the head stays on the tape
        std::string base = "W" + std::to_string(t) + "_" + std::to_string(j);
        std::vector<std::string> entry_check = {
            s_reg("B", 0, tr.from),       h_reg("B", 0, j),
            c_reg("B", 0, j, tr.read),    s_reg("E", 0, tr.to),
            h_reg("E", 0, static_cast<std::size_t>(jj)), c_reg("E", 0, j, tr.write)};
        // agreement chain over the remaining cells
        std::vector<std::size_t> cells;
        for (std::size_t i = 1; i <= n_; ++i)
          if (i != j) cells.push_back(i);
        if (cells.empty()) {
          check_set(level_state(0), entry_check, {}, "fin");
          continue;
        }
        std::string cur = base + "_1";
        check_set(level_state(0), entry_check, {}, cur);
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
          std::string next = ci + 1 < cells.size() ? base + "_" + std::to_string(ci + 2) : "fin";
          for (const std::string& sym : lba_.alphabet)
            check_set(cur, {c_reg("B", 0, cells[ci], sym), c_reg("E", 0, cells[ci], sym)}, {},
                      next);
          cur = next;
        }
      }
    }
  }

  const LbaDescription& lba_;
  const std::vector<std::string>& input_;
  std::size_t n_;
  int p_;
  MonotonicAutomaton a_;
};

}  // namespace

AutomatonWithStart lba_to_automaton(const LbaDescription& lba,
                                    const std::vector<std::string>& input, int time_exponent) {
  LbaEncoder enc(lba, input, time_exponent);
  return enc.build();
}

// ---------------------------------------------------------------------------
// 3-CNF encoders

namespace {

void check_cnf(const Cnf3& psi) {
  if (psi.num_vars < 1) throw std::invalid_argument("the instance declares no variables");
  if (psi.clauses.empty()) throw std::invalid_argument("the instance has no clauses");
  for (const auto& clause : psi.clauses)
    for (const Cnf3::Lit& lit : clause)
      if (lit.var < 1 || lit.var > psi.num_vars)
        throw std::invalid_argument("literal variable out of range");
}

Formula plain(int i) { return Formula::var("p" + std::to_string(i)); }
Formula primed(int i) { return Formula::var("p" + std::to_string(i) + "'"); }
Formula rho(const Cnf3::Lit& lit) { return lit.positive ? plain(lit.var) : primed(lit.var); }
// the dual mapping used by the coNP encoder
Formula rho_bar(const Cnf3::Lit& lit) { return lit.positive ? primed(lit.var) : plain(lit.var); }

}  // namespace

Formula cnf_to_np_formula(const Cnf3& psi) {
  check_cnf(psi);
  int n = psi.num_vars;
  int k = static_cast<int>(psi.clauses.size());
  auto q = [](int i) { return Formula::var("q" + std::to_string(i)); };
  auto c = [](int i) { return Formula::var("c" + std::to_string(i)); };

  std::vector<Formula> axioms;
  for (int i = 1; i <= n - 1; ++i) {
    axioms.push_back(Formula::impl(Formula::impl(plain(i), q(i + 1)), q(i)));
    axioms.push_back(Formula::impl(Formula::impl(primed(i), q(i + 1)), q(i)));
  }
  axioms.push_back(Formula::impl(Formula::impl(plain(n), c(1)), q(n)));
  axioms.push_back(Formula::impl(Formula::impl(primed(n), c(1)), q(n)));
  for (int i = 1; i <= k - 1; ++i)
    for (const Cnf3::Lit& lit : psi.clauses[i - 1])
      axioms.push_back(Formula::impl(rho(lit), Formula::impl(c(i + 1), c(i))));
  for (const Cnf3::Lit& lit : psi.clauses[k - 1])
    axioms.push_back(Formula::impl(rho(lit), c(k)));

  Formula out = q(1);
  for (std::size_t i = axioms.size(); i-- > 0;) out = Formula::impl(axioms[i], out);
  return out;
}

EncodedJudgement cnf_to_conp_context(const Cnf3& psi) {
  check_cnf(psi);
  EncodedJudgement out;
  for (int i = 1; i <= psi.num_vars; ++i)
    out.context.add("X" + std::to_string(i),
                    Formula::impl(Formula::neg(plain(i)),
                                  Formula::impl(Formula::neg(primed(i)), Formula::falsum())));
  for (std::size_t j = 0; j < psi.clauses.size(); ++j) {
    Formula f = Formula::falsum();
    for (std::size_t m = 3; m-- > 0;) f = Formula::impl(rho_bar(psi.clauses[j][m]), f);
    out.context.add("Y" + std::to_string(j + 1), f);
  }
  out.goal = Formula::falsum();
  return out;
}

// ---------------------------------------------------------------------------
// Classical order-3 normalization

namespace {

struct Literal {
  std::string var;
  bool positive;
  bool operator==(const Literal& o) const { return var == o.var && positive == o.positive; }
};

using Clause = std::vector<Literal>;

// Clause lists with classical constants folded away: nullopt clause list
// means "true"; an empty clause means "false".
using ClauseList = std::vector<Clause>;

ClauseList cnf_of(Formula f, bool positive);

ClauseList cnf_conj(ClauseList a, ClauseList b) {
  for (Clause& c : b) a.push_back(std::move(c));
  return a;
}

ClauseList cnf_disj(const ClauseList& a, const ClauseList& b) {
  ClauseList out;
  for (const Clause& x : a)
    for (const Clause& y : b) {
      Clause merged = x;
      merged.insert(merged.end(), y.begin(), y.end());
      out.push_back(std::move(merged));
    }
  return out;
}

ClauseList cnf_of(Formula f, bool positive) {
  switch (f.tag()) {
    case Conn::Var:
      return {{Literal{f.var_name(), positive}}};
    case Conn::Falsum:
      if (positive) return {{}};  // false: one empty clause
      return {};                  // not false: true, no clauses
    case Conn::Impl:
      if (positive) return cnf_disj(cnf_of(f.left(), false), cnf_of(f.right(), true));
      return cnf_conj(cnf_of(f.left(), true), cnf_of(f.right(), false));
    case Conn::Conj:
      if (positive) return cnf_conj(cnf_of(f.left(), true), cnf_of(f.right(), true));
      return cnf_disj(cnf_of(f.left(), false), cnf_of(f.right(), false));
    case Conn::Disj:
      if (positive) return cnf_disj(cnf_of(f.left(), true), cnf_of(f.right(), true));
      return cnf_conj(cnf_of(f.left(), false), cnf_of(f.right(), false));
  }
  return {};
}

// Canonical clause layout: negative literals ascending by name, then
// positive literals descending, so the first positive literal is the target
// the rewriting picks. Tautological clauses drop out.
std::optional<Clause> canonical_clause(const Clause& c) {
  std::vector<std::string> neg, pos;
  for (const Literal& l : c) {
    auto& side = l.positive ? pos : neg;
    if (std::find(side.begin(), side.end(), l.var) == side.end()) side.push_back(l.var);
  }
  for (const std::string& v : pos)
    if (std::find(neg.begin(), neg.end(), v) != neg.end()) return std::nullopt;  // tautology
  std::sort(neg.begin(), neg.end());
  std::sort(pos.begin(), pos.end(), std::greater<std::string>());
  Clause out;
  for (const std::string& v : neg) out.push_back({v, false});
  for (const std::string& v : pos) out.push_back({v, true});
  return out;
}

}  // namespace

Formula classical_order3(Formula phi) {
  std::vector<Formula> args = implicational_arguments(phi);
  Formula target = implicational_target(phi);
  if (!target.is_var())
    throw std::invalid_argument("classical normalization needs a variable target: " +
                                print_formula(phi));

  // conjunction of the arguments, in clausal form
  ClauseList clauses;
  for (Formula a : args) clauses = cnf_conj(std::move(clauses), cnf_of(a, true));

  std::vector<Clause> canon;
  for (const Clause& c : clauses) {
    auto cc = canonical_clause(c);
    if (!cc) continue;
    if (std::find(canon.begin(), canon.end(), *cc) == canon.end()) canon.push_back(*cc);
  }

  // rewrite each clause as an order-<=2 argument
  std::vector<Formula> rewritten;
  for (const Clause& c : canon) {
    std::vector<std::string> neg;
    std::vector<std::string> pos;
    for (const Literal& l : c) (l.positive ? pos : neg).push_back(l.var);
    Formula body;
    if (pos.empty()) {
      body = target;  // all-negative clause: q1 -> ... -> qr -> p
    } else {
      body = Formula::var(pos.front());  // the chosen positive literal
      for (std::size_t i = pos.size(); i-- > 1;)
        body = Formula::impl(Formula::impl(Formula::var(pos[i]), target), body);
    }
    for (std::size_t i = neg.size(); i-- > 0;) body = Formula::impl(Formula::var(neg[i]), body);
    rewritten.push_back(body);
  }

  Formula out = target;
  for (std::size_t i = rewritten.size(); i-- > 0;) out = Formula::impl(rewritten[i], out);
  return out;
}

// ---------------------------------------------------------------------------
// File formats

Cnf3 parse_dimacs(std::string_view text, bool pad_short_clauses) {
  Cnf3 out;
  std::istringstream is{std::string(text)};
  std::string line;
  bool header = false;
  int declared_clauses = 0;
  std::vector<int> pending;
  auto flush_clause = [&]() {
    if (pending.empty()) return;
    if (pending.size() > 3)
      throw std::runtime_error("clause with more than three literals");
    if (pending.size() < 3) {
      if (!pad_short_clauses)
        throw std::runtime_error("clause with fewer than three literals (use padding)");
      while (pending.size() < 3) pending.push_back(pending.back());
    }
    std::array<Cnf3::Lit, 3> clause;
    for (int i = 0; i < 3; ++i) {
      int lit = pending[i];
      if (lit == 0 || std::abs(lit) > out.num_vars)
        throw std::runtime_error("literal out of range");
      clause[i] = {std::abs(lit), lit > 0};
    }
    out.clauses.push_back(clause);
    pending.clear();
  };
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    if (line[0] == 'p') {
      std::istringstream ls(line);
      std::string p, fmt;
      if (!(ls >> p >> fmt >> out.num_vars >> declared_clauses) || fmt != "cnf")
        throw std::runtime_error("malformed DIMACS header");
      header = true;
      continue;
    }
    if (!header) throw std::runtime_error("missing DIMACS header");
    std::istringstream ls(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0)
        flush_clause();
      else
        pending.push_back(lit);
    }
  }
  flush_clause();
  if (!header) throw std::runtime_error("missing DIMACS header");
  if (declared_clauses != 0 && declared_clauses != static_cast<int>(out.clauses.size()))
    throw std::runtime_error("clause count does not match the header");
  if (out.clauses.empty()) throw std::runtime_error("no clauses");
  return out;
}

LbaDescription parse_lba(std::string_view text) {
  LbaDescription out;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto tokens = [](std::string_view s) {
    std::vector<std::string> toks;
    std::string cur;
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) toks.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));
    return toks;
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    std::size_t begin = 0;
    while (begin < trimmed.size() && std::isspace(static_cast<unsigned char>(trimmed[begin])))
      ++begin;
    trimmed = trimmed.substr(begin);
    if (trimmed.empty()) continue;

    auto starts = [&](std::string_view kw) {
      if (trimmed.rfind(kw, 0) != 0) return false;
      trimmed = trimmed.substr(kw.size());
      return true;
    };
    if (starts("states:")) {
      for (auto& t : tokens(trimmed)) out.states.push_back(t);
    } else if (starts("initial:")) {
      auto t = tokens(trimmed);
      if (t.size() != 1) throw std::runtime_error("line " + std::to_string(lineno) + ": initial: wants one state");
      out.initial = t[0];
    } else if (starts("accept:")) {
      auto t = tokens(trimmed);
      if (t.size() != 1) throw std::runtime_error("line " + std::to_string(lineno) + ": accept: wants one state");
      out.accept = t[0];
    } else if (starts("alphabet:")) {
      for (auto& t : tokens(trimmed)) out.alphabet.push_back(t);
    } else {
      // q,a -> q',b,M
      std::size_t arrow = trimmed.find("->");
      if (arrow == std::string::npos)
        throw std::runtime_error("line " + std::to_string(lineno) + ": expected a transition");
      auto split_commas = [&](std::string_view part) {
        std::vector<std::string> items;
        std::string cur;
        for (char c : part) {
          if (c == ',') {
            items.push_back(cur);
            cur.clear();
          } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
          }
        }
        items.push_back(cur);
        return items;
      };
      auto lhs = split_commas(std::string_view(trimmed).substr(0, arrow));
      auto rhs = split_commas(std::string_view(trimmed).substr(arrow + 2));
      if (lhs.size() != 2 || rhs.size() != 3 || rhs[2].size() != 1)
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": transitions are q,a -> q',b,M");
      out.transitions.push_back({lhs[0], lhs[1], rhs[0], rhs[1], rhs[2][0]});
    }
  }
  auto defects = validate_lba(out);
  if (!defects.empty()) throw std::runtime_error("invalid LBA: " + defects.front());
  return out;
}

}  // namespace ipc
