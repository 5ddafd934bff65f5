#include <algorithm>
#include <set>
#include <stdexcept>

#include "ipc/formula.hpp"

namespace ipc {

bool is_implicational(Formula f) {
  switch (f.tag()) {
    case Conn::Var: return true;
    case Conn::Impl: return is_implicational(f.left()) && is_implicational(f.right());
    default: return false;
  }
}

int order(Formula f) {
  if (!is_implicational(f))
    throw std::invalid_argument("order is defined for implicational formulas only: " +
                                print_formula(f));
  if (f.is_var()) return 0;
  return std::max(order(f.right()), order(f.left()) + 1);
}

Formula implicational_target(Formula f) {
  while (f.is_impl()) f = f.right();
  return f;
}

std::vector<Formula> implicational_arguments(Formula f) {
  std::vector<Formula> args;
  while (f.is_impl()) {
    args.push_back(f.left());
    f = f.right();
  }
  return args;
}

namespace {

void push_unique(std::vector<Formula>& out, Formula f) {
  for (Formula g : out)
    if (g == f) return;
  out.push_back(f);
}

void targets_rec(Formula f, std::vector<Formula>& out) {
  switch (f.tag()) {
    case Conn::Var:
    case Conn::Falsum:
    case Conn::Disj: push_unique(out, f); break;
    case Conn::Impl: targets_rec(f.right(), out); break;
    case Conn::Conj:
      targets_rec(f.left(), out);
      targets_rec(f.right(), out);
      break;
  }
}

void trace_paths_rec(Formula alpha, Formula f, std::vector<TraceStep>& prefix,
                     std::vector<TracePath>& out) {
  if (f == alpha) {
    out.push_back(TracePath{prefix});
    return;
  }
  switch (f.tag()) {
    case Conn::Impl:
      prefix.push_back(TraceStep{TraceStep::Kind::Arg, f.left()});
      trace_paths_rec(alpha, f.right(), prefix, out);
      prefix.pop_back();
      break;
    case Conn::Conj:
      prefix.push_back(TraceStep{TraceStep::Kind::ProjLeft, Formula()});
      trace_paths_rec(alpha, f.left(), prefix, out);
      prefix.back() = TraceStep{TraceStep::Kind::ProjRight, Formula()};
      trace_paths_rec(alpha, f.right(), prefix, out);
      prefix.pop_back();
      break;
    default: break;  // atom or disjunction different from alpha: no trace
  }
}

}  // namespace

std::vector<Formula> targets(Formula f) {
  std::vector<Formula> out;
  targets_rec(f, out);
  return out;
}

std::vector<Formula> TracePath::trace_set() const {
  std::vector<Formula> set;
  for (const TraceStep& s : steps)
    if (s.kind == TraceStep::Kind::Arg) set.push_back(s.arg);
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

std::vector<TracePath> trace_paths(Formula alpha, Formula f) {
  std::vector<TracePath> out;
  std::vector<TraceStep> prefix;
  trace_paths_rec(alpha, f, prefix, out);
  return out;
}

std::vector<std::vector<Formula>> traces(Formula alpha, Formula f) {
  std::vector<std::vector<Formula>> out;
  for (const TracePath& p : trace_paths(alpha, f)) {
    std::vector<Formula> set = p.trace_set();
    if (std::find(out.begin(), out.end(), set) == out.end()) out.push_back(std::move(set));
  }
  return out;
}

Formula phi_k(int k) {
  if (k < 1) throw std::invalid_argument("phi_k requires k >= 1");
  Formula f = Formula::var("p1");
  for (int i = 2; i <= k; ++i) f = Formula::impl(f, Formula::var("p" + std::to_string(i)));
  return f;
}

// ---------------------------------------------------------------------------
// T-fragment classification
//
// Membership in T1-/T2-/T3- is decided under the best possible split of the
// atoms into data (argument-only) and control (target) variables. Control
// assignments are forced exactly by target positions, data assignments by
// the argument positions of innermost (T1-) parts; everything else defaults
// to data, which is legal in every remaining position.

namespace {

bool pure_variable_implicational(Formula f) {
  switch (f.tag()) {
    case Conn::Var: return true;
    case Conn::Impl: return pure_variable_implicational(f.left()) && pure_variable_implicational(f.right());
    default: return false;
  }
}

struct PartitionState {
  std::set<std::string> control;
  std::set<std::string> data;

  bool force_control(Formula atom) {
    control.insert(atom.var_name());
    return true;
  }
  bool force_data(Formula atom) {
    data.insert(atom.var_name());
    return true;
  }
  bool consistent() const {
    for (const auto& a : control)
      if (data.count(a)) return false;
    return true;
  }
};

// T1-: a1 -> ... -> ak -> q with ai data atoms and q control.
bool collect_t1(Formula f, PartitionState& st) {
  std::vector<Formula> args = implicational_arguments(f);
  Formula tgt = implicational_target(f);
  for (Formula a : args) {
    if (!a.is_var()) return false;
    st.force_data(a);
  }
  return st.force_control(tgt);
}

// T2-: data atoms and at most one T1- argument, control target. The budget
// check against forced control atoms happens in a second pass.
bool collect_t2(Formula f, PartitionState& st) {
  std::vector<Formula> args = implicational_arguments(f);
  Formula tgt = implicational_target(f);
  st.force_control(tgt);
  int nonatomic = 0;
  for (Formula a : args) {
    if (a.is_var()) continue;
    ++nonatomic;
    if (!collect_t1(a, st)) return false;
  }
  return nonatomic <= 1;
}

// Occurrences of non-atomic arguments plus control-atom arguments in one
// T2- formula must not exceed one (the single T1- slot).
bool check_t2_budget(Formula f, const PartitionState& st) {
  int used = 0;
  for (Formula a : implicational_arguments(f)) {
    if (!a.is_var() || st.control.count(a.var_name())) ++used;
  }
  return used <= 1;
}

bool infer_t1(Formula f, PartitionState& st) {
  return collect_t1(f, st) && st.consistent();
}

bool infer_t2(Formula f, PartitionState& st) {
  if (!collect_t2(f, st)) return false;
  if (!st.consistent()) return false;
  return check_t2_budget(f, st);
}

bool infer_t3(Formula f, PartitionState& st) {
  std::vector<Formula> args = implicational_arguments(f);
  Formula tgt = implicational_target(f);
  st.force_control(tgt);
  std::vector<Formula> t2_args;
  for (Formula a : args) {
    if (a.is_var()) continue;  // data atom or bare control atom, both legal
    if (!collect_t2(a, st)) return false;
    t2_args.push_back(a);
  }
  if (!st.consistent()) return false;
  for (Formula a : t2_args)
    if (!check_t2_budget(a, st)) return false;
  return true;
}

// A literal is an atom or a negated atom.
bool is_literal(Formula f) {
  if (f.is_atom()) return true;
  return f.is_impl() && f.left().is_atom() && f.right().is_falsum();
}

bool implicational_over_atoms(Formula f) {
  switch (f.tag()) {
    case Conn::Var:
    case Conn::Falsum: return true;
    case Conn::Impl: return implicational_over_atoms(f.left()) && implicational_over_atoms(f.right());
    default: return false;
  }
}

// Order two plus: arguments decompose into literals over literals; target
// an atom once fully unfolded.
bool order_two_plus(Formula f) {
  if (!implicational_over_atoms(f)) return false;
  for (Formula arg : implicational_arguments(f)) {
    if (is_literal(arg)) continue;
    for (Formula inner : implicational_arguments(arg))
      if (!is_literal(inner)) return false;
  }
  return true;
}

}  // namespace

FragmentClass classify(Formula f) {
  FragmentClass out;
  out.is_implicational = is_implicational(f);
  if (out.is_implicational) out.order = order(f);
  out.in_order_two_plus = order_two_plus(f);

  if (pure_variable_implicational(f)) {
    PartitionState st1, st2, st3;
    out.in_t1_minus = infer_t1(f, st1);
    out.in_t2_minus = infer_t2(f, st2);
    out.in_t3_minus = infer_t3(f, st3);
    const PartitionState* best =
        out.in_t1_minus ? &st1 : out.in_t2_minus ? &st2 : out.in_t3_minus ? &st3 : nullptr;
    if (best != nullptr) {
      for (const std::string& a : atom_names(f)) {
        if (best->control.count(a))
          out.control_atoms.push_back(a);
        else
          out.data_atoms.push_back(a);
      }
    }
  }
  return out;
}

}  // namespace ipc
