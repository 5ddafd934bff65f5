#include "ipc/automaton.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ipc {

Instruction Instruction::check_set(std::string at, std::vector<std::string> check,
                                   std::vector<std::string> set, std::string go) {
  Instruction i;
  i.kind = Kind::CheckSet;
  i.at = std::move(at);
  i.check = std::move(check);
  i.set = std::move(set);
  i.go = std::move(go);
  return i;
}

Instruction Instruction::split(std::string at, std::string left, std::string right) {
  Instruction i;
  i.kind = Kind::Split;
  i.at = std::move(at);
  i.left = std::move(left);
  i.right = std::move(right);
  return i;
}

bool RegisterSet::subset_of(const RegisterSet& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~o.words_[i]) return false;
  return true;
}

RegisterSet RegisterSet::union_with(const RegisterSet& o) const {
  RegisterSet r = *this;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] |= o.words_[i];
  return r;
}

RegisterSet RegisterSet::intersect(const RegisterSet& o) const {
  RegisterSet r = *this;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= o.words_[i];
  return r;
}

std::size_t RegisterSet::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

void MonotonicAutomaton::add_state(const std::string& name) {
  if (state_map_.emplace(name, states_.size()).second) states_.push_back(name);
}

void MonotonicAutomaton::add_register(const std::string& name) {
  if (register_map_.emplace(name, registers_.size()).second) registers_.push_back(name);
}

std::optional<std::size_t> MonotonicAutomaton::state_index(std::string_view name) const {
  auto it = state_map_.find(std::string(name));
  if (it == state_map_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> MonotonicAutomaton::register_index(std::string_view name) const {
  auto it = register_map_.find(std::string(name));
  if (it == register_map_.end()) return std::nullopt;
  return it->second;
}

Configuration MonotonicAutomaton::config(const std::string& state,
                                         const std::vector<std::string>& store) const {
  auto si = state_index(state);
  if (!si) throw std::invalid_argument("unknown state " + state);
  Configuration c;
  c.state = static_cast<std::uint32_t>(*si);
  c.store = RegisterSet(registers_.size());
  for (const std::string& r : store) {
    auto ri = register_index(r);
    if (!ri) throw std::invalid_argument("unknown register " + r);
    c.store.set(*ri);
  }
  return c;
}

std::string MonotonicAutomaton::describe(const Configuration& c) const {
  std::ostringstream os;
  os << states_.at(c.state) << " {";
  bool first = true;
  for (std::size_t i = 0; i < registers_.size(); ++i)
    if (c.store.test(i)) {
      if (!first) os << ", ";
      os << registers_[i];
      first = false;
    }
  os << "}";
  return os.str();
}

std::vector<std::string> validate(const MonotonicAutomaton& a) {
  std::vector<std::string> out;
  if (!a.state_index(a.final_state()))
    out.push_back("final state " + (a.final_state().empty() ? "(unset)" : a.final_state()) +
                  " is not declared");
  for (const std::string& s : a.states())
    if (a.register_index(s)) out.push_back("identifier " + s + " is both a state and a register");
  for (std::size_t i = 0; i < a.instructions().size(); ++i) {
    const Instruction& ins = a.instructions()[i];
    auto want_state = [&](const std::string& n) {
      if (!a.state_index(n))
        out.push_back("instruction " + std::to_string(i) + " names unknown state " + n);
    };
    auto want_register = [&](const std::string& n) {
      if (!a.register_index(n))
        out.push_back("instruction " + std::to_string(i) + " names unknown register " + n);
    };
    want_state(ins.at);
    if (ins.kind == Instruction::Kind::CheckSet) {
      for (const auto& r : ins.check) want_register(r);
      for (const auto& r : ins.set) want_register(r);
      want_state(ins.go);
    } else {
      want_state(ins.left);
      want_state(ins.right);
    }
  }
  return out;
}

bool is_nondeterministic(const MonotonicAutomaton& a) {
  for (const Instruction& i : a.instructions())
    if (i.kind == Instruction::Kind::Split) return false;
  return true;
}

namespace {

RegisterSet register_set(const MonotonicAutomaton& a, const std::vector<std::string>& names) {
  RegisterSet s(a.registers().size());
  for (const std::string& n : names) {
    auto i = a.register_index(n);
    if (!i) throw std::invalid_argument("unknown register " + n);
    s.set(*i);
  }
  return s;
}

}  // namespace

std::vector<Configuration> step(const MonotonicAutomaton& a, const Configuration& c,
                                const Instruction& i) {
  auto at = a.state_index(i.at);
  if (!at) throw std::invalid_argument("unknown state " + i.at);
  if (c.state != *at) return {};
  if (i.kind == Instruction::Kind::CheckSet) {
    RegisterSet check = register_set(a, i.check);
    if (!check.subset_of(c.store)) return {};
    auto go = a.state_index(i.go);
    if (!go) throw std::invalid_argument("unknown state " + i.go);
    Configuration next;
    next.state = static_cast<std::uint32_t>(*go);
    next.store = c.store.union_with(register_set(a, i.set));
    return {next};
  }
  auto l = a.state_index(i.left);
  auto r = a.state_index(i.right);
  if (!l || !r) throw std::invalid_argument("unknown split target");
  Configuration cl = c, cr = c;
  cl.state = static_cast<std::uint32_t>(*l);
  cr.state = static_cast<std::uint32_t>(*r);
  return {cl, cr};
}

// ---------------------------------------------------------------------------
// Acceptance
//
// Depth-first search over configurations with on-path cycle pruning.
// Successes are cached globally, failures only when their refutation did not
// depend on the path above them. Memo keys project the store onto the
// registers checkable from the current state onward, which lets runs that
// differ only in dead registers share work.

namespace {

constexpr std::size_t kNoDep = static_cast<std::size_t>(-1);

struct CompiledInstruction {
  Instruction::Kind kind;
  RegisterSet check, set;
  std::uint32_t go = 0, left = 0, right = 0;
};

struct Skeleton {
  std::optional<std::size_t> instruction;
  std::vector<std::shared_ptr<const Skeleton>> children;
};

struct PKey {
  std::uint32_t state;
  RegisterSet proj;
  bool operator==(const PKey& o) const { return state == o.state && proj == o.proj; }
};

struct PKeyHash {
  std::size_t operator()(const PKey& k) const {
    std::size_t h = k.state;
    for (std::uint64_t w : k.proj.words()) h = h * 1099511628211ull + w;
    return h;
  }
};

class Acceptor {
public:
  Acceptor(const MonotonicAutomaton& a) : a_(a) {
    auto defects = validate(a);
    if (!defects.empty()) throw std::invalid_argument("invalid automaton: " + defects.front());
    nstates_ = a.states().size();
    final_ = static_cast<std::uint32_t>(*a.state_index(a.final_state()));
    by_state_.resize(nstates_);
    for (std::size_t i = 0; i < a.instructions().size(); ++i) {
      const Instruction& ins = a.instructions()[i];
      CompiledInstruction ci;
      ci.kind = ins.kind;
      if (ins.kind == Instruction::Kind::CheckSet) {
        ci.check = register_set(a, ins.check);
        ci.set = register_set(a, ins.set);
        ci.go = static_cast<std::uint32_t>(*a.state_index(ins.go));
      } else {
        ci.left = static_cast<std::uint32_t>(*a.state_index(ins.left));
        ci.right = static_cast<std::uint32_t>(*a.state_index(ins.right));
      }
      std::size_t at = *a.state_index(ins.at);
      compiled_.push_back(std::move(ci));
      by_state_[at].push_back(i);
    }
    compute_relevance();
  }

  AcceptanceResult run(const Configuration& c) {
    if (c.store.words().size() != (a_.registers().size() + 63) / 64)
      throw std::invalid_argument("configuration store has the wrong width");
    if (c.state >= nstates_) throw std::invalid_argument("configuration state out of range");
    auto [skel, dep] = search(c, 0);
    AcceptanceResult res;
    res.stats = stats_;
    res.accepting = skel != nullptr;
    if (skel) res.witness = materialize(c, *skel);
    return res;
  }

private:
  // Relevant registers per state: everything checkable from here onward.
  // Computed over strongly connected components in reverse topological
  // order (Tarjan pops each component after all components it reaches).
  void compute_relevance() {
    rel_.assign(nstates_, RegisterSet(a_.registers().size()));
    std::vector<int> comp(nstates_, -1), low(nstates_, 0), num(nstates_, -1);
    std::vector<std::uint32_t> stack, scc_stack;
    std::vector<bool> on_stack(nstates_, false);
    int counter = 0, ncomp = 0;
    std::vector<RegisterSet> comp_rel;

    auto successors = [&](std::uint32_t q) {
      std::vector<std::uint32_t> out;
      for (std::size_t i : by_state_[q]) {
        const CompiledInstruction& ci = compiled_[i];
        if (ci.kind == Instruction::Kind::CheckSet)
          out.push_back(ci.go);
        else {
          out.push_back(ci.left);
          out.push_back(ci.right);
        }
      }
      return out;
    };

    // iterative Tarjan
    struct Frame {
      std::uint32_t v;
      std::size_t next = 0;
      std::vector<std::uint32_t> succ;
    };
    for (std::uint32_t root = 0; root < nstates_; ++root) {
      if (num[root] >= 0) continue;
      std::vector<Frame> frames;
      frames.push_back({root, 0, successors(root)});
      num[root] = low[root] = counter++;
      scc_stack.push_back(root);
      on_stack[root] = true;
      while (!frames.empty()) {
        Frame& f = frames.back();
        if (f.next < f.succ.size()) {
          std::uint32_t w = f.succ[f.next++];
          if (num[w] < 0) {
            num[w] = low[w] = counter++;
            scc_stack.push_back(w);
            on_stack[w] = true;
            frames.push_back({w, 0, successors(w)});
          } else if (on_stack[w]) {
            low[f.v] = std::min(low[f.v], num[w]);
          }
        } else {
          std::uint32_t v = f.v;
          frames.pop_back();
          if (!frames.empty())
            low[frames.back().v] = std::min(low[frames.back().v], low[v]);
          if (low[v] == num[v]) {
            // pop one component; everything it reaches is already finished
            RegisterSet rel(a_.registers().size());
            std::vector<std::uint32_t> members;
            while (true) {
              std::uint32_t w = scc_stack.back();
              scc_stack.pop_back();
              on_stack[w] = false;
              comp[w] = ncomp;
              members.push_back(w);
              if (w == v) break;
            }
            for (std::uint32_t m : members) {
              for (std::size_t i : by_state_[m]) {
                const CompiledInstruction& ci = compiled_[i];
                if (ci.kind == Instruction::Kind::CheckSet) {
                  rel = rel.union_with(ci.check);
                  if (comp[ci.go] >= 0 && comp[ci.go] != ncomp)
                    rel = rel.union_with(comp_rel[comp[ci.go]]);
                } else {
                  for (std::uint32_t t : {ci.left, ci.right})
                    if (comp[t] >= 0 && comp[t] != ncomp) rel = rel.union_with(comp_rel[comp[t]]);
                }
              }
            }
            comp_rel.push_back(rel);
            for (std::uint32_t m : members) rel_[m] = rel;
            ++ncomp;
          }
        }
      }
    }
  }

  std::pair<std::shared_ptr<const Skeleton>, std::size_t> search(const Configuration& c,
                                                                 std::size_t depth) {
    ++stats_.visited;
    stats_.max_depth = std::max(stats_.max_depth, depth);
    if (c.state == final_)
      return {std::make_shared<Skeleton>(Skeleton{std::nullopt, {}}), kNoDep};

    PKey key{c.state, c.store.intersect(rel_[c.state])};
    if (auto it = memo_.find(key); it != memo_.end()) return {it->second, kNoDep};
    if (auto it = path_.find(key); it != path_.end()) return {nullptr, it->second};

    path_.emplace(key, depth);
    std::size_t min_dep = kNoDep;
    std::shared_ptr<const Skeleton> found;
    for (std::size_t i : by_state_[c.state]) {
      const CompiledInstruction& ci = compiled_[i];
      if (ci.kind == Instruction::Kind::CheckSet) {
        if (!ci.check.subset_of(c.store)) continue;
        Configuration next{ci.go, c.store.union_with(ci.set)};
        auto [skel, dep] = search(next, depth + 1);
        if (skel) {
          found = std::make_shared<Skeleton>(Skeleton{i, {skel}});
          break;
        }
        min_dep = std::min(min_dep, dep);
      } else {
        Configuration l{ci.left, c.store}, r{ci.right, c.store};
        auto [ls, ldep] = search(l, depth + 1);
        if (!ls) {
          min_dep = std::min(min_dep, ldep);
          continue;
        }
        auto [rs, rdep] = search(r, depth + 1);
        if (!rs) {
          min_dep = std::min(min_dep, rdep);
          continue;
        }
        found = std::make_shared<Skeleton>(Skeleton{i, {ls, rs}});
        break;
      }
    }
    path_.erase(key);

    if (found) {
      memo_.emplace(std::move(key), found);
      return {found, kNoDep};
    }
    if (min_dep >= depth) {
      memo_.emplace(std::move(key), nullptr);
      return {nullptr, kNoDep};
    }
    return {nullptr, min_dep};
  }

  WitnessTree materialize(const Configuration& c, const Skeleton& s) {
    WitnessTree node;
    node.config = c;
    node.instruction = s.instruction;
    if (s.instruction) {
      const CompiledInstruction& ci = compiled_[*s.instruction];
      if (ci.kind == Instruction::Kind::CheckSet) {
        Configuration next{ci.go, c.store.union_with(ci.set)};
        node.children.push_back(materialize(next, *s.children[0]));
      } else {
        node.children.push_back(materialize(Configuration{ci.left, c.store}, *s.children[0]));
        node.children.push_back(materialize(Configuration{ci.right, c.store}, *s.children[1]));
      }
    }
    return node;
  }

  const MonotonicAutomaton& a_;
  std::size_t nstates_ = 0;
  std::uint32_t final_ = 0;
  std::vector<CompiledInstruction> compiled_;
  std::vector<std::vector<std::size_t>> by_state_;
  std::vector<RegisterSet> rel_;
  std::unordered_map<PKey, std::shared_ptr<const Skeleton>, PKeyHash> memo_;
  std::unordered_map<PKey, std::size_t, PKeyHash> path_;
  SearchStats stats_;
};

}  // namespace

AcceptanceResult accepts(const MonotonicAutomaton& a, const Configuration& c) {
  Acceptor acc(a);
  AcceptanceResult res = acc.run(c);
  if (res.witness && !witness_consistent(a, *res.witness))
    throw std::logic_error("acceptance produced an inconsistent witness tree");
  return res;
}

bool witness_consistent(const MonotonicAutomaton& a, const WitnessTree& w) {
  if (!w.instruction) {
    auto fi = a.state_index(a.final_state());
    return fi && w.config.state == *fi && w.children.empty();
  }
  if (*w.instruction >= a.instructions().size()) return false;
  std::vector<Configuration> next = step(a, w.config, a.instructions()[*w.instruction]);
  if (next.size() != w.children.size() || next.empty()) return false;
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (!(w.children[i].config == next[i])) return false;
    if (!witness_consistent(a, w.children[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// “{a, b}” -> token list; returns the rest of the line after the braces
std::vector<std::string> parse_brace_set(std::string_view& line, std::size_t lineno) {
  std::size_t open = line.find('{');
  std::size_t close = line.find('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open)
    throw std::runtime_error("line " + std::to_string(lineno) + ": expected {...} register set");
  std::vector<std::string> items = split_tokens(line.substr(open + 1, close - open - 1));
  line.remove_prefix(close + 1);
  return items;
}

}  // namespace

ParsedAutomaton parse_automaton(std::string_view text) {
  ParsedAutomaton out;
  std::optional<std::pair<std::string, std::vector<std::string>>> init;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos
                                                                           : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++lineno;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front())))
      line.remove_prefix(1);
    if (line.empty()) continue;

    auto starts = [&](std::string_view kw) {
      if (line.substr(0, kw.size()) != kw) return false;
      line.remove_prefix(kw.size());
      return true;
    };

    if (starts("states:")) {
      for (const std::string& s : split_tokens(line)) out.automaton.add_state(s);
    } else if (starts("registers:")) {
      for (const std::string& r : split_tokens(line)) out.automaton.add_register(r);
    } else if (starts("final:")) {
      auto toks = split_tokens(line);
      if (toks.size() != 1)
        throw std::runtime_error("line " + std::to_string(lineno) + ": final: wants one state");
      out.automaton.set_final(toks[0]);
    } else if (starts("init:")) {
      std::size_t brace = line.find('{');
      if (brace == std::string_view::npos)
        throw std::runtime_error("line " + std::to_string(lineno) + ": init: wants q {regs}");
      auto state_toks = split_tokens(line.substr(0, brace));
      if (state_toks.size() != 1)
        throw std::runtime_error("line " + std::to_string(lineno) + ": init: wants one state");
      std::string_view rest = line.substr(brace);
      std::vector<std::string> regs = parse_brace_set(rest, lineno);
      init = {state_toks[0], regs};
    } else {
      // instruction line: q: check {..} set {..} goto p   |   q: split p1 p2
      std::size_t colon = line.find(':');
      if (colon == std::string_view::npos)
        throw std::runtime_error("line " + std::to_string(lineno) + ": expected an instruction");
      std::string at(line.substr(0, colon));
      while (!at.empty() && std::isspace(static_cast<unsigned char>(at.back()))) at.pop_back();
      std::string_view rest = line.substr(colon + 1);
      auto toks = split_tokens(rest.substr(0, rest.find('{')));
      if (!toks.empty() && toks[0] == "split") {
        auto all = split_tokens(rest);
        if (all.size() != 3)
          throw std::runtime_error("line " + std::to_string(lineno) + ": split wants two states");
        out.automaton.add_instruction(Instruction::split(at, all[1], all[2]));
      } else if (!toks.empty() && toks[0] == "check") {
        std::size_t check_kw = rest.find("check");
        std::string_view after_check = rest.substr(check_kw + 5);
        std::vector<std::string> check = parse_brace_set(after_check, lineno);
        std::size_t set_kw = after_check.find("set");
        if (set_kw == std::string_view::npos)
          throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'set {...}'");
        std::string_view after_set = after_check.substr(set_kw + 3);
        std::vector<std::string> set = parse_brace_set(after_set, lineno);
        auto tail = split_tokens(after_set);
        if (tail.size() != 2 || tail[0] != "goto")
          throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'goto q'");
        out.automaton.add_instruction(Instruction::check_set(at, check, set, tail[1]));
      } else {
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": expected 'check' or 'split'");
      }
    }
  }
  if (init) {
    out.initial = out.automaton.config(init->first, init->second);
  }
  return out;
}

namespace {
void print_set(std::ostringstream& os, const std::vector<std::string>& regs) {
  os << '{';
  for (std::size_t i = 0; i < regs.size(); ++i) {
    if (i) os << ", ";
    os << regs[i];
  }
  os << '}';
}
}  // namespace

std::string print_automaton(const MonotonicAutomaton& a,
                            const std::optional<Configuration>& initial) {
  std::ostringstream os;
  os << "states:";
  for (const auto& s : a.states()) os << ' ' << s;
  os << "\nregisters:";
  for (const auto& r : a.registers()) os << ' ' << r;
  os << "\nfinal: " << a.final_state() << "\n";
  if (initial) {
    os << "init: " << a.states().at(initial->state) << " {";
    bool first = true;
    for (std::size_t i = 0; i < a.registers().size(); ++i)
      if (initial->store.test(i)) {
        if (!first) os << ", ";
        os << a.registers()[i];
        first = false;
      }
    os << "}\n";
  }
  for (const Instruction& ins : a.instructions()) {
    os << ins.at << ": ";
    if (ins.kind == Instruction::Kind::Split) {
      os << "split " << ins.left << ' ' << ins.right;
    } else {
      os << "check ";
      print_set(os, ins.check);
      os << " set ";
      print_set(os, ins.set);
      os << " goto " << ins.go;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace ipc
