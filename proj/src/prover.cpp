#include "ipc/prover.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace ipc {

namespace {

constexpr std::size_t kNoDep = static_cast<std::size_t>(-1);

// A judgement key: the goal plus the context as a bitset over the subformula
// universe of the initial judgement.
struct Bits {
  std::vector<std::uint64_t> words;
  bool operator==(const Bits& o) const { return words == o.words; }
  void set(std::size_t i) { words[i >> 6] |= 1ull << (i & 63); }
  bool test(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1ull; }
};

struct Key {
  std::uint32_t goal;
  Bits ctx;
  bool operator==(const Key& o) const { return goal == o.goal && ctx == o.ctx; }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = k.goal;
    for (std::uint64_t w : k.ctx.words) h = h * 1099511628211ull + w;
    return h;
  }
};

// Outcome of exploring one judgement: a witness, or a failure together with
// the shallowest path depth the failure depended on (kNoDep when the failure
// is absolute and safe to cache).
struct Outcome {
  std::optional<Term> witness;
  std::size_t min_dep = kNoDep;
};

class Searcher {
public:
  Searcher(const Context& ctx, Formula goal) {
    for (const auto& [name, f] : ctx.items()) used_names_.insert(name);
    index_of_goal_ = add_universe(goal);
    for (const auto& [name, f] : ctx.items()) {
      std::size_t i = add_universe(f);
      if (!names_[i]) names_[i] = name;
    }
    bits_.words.assign((universe_.size() + 63) / 64, 0);
    for (const auto& [name, f] : ctx.items()) {
      std::size_t i = index_.at(f.id());
      if (!bits_.test(i)) {
        bits_.set(i);
        order_.push_back(i);
      }
    }
  }

  ProofSearchResult run() {
    Outcome out = search(index_of_goal_, 0);
    ProofSearchResult res;
    res.witness = std::move(out.witness);
    res.stats = stats_;
    return res;
  }

private:
  std::size_t add_universe(Formula f) {
    auto it = index_.find(f.id());
    if (it != index_.end()) return it->second;
    for (Formula sub : subformulas(f)) {
      if (index_.count(sub.id())) continue;
      index_.emplace(sub.id(), universe_.size());
      universe_.push_back(sub);
      names_.push_back(std::nullopt);
    }
    return index_.at(f.id());
  }

  // The hypothesis name used for a context formula; allocated once, stable
  // across the whole search.
  const std::string& name_for(std::size_t idx) {
    if (!names_[idx]) names_[idx] = fresh_name("h" + std::to_string(idx));
    return *names_[idx];
  }

  std::string fresh_name(std::string base) {
    while (used_names_.count(base)) base += '\'';
    used_names_.insert(base);
    return base;
  }

  // Context extension for one recursive call; restores on destruction.
  class Extend {
   public:
    Extend(Searcher& s, std::size_t idx) : s_(s), idx_(idx), added_(!s.bits_.test(idx)) {
      if (added_) {
        s_.bits_.set(idx);
        s_.order_.push_back(idx);
      }
    }
    ~Extend() {
      if (added_) {
        s_.bits_.words[idx_ >> 6] &= ~(1ull << (idx_ & 63));
        s_.order_.pop_back();
      }
    }
    bool added() const { return added_; }

   private:
    Searcher& s_;
    std::size_t idx_;
    bool added_;
  };

  // Binder for an extension: the canonical name when the hypothesis is new,
  // a throwaway fresh name when it shadows an existing one.
  std::string binder_name(const Extend& e, std::size_t idx) {
    if (e.added()) return name_for(idx);
    return fresh_name("u" + std::to_string(idx));
  }

  Outcome search(std::size_t goal_idx, std::size_t depth) {
    ++stats_.visited;
    stats_.max_depth = std::max(stats_.max_depth, depth);

    Key key{static_cast<std::uint32_t>(goal_idx), bits_};
    if (auto it = memo_.find(key); it != memo_.end())
      return it->second ? Outcome{*it->second, kNoDep} : Outcome{std::nullopt, kNoDep};
    if (auto it = path_.find(key); it != path_.end())
      return Outcome{std::nullopt, it->second};

    path_.emplace(key, depth);
    Outcome out = alternatives(universe_[goal_idx], depth);
    path_.erase(key);

    if (out.witness) {
      memo_.emplace(std::move(key), out.witness);
    } else if (out.min_dep >= depth) {
      // failure independent of anything above this judgement
      memo_.emplace(std::move(key), std::optional<Term>());
      out.min_dep = kNoDep;
    }
    return out;
  }

  Outcome sub(Formula f, std::size_t depth) { return search(index_.at(f.id()), depth + 1); }

  Outcome alternatives(Formula goal, std::size_t depth) {
    std::size_t min_dep = kNoDep;

    // conjunction goal: prove both sides
    if (goal.is_conj()) {
      Outcome l = sub(goal.left(), depth);
      if (!l.witness) return l;
      Outcome r = sub(goal.right(), depth);
      if (!r.witness) return r;
      return Outcome{Term::pair(*l.witness, *r.witness), kNoDep};
    }

    // implication goal: extend the context
    if (goal.is_impl()) {
      std::size_t arg = index_.at(goal.left().id());
      Extend e(*this, arg);
      std::string binder = binder_name(e, arg);
      Outcome body = sub(goal.right(), depth);
      if (!body.witness) return body;
      return Outcome{Term::abs(binder, goal.left(), *body.witness), kNoDep};
    }

    // atom or disjunction goal; introductions first for disjunctions
    if (goal.is_disj()) {
      Outcome l = sub(goal.left(), depth);
      if (l.witness) return Outcome{Term::inj1(*l.witness, goal), kNoDep};
      min_dep = std::min(min_dep, l.min_dep);
      Outcome r = sub(goal.right(), depth);
      if (r.witness) return Outcome{Term::inj2(*r.witness, goal), kNoDep};
      min_dep = std::min(min_dep, r.min_dep);
    }

    // eliminations: pick a hypothesis, a target in it, and a trace
    std::vector<std::size_t> hyps = order_;  // snapshot: branches extend order_
    for (std::size_t h : hyps) {
      Formula psi = universe_[h];
      for (Formula alpha : targets(psi)) {
        if (alpha.is_var() && alpha != goal) continue;
        for (const TracePath& path : trace_paths(alpha, psi)) {
          Outcome attempt = eliminate(h, alpha, path, goal, depth);
          if (attempt.witness) return attempt;
          min_dep = std::min(min_dep, attempt.min_dep);
        }
      }
    }
    return Outcome{std::nullopt, min_dep};
  }

  // One elimination attempt: prove the trace subgoals, assemble the spine,
  // then close by identity, ex falso, or disjunction elimination.
  Outcome eliminate(std::size_t hyp, Formula alpha, const TracePath& path, Formula goal,
                    std::size_t depth) {
    Term spine = Term::var(name_for(hyp));
    std::size_t min_dep = kNoDep;
    for (const TraceStep& step : path.steps) {
      switch (step.kind) {
        case TraceStep::Kind::Arg: {
          Outcome arg = sub(step.arg, depth);
          if (!arg.witness) return arg;
          spine = Term::app(spine, *arg.witness);
          break;
        }
        case TraceStep::Kind::ProjLeft: spine = Term::proj1(spine); break;
        case TraceStep::Kind::ProjRight: spine = Term::proj2(spine); break;
      }
    }

    if (alpha.is_var()) return Outcome{spine, kNoDep};  // alpha == goal checked by caller
    if (alpha.is_falsum()) {
      if (goal.is_falsum()) return Outcome{spine, kNoDep};
      return Outcome{Term::absurd(spine, goal), kNoDep};
    }

    // alpha = beta \/ gamma: eliminate and continue for the goal
    std::size_t bi = index_.at(alpha.left().id());
    std::optional<Term> left_branch;
    std::string left_name;
    {
      Extend e(*this, bi);
      left_name = binder_name(e, bi);
      Outcome b = search(index_.at(goal.id()), depth + 1);
      if (!b.witness) return b;
      left_branch = std::move(b.witness);
    }
    std::size_t gi = index_.at(alpha.right().id());
    {
      Extend e(*this, gi);
      std::string right_name = binder_name(e, gi);
      Outcome c = search(index_.at(goal.id()), depth + 1);
      if (!c.witness) return Outcome{std::nullopt, std::min(min_dep, c.min_dep)};
      return Outcome{Term::case_of(spine, left_name, alpha.left(), *left_branch, right_name,
                                   alpha.right(), *c.witness),
                     kNoDep};
    }
  }

  std::vector<Formula> universe_;
  std::unordered_map<std::uint32_t, std::size_t> index_;  // formula id -> universe index
  std::vector<std::optional<std::string>> names_;
  std::set<std::string> used_names_;
  Bits bits_;
  std::vector<std::size_t> order_;  // context in insertion order
  std::size_t index_of_goal_ = 0;
  std::unordered_map<Key, std::optional<Term>, KeyHash> memo_;
  std::unordered_map<Key, std::size_t, KeyHash> path_;
  SearchStats stats_;
};

void require_implicational(const Context& ctx, Formula goal) {
  if (!is_implicational(goal))
    throw std::invalid_argument("goal is not implicational: " + print_formula(goal));
  for (const auto& [name, f] : ctx.items())
    if (!is_implicational(f))
      throw std::invalid_argument("hypothesis " + name + " is not implicational: " +
                                  print_formula(f));
}

}  // namespace

ProofSearchResult prove(const Context& ctx, Formula goal) {
  Searcher s(ctx, goal);
  return s.run();
}

ProofSearchResult prove_iipc(const Context& ctx, Formula goal) {
  require_implicational(ctx, goal);
  return prove(ctx, goal);
}

// ---------------------------------------------------------------------------
// Inhabitant enumeration

namespace {

using Env = std::vector<std::pair<std::string, Formula>>;

void enum_terms(const Env& env, Formula goal, std::size_t budget, std::vector<Term>& out);

// All ways to fill the argument list args[idx..] within the budget,
// appending each completed spine to out.
void enum_spine(const Env& env, Term spine, const std::vector<Formula>& args, std::size_t idx,
                std::size_t budget, std::vector<Term>& out) {
  if (idx == args.size()) {
    out.push_back(spine);
    return;
  }
  std::size_t reserve = args.size() - idx - 1;  // one node minimum per later argument
  if (budget < 1 + reserve) return;
  std::vector<Term> heads;
  enum_terms(env, args[idx], budget - reserve, heads);
  for (const Term& h : heads)
    enum_spine(env, Term::app(spine, h), args, idx + 1, budget - term_size(h), out);
}

void enum_terms(const Env& env, Formula goal, std::size_t budget, std::vector<Term>& out) {
  if (budget == 0) return;
  if (goal.is_impl()) {
    std::string binder = "x" + std::to_string(env.size());
    Env ext = env;
    ext.emplace_back(binder, goal.left());
    std::vector<Term> bodies;
    enum_terms(ext, goal.right(), budget - 1, bodies);
    for (const Term& b : bodies) out.push_back(Term::abs(binder, goal.left(), b));
    return;
  }
  // atom goal: head variable whose target matches, arguments recursively
  for (const auto& [name, hyp] : env) {
    if (implicational_target(hyp) != goal) continue;
    std::vector<Formula> args = implicational_arguments(hyp);
    if (budget < 1 + args.size()) continue;
    enum_spine(env, Term::var(name), args, 0, budget - 1, out);
  }
}

}  // namespace

std::vector<Term> enumerate_normal_inhabitants(Formula goal, std::size_t max_term_size) {
  if (!is_implicational(goal))
    throw std::invalid_argument("enumeration is implicational-only: " + print_formula(goal));
  std::vector<Term> out;
  enum_terms({}, goal, max_term_size, out);
  return out;
}

}  // namespace ipc
