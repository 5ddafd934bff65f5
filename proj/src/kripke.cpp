#include "ipc/kripke.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <bit>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ipc {

KripkeModel::KripkeModel(std::size_t states) {
  if (states == 0 || states > kMaxStates)
    throw std::invalid_argument("state count out of range");
  up_.resize(states);
  for (std::size_t i = 0; i < states; ++i) up_[i] = static_cast<std::uint16_t>(1u << i);
}

void KripkeModel::add_leq(std::size_t i, std::size_t j) {
  up_[i] |= static_cast<std::uint16_t>(1u << j);
}

void KripkeModel::set_valuation(const std::string& atom, std::uint16_t states) {
  for (auto& [name, mask] : valuation_) {
    if (name == atom) {
      mask = states;
      return;
    }
  }
  valuation_.emplace_back(atom, states);
}

void KripkeModel::force(const std::string& atom, std::size_t state) {
  for (auto& [name, mask] : valuation_) {
    if (name == atom) {
      mask |= static_cast<std::uint16_t>(1u << state);
      return;
    }
  }
  valuation_.emplace_back(atom, static_cast<std::uint16_t>(1u << state));
}

bool KripkeModel::forces_atom(std::size_t state, std::string_view atom) const {
  for (const auto& [name, mask] : valuation_)
    if (name == atom) return (mask >> state) & 1u;
  return false;
}

std::vector<std::string> KripkeModel::defects() const {
  std::vector<std::string> out;
  std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    if (!leq(i, i)) out.push_back("order is not reflexive at c" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && leq(i, j) && leq(j, i))
        out.push_back("order is not antisymmetric on c" + std::to_string(i) + ", c" +
                      std::to_string(j));
      if (!leq(i, j)) continue;
      for (std::size_t k = 0; k < n; ++k)
        if (leq(j, k) && !leq(i, k))
          out.push_back("order is not transitive through c" + std::to_string(j));
    }
  for (const auto& [atom, mask] : valuation_)
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u && (mask & up_[i]) != up_[i])
        out.push_back("valuation of " + atom + " is not monotone above c" + std::to_string(i));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string KripkeModel::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < size(); ++i) os << "state c" << i << "\n";
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (i != j && leq(i, j)) os << "c" << i << " <= c" << j << "\n";
  for (const auto& [atom, mask] : valuation_)
    for (std::size_t i = 0; i < size(); ++i)
      if ((mask >> i) & 1u) os << "c" << i << " ||- " << atom << "\n";
  return os.str();
}

bool forces(const KripkeModel& m, std::size_t state, Formula f) {
  switch (f.tag()) {
    case Conn::Var: return m.forces_atom(state, f.var_name());
    case Conn::Falsum: return false;
    case Conn::Conj: return forces(m, state, f.left()) && forces(m, state, f.right());
    case Conn::Disj: return forces(m, state, f.left()) || forces(m, state, f.right());
    case Conn::Impl: {
      for (std::size_t c = 0; c < m.size(); ++c)
        if (m.leq(state, c) && forces(m, c, f.left()) && !forces(m, c, f.right())) return false;
      return true;
    }
  }
  return false;
}

bool forces_all(const KripkeModel& m, std::size_t state, const Context& ctx) {
  for (const auto& [name, f] : ctx.items())
    if (!forces(m, state, f)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive search over small models

namespace {

// Upward-closure masks of all labeled posets on n states, deduplicated up to
// isomorphism by keeping the lexicographically least relabeling.
using Poset = std::vector<std::uint16_t>;

std::vector<Poset> enumerate_posets(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> offdiag;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) offdiag.emplace_back(i, j);

  auto relation_key = [n](const Poset& up) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < n; ++i) key = (key << 16) | up[i];
    return key;
  };

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<Poset> out;
  std::uint64_t total = 1ull << offdiag.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    Poset up(n);
    for (std::size_t i = 0; i < n; ++i) up[i] = static_cast<std::uint16_t>(1u << i);
    for (std::size_t e = 0; e < offdiag.size(); ++e)
      if ((bits >> e) & 1ull) up[offdiag[e].first] |= static_cast<std::uint16_t>(1u << offdiag[e].second);
    // antisymmetry and transitivity
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (i != j && ((up[i] >> j) & 1u) && ((up[j] >> i) & 1u)) ok = false;
        if (((up[i] >> j) & 1u) && (up[i] | up[j]) != up[i]) ok = false;  // up[j] must be inside up[i]
      }
    if (!ok) continue;
    // canonical representative under relabeling
    std::uint64_t self = relation_key(up);
    bool least = true;
    std::sort(perm.begin(), perm.end());
    do {
      Poset relabeled(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint16_t mask = 0;
        for (std::size_t j = 0; j < n; ++j)
          if ((up[i] >> j) & 1u) mask |= static_cast<std::uint16_t>(1u << perm[j]);
        relabeled[perm[i]] = mask;
      }
      if (relation_key(relabeled) < self) {
        least = false;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (least) out.push_back(std::move(up));
  }
  std::sort(out.begin(), out.end(),
            [&](const Poset& a, const Poset& b) { return relation_key(a) < relation_key(b); });
  return out;
}

const std::vector<Poset>& posets_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<Poset>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, enumerate_posets(n)).first;
  return it->second;
}

std::vector<std::uint16_t> upsets_of(const Poset& up) {
  std::size_t n = up.size();
  std::vector<std::uint16_t> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if ((mask >> i) & 1u) ok = (mask & up[i]) == up[i];
    if (ok) out.push_back(static_cast<std::uint16_t>(mask));
  }
  return out;
}

std::vector<std::string> judgement_atoms(const Context& ctx, Formula goal) {
  std::vector<std::string> atoms;
  auto add = [&](Formula f) {
    for (const std::string& a : atom_names(f))
      if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
  };
  for (const auto& [name, f] : ctx.items()) add(f);
  add(goal);
  return atoms;
}

}  // namespace

std::optional<Countermodel> countermodel_search(const Context& ctx, Formula goal,
                                                std::size_t max_states) {
  if (max_states == 0) throw std::invalid_argument("max_states must be positive");
  std::vector<std::string> atoms = judgement_atoms(ctx, goal);

  for (std::size_t n = 1; n <= max_states; ++n) {
    for (const Poset& up : posets_for(n)) {
      std::vector<std::uint16_t> upsets = upsets_of(up);
      // odometer over one up-set per atom, last atom fastest
      std::vector<std::size_t> pick(atoms.size(), 0);
      bool exhausted = false;
      while (!exhausted) {
        KripkeModel m(n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            if ((up[i] >> j) & 1u) m.add_leq(i, j);
        for (std::size_t a = 0; a < atoms.size(); ++a)
          m.set_valuation(atoms[a], upsets[pick[a]]);
        for (std::size_t c = 0; c < n; ++c) {
          if (forces_all(m, c, ctx) && !forces(m, c, goal)) {
            if (!m.defects().empty())
              throw std::logic_error("countermodel search built an invalid model");
            return Countermodel{m, c};
          }
        }
        std::size_t a = atoms.size();
        while (true) {
          if (a == 0) {
            exhausted = true;
            break;
          }
          --a;
          if (++pick[a] < upsets.size()) break;
          pick[a] = 0;
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Depth-2 countermodels for the order-two-plus fragment
//
// A depth-2 model is a root plus a set of final states. The root valuation R
// and the set W of variables forced somewhere determine all root forcing;
// each variable in W \ R must be witnessed by a final state that classically
// satisfies every argument of the formula. Searching over (R, W) pairs is
// therefore exhaustive over all depth-2 models.

namespace {

struct TwoPlusShape {
  std::vector<Formula> args;      // the eta_i
  Formula target;                 // atom after full decomposition
  std::vector<std::string> vars;  // variable names, first-occurrence order
};

int var_index(const TwoPlusShape& s, const std::string& name) {
  for (std::size_t i = 0; i < s.vars.size(); ++i)
    if (s.vars[i] == name) return static_cast<int>(i);
  return -1;
}

// literal is var, falsum, neg var or neg falsum
bool literal_true_at_final(const TwoPlusShape& s, Formula lit, std::uint32_t c) {
  if (lit.is_var()) return (c >> var_index(s, lit.var_name())) & 1u;
  if (lit.is_falsum()) return false;
  Formula inner = lit.left();
  if (inner.is_falsum()) return true;
  return !((c >> var_index(s, inner.var_name())) & 1u);
}

bool literal_forced_at_root(const TwoPlusShape& s, Formula lit, std::uint32_t r,
                            std::uint32_t w) {
  if (lit.is_var()) return (r >> var_index(s, lit.var_name())) & 1u;
  if (lit.is_falsum()) return false;
  Formula inner = lit.left();
  if (inner.is_falsum()) return true;
  return !((w >> var_index(s, inner.var_name())) & 1u);
}

bool arg_true_at_final(const TwoPlusShape& s, Formula arg, std::uint32_t c) {
  for (Formula lit : implicational_arguments(arg))
    if (!literal_true_at_final(s, lit, c)) return true;
  Formula tgt = implicational_target(arg);
  if (tgt.is_falsum()) return false;
  return (c >> var_index(s, tgt.var_name())) & 1u;
}

bool arg_forced_at_root(const TwoPlusShape& s, Formula arg, std::uint32_t r, std::uint32_t w) {
  for (Formula lit : implicational_arguments(arg))
    if (!literal_forced_at_root(s, lit, r, w)) return true;
  Formula tgt = implicational_target(arg);
  if (tgt.is_falsum()) return false;
  return (r >> var_index(s, tgt.var_name())) & 1u;
}

}  // namespace

std::optional<Countermodel> countermodel_2plus(Formula f) {
  if (!classify(f).in_order_two_plus)
    throw std::invalid_argument("formula is outside the order-two-plus fragment: " +
                                print_formula(f));

  TwoPlusShape s{implicational_arguments(f), implicational_target(f), atom_names(f)};
  std::size_t v = s.vars.size();
  if (v > 16) throw std::invalid_argument("too many atoms for the depth-2 search");

  // candidate finals: classical valuations satisfying every argument
  std::vector<std::uint32_t> sat;
  for (std::uint32_t c = 0; c < (1u << v); ++c) {
    bool ok = true;
    for (Formula arg : s.args)
      if (!arg_true_at_final(s, arg, c)) {
        ok = false;
        break;
      }
    if (ok) sat.push_back(c);
  }

  // Scan (R, W) pairs by the size of W \ R (the number of finals a cover
  // could need), then by mask; the first coverable pair gives the model.
  struct Hit {
    std::uint32_t r, w;
    std::vector<std::uint32_t> finals;
  };
  std::optional<Hit> best;

  auto try_pair = [&](std::uint32_t r, std::uint32_t w) -> bool {
    // the root must not force the target
    if (s.target.is_var()) {
      int ti = var_index(s, s.target.var_name());
      if ((r >> ti) & 1u) return false;
    }
    // the root forces every argument
    for (const Formula& arg : s.args)
      if (!arg_forced_at_root(s, arg, r, w)) return false;
    // cover w \ r by finals c with r subset c subset w, c in sat
    std::uint32_t need = w & ~r;
    std::vector<std::uint32_t> usable;
    for (std::uint32_t c : sat)
      if ((c & r) == r && (c & ~w) == 0) usable.push_back(c);
    std::vector<int> needed_bits;
    for (std::size_t i = 0; i < v; ++i)
      if ((need >> i) & 1u) needed_bits.push_back(static_cast<int>(i));
    std::size_t nb = needed_bits.size();
    std::vector<std::uint32_t> compress(usable.size());
    for (std::size_t u = 0; u < usable.size(); ++u) {
      std::uint32_t m = 0;
      for (std::size_t b = 0; b < nb; ++b)
        if ((usable[u] >> needed_bits[b]) & 1u) m |= 1u << b;
      compress[u] = m;
    }
    // exact minimum cover by bitmask DP over the needed variables
    std::uint32_t full = nb == 0 ? 0 : (1u << nb) - 1;
    std::vector<int> dp(full + 1, -1);
    std::vector<std::pair<std::uint32_t, std::size_t>> back(full + 1);
    dp[0] = 0;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (dp[mask] < 0) continue;
      for (std::size_t u = 0; u < usable.size(); ++u) {
        std::uint32_t next = mask | compress[u];
        if (dp[next] < 0 || dp[next] > dp[mask] + 1) {
          dp[next] = dp[mask] + 1;
          back[next] = {mask, u};
        }
      }
    }
    if (dp[full] < 0) return false;
    std::vector<std::uint32_t> finals;
    std::uint32_t cur = full;
    while (cur != 0) {
      finals.push_back(usable[back[cur].second]);
      cur = back[cur].first;
    }
    std::sort(finals.begin(), finals.end());
    finals.erase(std::unique(finals.begin(), finals.end()), finals.end());
    best = Hit{r, w, std::move(finals)};
    return true;
  };

  for (std::size_t need = 0; need <= v && !best; ++need) {
    for (std::uint32_t w = 0; w < (1u << v) && !best; ++w) {
      if (static_cast<std::size_t>(std::popcount(w)) < need) continue;
      // d runs over the subsets of w of the wanted size; r = w without d
      std::uint32_t d = w;
      while (true) {
        if (static_cast<std::size_t>(std::popcount(d)) == need && try_pair(w & ~d, w)) break;
        if (d == 0) break;
        d = (d - 1) & w;
      }
    }
  }

  if (!best) return std::nullopt;


  std::size_t states = 1 + best->finals.size();
  KripkeModel m(states);
  for (std::size_t i = 1; i < states; ++i) m.add_leq(0, i);
  for (std::size_t a = 0; a < v; ++a) {
    std::uint16_t mask = 0;
    if ((best->r >> a) & 1u) mask = static_cast<std::uint16_t>((1u << states) - 1);
    for (std::size_t i = 0; i < best->finals.size(); ++i)
      if ((best->finals[i] >> a) & 1u) mask |= static_cast<std::uint16_t>(1u << (i + 1));
    if (mask) m.set_valuation(s.vars[a], mask);
  }
  if (!m.defects().empty() || forces(m, 0, f))
    throw std::logic_error("depth-2 search built a model that does not refute the formula");
  return Countermodel{m, 0};
}

}  // namespace ipc
