// Kripke semantics: finite models, the forcing relation, exhaustive
// small-countermodel search, and the constructive depth-2 countermodel for
// the order-two-plus fragment.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ipc/formula.hpp"

namespace ipc {

// A finite partial order of states with a monotone atomic valuation.
// States are 0..size-1; relations and valuations are 16-bit state masks.
class KripkeModel {
public:
  static constexpr std::size_t kMaxStates = 16;

  explicit KripkeModel(std::size_t states);

  std::size_t size() const { return up_.size(); }
  // declare i <= j (reflexivity is implicit; callers keep transitivity)
  void add_leq(std::size_t i, std::size_t j);
  bool leq(std::size_t i, std::size_t j) const { return (up_[i] >> j) & 1u; }
  std::uint16_t upward(std::size_t i) const { return up_[i]; }

  void set_valuation(const std::string& atom, std::uint16_t states);
  void force(const std::string& atom, std::size_t state);
  bool forces_atom(std::size_t state, std::string_view atom) const;
  const std::vector<std::pair<std::string, std::uint16_t>>& valuation() const {
    return valuation_;
  }

  // Empty iff the order is a partial order and the valuation is monotone.
  std::vector<std::string> defects() const;

  // Listing in the countermodel text format: one line per state, per order
  // pair, per forced atom.
  std::string to_text() const;

private:
  std::vector<std::uint16_t> up_;  // up_[i] bit j: i <= j
  std::vector<std::pair<std::string, std::uint16_t>> valuation_;
};

bool forces(const KripkeModel& m, std::size_t state, Formula f);
bool forces_all(const KripkeModel& m, std::size_t state, const Context& ctx);

struct Countermodel {
  KripkeModel model;
  std::size_t state;
};

// Smallest model with at most max_states states containing a state that
// forces all of ctx but not goal; models are enumerated by state count, then
// canonical order relation, then valuation, so the result is deterministic.
std::optional<Countermodel> countermodel_search(const Context& ctx, Formula goal,
                                                std::size_t max_states);

// Depth-2 countermodel of at most formula_length(f) states for an
// unprovable order-two-plus formula; nullopt when f is provable.
// Rejects formulas outside the fragment.
std::optional<Countermodel> countermodel_2plus(Formula f);

}  // namespace ipc
