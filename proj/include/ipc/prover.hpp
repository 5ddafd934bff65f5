// Goal-directed proof search for intuitionistic propositional logic,
// synthesizing long-normal-form witnesses, with the implicational
// specialization and bounded inhabitant enumeration.
#pragma once

#include <optional>
#include <vector>

#include "ipc/formula.hpp"
#include "ipc/search_stats.hpp"
#include "ipc/term.hpp"

namespace ipc {

struct ProofSearchResult {
  std::optional<Term> witness;  // engaged exactly when provable
  SearchStats stats;
  bool provable() const { return witness.has_value(); }
};

// Decides ctx |- goal. A Provable result carries a long normal form that
// typechecks to goal in ctx.
ProofSearchResult prove(const Context& ctx, Formula goal);

// The implicational restriction; rejects inputs mentioning /\, \/ or false.
ProofSearchResult prove_iipc(const Context& ctx, Formula goal);

// All closed long-normal inhabitants of an implicational goal with at most
// max_term_size nodes, in canonical order (binders named by depth, so the
// list is duplicate-free up to alpha conversion).
std::vector<Term> enumerate_normal_inhabitants(Formula goal, std::size_t max_term_size);

}  // namespace ipc
