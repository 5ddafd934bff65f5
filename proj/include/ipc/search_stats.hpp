#pragma once

#include <cstddef>

namespace ipc {

// Work counters shared by the proof search and automaton acceptance.
struct SearchStats {
  std::size_t visited = 0;    // judgements or configurations entered
  std::size_t max_depth = 0;  // deepest recursion reached
};

}  // namespace ipc
