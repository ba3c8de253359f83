#pragma once

#include "racefix/ast.hpp"
#include "racefix/summary.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace racefix {

// Ordered lock-acquisition facts: an edge (outer, inner) means some thread
// can acquire `inner` while holding `outer`, witnessed at a source site.
// Lock identity is the normalized access path (syntactic, like the race
// check); self-edges record re-entrant nesting and are never cyclic alone.
struct LockOrderGraph {
  std::set<AccessPath> nodes;
  std::map<std::pair<AccessPath, AccessPath>, SourceSpan> edges;

  bool has_edge(const AccessPath &outer, const AccessPath &inner) const {
    return edges.count({outer, inner}) != 0;
  }
};

// Collect every adjacent nesting of synchronized regions: syntactic nesting
// inside each method, plus nesting realized through calls (a call made under
// a held lock to a method that may acquire further locks, transitively).
// Call-realized edges come from the sync structure of callees, not from
// their accesses, so an empty or access-free region still orders its lock.
LockOrderGraph build_lock_order(const Program &program);

// All elementary cycles of length >= 2, each rotated to start at its least
// lock and reported in deterministic order.
std::vector<std::vector<AccessPath>>
find_deadlock_cycles(const LockOrderGraph &g);

} // namespace racefix
