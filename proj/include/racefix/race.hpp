#pragma once

#include "racefix/ast.hpp"
#include "racefix/summary.hpp"

#include <set>
#include <string>
#include <vector>

namespace racefix {

// A concurrency bug reported against one or two access snapshots.
//   Race:             two accesses to the same path that can collide.
//   UnprotectedWrite: a lone write with no lock, reachable from any thread.
struct Bug {
  enum class Kind { Race, UnprotectedWrite };

  Kind kind = Kind::Race;
  std::vector<AccessSnapshot> snapshots; // 2 for Race, 1 for UnprotectedWrite
  std::vector<MethodKey> owners;         // summary owning each snapshot

  bool operator==(const Bug &o) const {
    return kind == o.kind && snapshots == o.snapshots;
  }
  bool operator<(const Bug &o) const {
    if (snapshots != o.snapshots)
      return snapshots < o.snapshots;
    return kind < o.kind;
  }
};

// Bugs grouped by the memory location they fight over.  One cluster is the
// unit of repair: a single patch must reconcile every bug in it.
struct BugCluster {
  AccessPath path;  // the contended access path
  std::string cls;  // class declaring the path's terminal field
  std::vector<Bug> bugs;
};

// Two accesses race when they name the same location, at least one writes,
// no common lock protects both, both can run on arbitrary threads, and
// neither touches thread-local (owned) state.
bool race(const AccessSnapshot &a1, const AccessSnapshot &a2);

// A write that any thread can perform with no lock held on shared state.
bool unprotected_write(const AccessSnapshot &a);

// Scan the summaries of every root class and report bugs, deduplicated per
// location/site and deterministically ordered.
std::vector<Bug> detect_bugs(const SummaryMap &summaries,
                             const std::set<std::string> &root_classes);

// Partition bugs into clusters keyed by (path, declaring class).
std::vector<BugCluster> cluster_bugs(const std::vector<Bug> &bugs,
                                     const Program &program);

// Stable identity for comparing bug sets across repair iterations.
std::string bug_signature(const Bug &b);

} // namespace racefix
