#pragma once

#include "racefix/ast.hpp"
#include "racefix/race.hpp"
#include "racefix/summary.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace racefix {

// How lock candidates are ordered when several existing locks could protect
// a cluster.
enum class LockStrategy { Frequency, Distance };

// Where SYNC wraps an access reached through calls: at its source statement
// (the callee that performs it) or at the outermost call site.
enum class PatchTarget { Root, Callsite };

// A concrete statement a SYNC action will wrap: the snapshot's site inside
// `cls::method`.
struct SyncTarget {
  std::string cls;
  std::string method;
  AccessSnapshot snapshot;

  bool operator==(const SyncTarget &o) const {
    return cls == o.cls && method == o.method && snapshot == o.snapshot;
  }
  bool operator<(const SyncTarget &o) const {
    if (cls != o.cls)
      return cls < o.cls;
    if (method != o.method)
      return method < o.method;
    return snapshot < o.snapshot;
  }
};

// One semantic repair action.
struct PatchAction {
  enum class Kind { Sync, Declare, Volatile, Nil };

  Kind kind = Kind::Nil;

  // Sync: wrap each target statement in synchronized(lock).
  std::vector<SyncTarget> targets;
  AccessPath lock;

  // Declare: add `final <type> <var> = new <type>();` to class `cls`.
  // Volatile: add the volatile modifier to field `var` of class `cls`.
  std::string cls;
  std::string var;
  std::string type;
  bool is_static = false; // Declare only; refined during lowering

  static PatchAction sync(std::vector<SyncTarget> targets, AccessPath lock);
  static PatchAction declare(std::string cls, std::string var,
                             std::string type);
  static PatchAction make_volatile(std::string field, std::string cls);
  static PatchAction nil();
};

// One complete standalone fix: a conjunction of actions.
struct PatchAlternative {
  std::vector<PatchAction> actions;
  bool is_volatile = false;
};

// All known ways to repair one cluster, in preference order (disjunctive
// normal form: alternatives are OR'ed, actions within one are AND'ed).
struct PatchEncoding {
  AccessPath cluster_path;
  std::string cluster_cls;
  std::vector<PatchAlternative> alternatives;
};

// Candidate ranking.  Frequency: most-used lock first, ties by rendered path.
// Distance: prefix locks closest to `pi` first, non-prefix locks after.
std::vector<AccessPath>
rank_locks_frequency(const std::vector<AccessPath> &multiset);
std::vector<AccessPath> rank_locks_distance(const std::set<AccessPath> &locks,
                                            const AccessPath &pi);

// Resolve where an access should be wrapped.  Root mode walks the trace to
// the deepest frame inside the cluster's class and targets the raced
// statement there; call-site mode (and any unresolvable trace) targets the
// access's own site.
SyncTarget resolve_target(const AccessSnapshot &access, const MethodKey &owner,
                          const AccessPath &pi, const std::string &cluster_cls,
                          const SummaryMap &summaries, PatchTarget mode);

// Algorithm: gather the cluster's snapshots and their locks; with no usable
// existing lock, declare a fresh mutex in the cluster's class; otherwise try
// each ranked candidate; always offer VOLATILE last when the contended field
// allows it.
PatchEncoding create_patch_encoding(const BugCluster &cluster,
                                    LockStrategy strategy,
                                    const SummaryMap &summaries,
                                    const Program &program, PatchTarget mode);

std::vector<PatchEncoding>
create_patch_encodings(const std::vector<BugCluster> &clusters,
                       LockStrategy strategy, const SummaryMap &summaries,
                       const Program &program, PatchTarget mode);

// Textual DSL used by the interactive menu and reports, e.g.
//   DECLARE(Account, objR1, Object) AND SYNC({Account.setBalance:11:9}, this.objR1)
std::string render_dsl(const PatchAction &action);
std::string render_dsl(const PatchAlternative &alt);
std::string render_dsl(const PatchEncoding &enc);

} // namespace racefix
