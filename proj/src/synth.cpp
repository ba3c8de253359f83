#include "racefix/synth.hpp"

#include "racefix/diagnostics.hpp"
#include "racefix/paths.hpp"

#include <algorithm>
#include <cassert>

namespace racefix {

PatchAction PatchAction::sync(std::vector<SyncTarget> targets,
                              AccessPath lock) {
  PatchAction a;
  a.kind = Kind::Sync;
  a.targets = std::move(targets);
  a.lock = std::move(lock);
  return a;
}

PatchAction PatchAction::declare(std::string cls, std::string var,
                                 std::string type) {
  PatchAction a;
  a.kind = Kind::Declare;
  a.cls = std::move(cls);
  a.var = std::move(var);
  a.type = std::move(type);
  return a;
}

PatchAction PatchAction::make_volatile(std::string field, std::string cls) {
  PatchAction a;
  a.kind = Kind::Volatile;
  a.var = std::move(field);
  a.cls = std::move(cls);
  return a;
}

PatchAction PatchAction::nil() { return PatchAction{}; }

// ---------------------------------------------------------------------------
// Candidate ranking

std::vector<AccessPath>
rank_locks_frequency(const std::vector<AccessPath> &multiset) {
  std::map<AccessPath, int> counts;
  for (const auto &l : multiset)
    ++counts[l];
  std::vector<AccessPath> out;
  out.reserve(counts.size());
  for (const auto &[l, _] : counts)
    out.push_back(l);
  std::sort(out.begin(), out.end(),
            [&](const AccessPath &a, const AccessPath &b) {
              if (counts[a] != counts[b])
                return counts[a] > counts[b];
              return a.render() < b.render();
            });
  return out;
}

std::vector<AccessPath> rank_locks_distance(const std::set<AccessPath> &locks,
                                            const AccessPath &pi) {
  std::vector<AccessPath> out(locks.begin(), locks.end());
  auto dist = [&](const AccessPath &l) {
    // Prefix locks are ordered by how close they stop to the full path; any
    // non-prefix lock ranks after every prefix lock.
    if (l.is_prefix_of(pi))
      return static_cast<int>(pi.length() - l.length());
    return static_cast<int>(pi.length()) + 1;
  };
  std::sort(out.begin(), out.end(),
            [&](const AccessPath &a, const AccessPath &b) {
              int da = dist(a), db = dist(b);
              if (da != db)
                return da < db;
              return a.render() < b.render();
            });
  return out;
}

// ---------------------------------------------------------------------------
// Target resolution

namespace {

bool elements_suffix_of(const std::vector<std::string> &suffix,
                        const std::vector<std::string> &full) {
  if (suffix.size() > full.size())
    return false;
  return std::equal(suffix.begin(), suffix.end(),
                    full.end() - static_cast<long>(suffix.size()));
}

} // namespace

SyncTarget resolve_target(const AccessSnapshot &access, const MethodKey &owner,
                          const AccessPath &pi, const std::string &cluster_cls,
                          const SummaryMap &summaries, PatchTarget mode) {
  SyncTarget own{owner.cls, owner.method, access};
  if (mode == PatchTarget::Callsite)
    return own;

  // Deepest trace frame inside the cluster's class: that method performs the
  // access (or sits closest to it), so the patch lands at the bug's source.
  int k = -1;
  for (int i = static_cast<int>(access.trace.size()) - 1; i >= 0; --i) {
    if (access.trace[i].cls == cluster_cls) {
      k = i;
      break;
    }
  }
  if (k < 0)
    return own;

  const TraceFrame &frame = access.trace[static_cast<size_t>(k)];
  auto it = summaries.find({frame.cls, frame.method});
  if (it == summaries.end())
    return own;

  // The matching snapshot inside that frame carries the remaining trace and
  // a path whose elements end the full path.
  std::vector<TraceFrame> rest(access.trace.begin() + k + 1,
                               access.trace.end());
  const AccessSnapshot *best = nullptr;
  for (const auto &s : it->second.snapshots) {
    if (s.kind != access.kind || s.trace != rest)
      continue;
    if (!elements_suffix_of(s.path.elements, pi.elements))
      continue;
    if (!best || s.site < best->site)
      best = &s;
  }
  if (!best)
    return own;
  return {frame.cls, frame.method, *best};
}

// ---------------------------------------------------------------------------
// Encoding construction

namespace {

// Path to the object owning the path's terminal field: everything before the
// last named element.  `this.accounts.[*].balance` -> `this.accounts.[*]`,
// `this.xs.[*]` -> `this` (the array field's owner).
AccessPath owner_prefix(const AccessPath &p) {
  int last_field = -1;
  for (int i = static_cast<int>(p.elements.size()) - 1; i >= 0; --i) {
    if (p.elements[i] != AccessPath::kWildcard) {
      last_field = i;
      break;
    }
  }
  AccessPath out(p.base);
  for (int i = 0; i < last_field; ++i)
    out.elements.push_back(p.elements[static_cast<size_t>(i)]);
  return out;
}

std::string fresh_lock_name(const ClassDecl &cls) {
  std::map<std::string, int> used;
  collect_identifiers(cls, used);
  for (int n = 1; n < 1000; ++n) {
    std::string name = "objR" + std::to_string(n);
    if (!used.count(name))
      return name;
  }
  throw FreshNameError("no fresh lock name available in class " + cls.name);
}

struct ResolvedAccess {
  SyncTarget target;
  AccessPath spelled_lock; // the lock as written inside the target method
};

// Re-spell a caller-coordinate lock inside the resolved target's method.
// Returns false when the lock has no spelling there; the caller then falls
// back to wrapping the call site.
bool respell_lock(const AccessPath &lock, const AccessPath &pi,
                  const AccessPath &resolved_path, const Program &program,
                  AccessPath &out) {
  if (program.find_class(lock.base)) { // global path: valid everywhere
    out = lock;
    return true;
  }
  if (resolved_path.base != "this")
    return false;
  // pi = receiver-prefix ++ resolved elements; a lock below that receiver
  // prefix re-roots at `this`.
  size_t prefix_len = pi.elements.size() - resolved_path.elements.size();
  if (lock.base != pi.base || lock.elements.size() < prefix_len)
    return false;
  if (!std::equal(pi.elements.begin(),
                  pi.elements.begin() + static_cast<long>(prefix_len),
                  lock.elements.begin()))
    return false;
  out = AccessPath("this",
                   {lock.elements.begin() + static_cast<long>(prefix_len),
                    lock.elements.end()});
  return true;
}

// Group per-access resolutions into SYNC actions: one action per target
// method and lock spelling, with deduplicated targets.
std::vector<PatchAction> build_syncs(const std::vector<ResolvedAccess> &ras) {
  std::map<std::pair<std::pair<std::string, std::string>, AccessPath>,
           std::vector<SyncTarget>>
      groups;
  for (const auto &ra : ras)
    groups[{{ra.target.cls, ra.target.method}, ra.spelled_lock}].push_back(
        ra.target);
  std::vector<PatchAction> out;
  for (auto &[key, targets] : groups) {
    // Within a group the class, method and lock are fixed, so two accesses at
    // the same statement (e.g. the read and write of `x = x + 1`) produce the
    // same synchronized block; keep one target per site.
    std::sort(targets.begin(), targets.end(),
              [](const SyncTarget &a, const SyncTarget &b) {
                if (!(a.snapshot.site == b.snapshot.site))
                  return a.snapshot.site < b.snapshot.site;
                return a < b;
              });
    targets.erase(std::unique(targets.begin(), targets.end(),
                              [](const SyncTarget &a, const SyncTarget &b) {
                                return a.snapshot.site == b.snapshot.site;
                              }),
                  targets.end());
    out.push_back(PatchAction::sync(std::move(targets), key.second));
  }
  return out;
}

} // namespace

PatchEncoding create_patch_encoding(const BugCluster &cluster,
                                    LockStrategy strategy,
                                    const SummaryMap &summaries,
                                    const Program &program, PatchTarget mode) {
  assert(!cluster.bugs.empty() && "cluster without bugs");
  PatchEncoding enc;
  enc.cluster_path = cluster.path;
  enc.cluster_cls = cluster.cls;

  // Deduplicated accesses with their owning summaries.
  std::map<AccessSnapshot, MethodKey> accesses;
  for (const auto &bug : cluster.bugs)
    for (size_t i = 0; i < bug.snapshots.size(); ++i)
      accesses.emplace(bug.snapshots[i], bug.owners[i]);
  assert(!accesses.empty() && "cluster without snapshots");

  // Existing lock candidates (wildcard paths cannot be written as monitor
  // expressions, so they never become candidates).
  std::vector<AccessPath> lock_multiset;
  for (const auto &[a, _] : accesses)
    for (const auto &l : a.locks)
      if (!l.has_wildcard())
        lock_multiset.push_back(l);

  std::vector<AccessPath> candidates;
  if (!lock_multiset.empty()) {
    if (strategy == LockStrategy::Frequency)
      candidates = rank_locks_frequency(lock_multiset);
    else
      candidates = rank_locks_distance(
          {lock_multiset.begin(), lock_multiset.end()}, enc.cluster_path);
  }

  if (candidates.empty()) {
    // No lock anywhere near this data: declare a fresh mutex in the class
    // that owns the contended field and guard every access with it.
    const ClassDecl *cls = program.find_class(cluster.cls);
    std::string name = cls ? fresh_lock_name(*cls) : "objR1";
    std::vector<ResolvedAccess> ras;
    for (const auto &[a, owner] : accesses) {
      SyncTarget t = resolve_target(a, owner, enc.cluster_path, cluster.cls,
                                    summaries, mode);
      AccessPath lock = owner_prefix(t.snapshot.path);
      lock.elements.push_back(name);
      ras.push_back({std::move(t), std::move(lock)});
    }
    PatchAlternative alt;
    alt.actions.push_back(PatchAction::declare(cluster.cls, name, "Object"));
    for (auto &a : build_syncs(ras))
      alt.actions.push_back(std::move(a));
    enc.alternatives.push_back(std::move(alt));
  } else {
    for (const auto &lock : candidates) {
      std::vector<ResolvedAccess> ras;
      for (const auto &[a, owner] : accesses) {
        if (a.locks.count(lock))
          continue; // already protected by this candidate
        SyncTarget t = resolve_target(a, owner, enc.cluster_path, cluster.cls,
                                      summaries, mode);
        AccessPath spelled = lock;
        if (t.cls != owner.cls || t.method != owner.method) {
          if (!respell_lock(lock, enc.cluster_path, t.snapshot.path, program,
                            spelled)) {
            // The candidate has no name inside the callee; wrap the call
            // site instead, where the original spelling is valid.
            t = {owner.cls, owner.method, a};
            spelled = lock;
          }
        }
        ras.push_back({std::move(t), std::move(spelled)});
      }
      if (ras.empty())
        continue; // every access already holds this lock
      PatchAlternative alt;
      alt.actions = build_syncs(ras);
      enc.alternatives.push_back(std::move(alt));
    }
  }

  // VOLATILE is always the last resort, and only for a plain field of the
  // cluster's class (array elements have no volatile spelling).
  if (!enc.cluster_path.elements.empty() &&
      enc.cluster_path.elements.back() != AccessPath::kWildcard) {
    const ClassDecl *cls = program.find_class(cluster.cls);
    const std::string &field = enc.cluster_path.elements.back();
    if (cls && cls->find_field(field)) {
      PatchAlternative alt;
      alt.is_volatile = true;
      alt.actions.push_back(PatchAction::make_volatile(field, cluster.cls));
      enc.alternatives.push_back(std::move(alt));
    }
  }

  return enc;
}

std::vector<PatchEncoding>
create_patch_encodings(const std::vector<BugCluster> &clusters,
                       LockStrategy strategy, const SummaryMap &summaries,
                       const Program &program, PatchTarget mode) {
  std::vector<PatchEncoding> out;
  out.reserve(clusters.size());
  for (const auto &c : clusters)
    out.push_back(create_patch_encoding(c, strategy, summaries, program, mode));
  return out;
}

// ---------------------------------------------------------------------------
// DSL rendering

std::string render_dsl(const PatchAction &action) {
  switch (action.kind) {
  case PatchAction::Kind::Sync: {
    std::string s = "SYNC({";
    for (size_t i = 0; i < action.targets.size(); ++i) {
      const SyncTarget &t = action.targets[i];
      if (i)
        s += ", ";
      s += t.cls + "." + t.method + ":" +
           std::to_string(t.snapshot.site.start_line) + ":" +
           std::to_string(t.snapshot.site.start_col);
    }
    s += "}, " + action.lock.render() + ")";
    return s;
  }
  case PatchAction::Kind::Declare:
    return "DECLARE(" + action.cls + ", " + action.var + ", " + action.type +
           ")";
  case PatchAction::Kind::Volatile:
    return "VOLATILE(" + action.var + ", " + action.cls + ")";
  case PatchAction::Kind::Nil:
    return "NIL";
  }
  return "NIL";
}

std::string render_dsl(const PatchAlternative &alt) {
  if (alt.actions.empty())
    return "NIL";
  std::string s;
  for (size_t i = 0; i < alt.actions.size(); ++i) {
    if (i)
      s += " AND ";
    s += render_dsl(alt.actions[i]);
  }
  return s;
}

std::string render_dsl(const PatchEncoding &enc) {
  if (enc.alternatives.empty())
    return "NIL";
  std::string s;
  for (size_t i = 0; i < enc.alternatives.size(); ++i) {
    if (i)
      s += "\nOR ";
    s += render_dsl(enc.alternatives[i]);
  }
  return s;
}

} // namespace racefix
