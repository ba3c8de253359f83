// Compositional, bottom-up inference of access-snapshot summaries.
//
// Each method is abstracted as the set of memory accesses it may perform,
// where one access snapshot records
//     <path, read/write kind, held lock set, thread kind, ownership, trace>
// plus the source site of the access.  Lock identity is purely syntactic: a
// lock *is* its access path, and the lock set is a set of paths.  Summaries
// of callees are inlined at call sites under formal-to-actual substitution,
// which is what makes the analysis compositional: a method is analyzed once,
// in isolation, and its summary is reused at every call site.
#pragma once

#include "racefix/ast.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace racefix {

enum class AccessKind { Read, Write };

// Totally ordered: NoThread < AnyThreadButMain < AnyThread; join is max.
enum class ThreadKind { NoThread = 0, AnyThreadButMain = 1, AnyThread = 2 };

inline ThreadKind thread_join(ThreadKind a, ThreadKind b) {
  return a < b ? b : a;
}

// OwnedIf(S): the access is owned provided every formal parameter whose index
// is in S is bound to an owned actual.  Owned is OwnedIf({}); Unowned is the
// lattice top.
struct Ownership {
  bool unowned = true;
  std::set<int> owned_if; // meaningful only when !unowned

  static Ownership owned() { return Ownership{false, {}}; }
  static Ownership conditional(std::set<int> s) {
    return Ownership{false, std::move(s)};
  }
  static Ownership make_unowned() { return Ownership{true, {}}; }

  bool is_owned() const { return !unowned && owned_if.empty(); }

  friend bool operator==(const Ownership &a, const Ownership &b) {
    return a.unowned == b.unowned && (a.unowned || a.owned_if == b.owned_if);
  }
  friend bool operator<(const Ownership &a, const Ownership &b) {
    if (a.unowned != b.unowned)
      return b.unowned; // owned variants sort before Unowned
    return a.owned_if < b.owned_if;
  }
};

struct TraceFrame {
  std::string cls, method;
  friend bool operator==(const TraceFrame &a, const TraceFrame &b) {
    return a.cls == b.cls && a.method == b.method;
  }
  friend bool operator<(const TraceFrame &a, const TraceFrame &b) {
    if (a.cls != b.cls)
      return a.cls < b.cls;
    return a.method < b.method;
  }
};

struct AccessSnapshot {
  AccessPath path;
  AccessKind kind = AccessKind::Read;
  std::set<AccessPath> locks;
  ThreadKind thread = ThreadKind::NoThread;
  Ownership ownership;
  // Call chain from the summarized method down to the access: trace.front()
  // is the direct callee, trace.back() the frame performing the access.
  // Empty for direct accesses.
  std::vector<TraceFrame> trace;
  SourceSpan site; // enclosing statement of the access (or of the call)

  friend bool operator==(const AccessSnapshot &a, const AccessSnapshot &b) {
    return a.site == b.site && a.path == b.path && a.kind == b.kind &&
           a.locks == b.locks && a.thread == b.thread &&
           a.ownership == b.ownership && a.trace == b.trace;
  }
  friend bool operator<(const AccessSnapshot &a, const AccessSnapshot &b) {
    if (!(a.site == b.site))
      return a.site < b.site;
    if (a.path != b.path)
      return a.path < b.path;
    if (a.kind != b.kind)
      return a.kind < b.kind;
    if (a.locks != b.locks)
      return a.locks < b.locks;
    if (a.thread != b.thread)
      return a.thread < b.thread;
    if (!(a.ownership == b.ownership))
      return a.ownership < b.ownership;
    return a.trace < b.trace;
  }
};

struct MethodSummary {
  std::string cls, method;
  std::set<AccessSnapshot> snapshots;
};

struct MethodKey {
  std::string cls, method;
  friend bool operator<(const MethodKey &a, const MethodKey &b) {
    if (a.cls != b.cls)
      return a.cls < b.cls;
    return a.method < b.method;
  }
  friend bool operator==(const MethodKey &a, const MethodKey &b) {
    return a.cls == b.cls && a.method == b.method;
  }
};

using SummaryMap = std::map<MethodKey, MethodSummary>;

// Concurrency scope of a program.  `roots` are the classes that directly look
// concurrent (annotation, synchronized construct, or referenced from a
// Runnable's run()); `all` closes the roots over field and parameter types.
// Race pairing runs over root classes; summaries, thread kinds, and patch
// placement use the closure.
struct ConcurrencyScope {
  std::set<std::string> roots;
  std::set<std::string> all;
};

ConcurrencyScope infer_scope(const Program &p);

// Contracted entry point: the closure (see ConcurrencyScope).
std::set<std::string> infer_concurrent_classes(const Program &p);

// Per-method thread kinds: reachable from a Runnable's run() => AnyThread;
// else reachable from a `static void main` => AnyThreadButMain; else owner
// class in scope => AnyThread; else NoThread.
std::map<MethodKey, ThreadKind> thread_kinds(const Program &p,
                                             const ConcurrencyScope &scope);

// Target of a call expression, resolved through the receiver's static type
// (or the named class for static calls).  Both members are null when the
// receiver is not a path or the type walk leaves the known world.
struct ResolvedCall {
  const ClassDecl *cls = nullptr;
  const MethodDecl *method = nullptr;
};

ResolvedCall resolve_call_target(const Expr &call, const MethodDecl &method,
                                 const ClassDecl &cls, const Program &program);

// Analyze one method against already-computed callee summaries.  `thread` is
// the method's thread kind (see thread_kinds).  Unresolvable callees are
// skipped with a warning appended to `warnings`.
MethodSummary analyze_method(const MethodDecl &m, const ClassDecl &cls,
                             const Program &program, const SummaryMap &callees,
                             ThreadKind thread,
                             std::vector<std::string> *warnings = nullptr);

struct AnalysisResult {
  SummaryMap summaries;
  ConcurrencyScope scope;
  std::vector<std::string> warnings;
};

// Whole-program analysis: processes call-graph SCCs bottom-up and iterates
// recursive components to a fixed point (snapshot sets only grow; traces are
// cut at the first repeated frame, so the domain is finite).
AnalysisResult analyze_program(const Program &p);

// Rendering helpers shared by reports and JSON.
std::string kind_name(AccessKind k);   // "rd" / "wr"
std::string thread_name(ThreadKind t); // enum spelling

} // namespace racefix
