#include "racefix/deadlock.hpp"

#include "racefix/paths.hpp"

#include <algorithm>
#include <functional>

namespace racefix {

namespace {

// Monitors a method may acquire, directly or through any call chain, named
// in the method's own frame.  Purely structural: derived from synchronized
// statements and modifiers, never from what the guarded regions do.
using AcquireMap = std::map<MethodKey, std::set<AccessPath>>;

AccessPath method_monitor(const MethodDecl &m, const ClassDecl &cls) {
  return m.is_static ? AccessPath(cls.name, {"class"}) : AccessPath("this");
}

// Every call expression inside one statement's own expressions (conditions,
// initializers, arguments, subscripts), not descending into child statements.
void calls_in_stmt(const Stmt &s, const std::function<void(const Expr &)> &f) {
  std::function<void(const Expr &)> visit = [&](const Expr &e) {
    if (e.kind == ExprKind::Call)
      f(e);
    for (const auto &c : e.children)
      visit(c);
  };
  for (const auto *e : {&s.init, &s.target, &s.value, &s.lock_expr, &s.cond})
    if (e->has_value())
      visit(**e);
}

AcquireMap acquire_fixpoint(const Program &program) {
  AcquireMap own;
  std::map<MethodKey, std::set<MethodKey>> callees;
  for (const auto &cls : program.classes) {
    for (const auto &m : cls.methods) {
      MethodKey key{cls.name, m.name};
      auto &monitors = own[key];
      auto &out = callees[key];
      if (m.is_synchronized)
        monitors.insert(method_monitor(m, cls));
      std::function<void(const std::vector<Stmt> &)> walk =
          [&](const std::vector<Stmt> &stmts) {
            for (const auto &s : stmts) {
              if (s.kind == StmtKind::Sync)
                monitors.insert(normalize_path(*s.lock_expr, m, cls, program));
              calls_in_stmt(s, [&](const Expr &call) {
                ResolvedCall rc =
                    resolve_call_target(call, m, cls, program);
                if (rc.cls)
                  out.insert({rc.cls->name, rc.method->name});
              });
              walk(s.body);
              walk(s.else_body);
            }
          };
      walk(m.body);
    }
  }

  // Transitive closure over the call graph; sets only grow and are bounded
  // by the finite monitor population, so this terminates.
  AcquireMap acq = own;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto &[key, outs] : callees) {
      auto &mine = acq[key];
      for (const auto &callee : outs)
        for (const auto &monitor : acq[callee])
          if (mine.insert(monitor).second)
            changed = true;
    }
  }
  return acq;
}

class LockWalker {
public:
  LockWalker(const MethodDecl &m, const ClassDecl &cls, const Program &program,
             const AcquireMap &acquires, LockOrderGraph &g)
      : m_(m), cls_(cls), program_(program), acquires_(acquires), g_(g) {}

  void run() {
    if (m_.is_synchronized) {
      AccessPath monitor = method_monitor(m_, cls_);
      g_.nodes.insert(monitor);
      stack_.push_back(monitor);
    }
    walk(m_.body);
  }

private:
  void add_edge(const AccessPath &outer, const AccessPath &inner,
                const SourceSpan &witness) {
    g_.nodes.insert(outer);
    g_.nodes.insert(inner);
    g_.edges.try_emplace({outer, inner}, witness);
  }

  // Whatever a callee may acquire is acquired under the current stack top.
  // Monitors keep their callee-frame spelling, the same identity the
  // callee's own syntactic walk gives them.
  void call_edges(const Stmt &s) {
    if (stack_.empty())
      return;
    calls_in_stmt(s, [&](const Expr &call) {
      ResolvedCall rc = resolve_call_target(call, m_, cls_, program_);
      if (!rc.cls)
        return;
      auto it = acquires_.find({rc.cls->name, rc.method->name});
      if (it == acquires_.end())
        return;
      for (const auto &monitor : it->second)
        add_edge(stack_.back(), monitor, s.span);
    });
  }

  void walk(const std::vector<Stmt> &stmts) {
    for (const auto &s : stmts) {
      call_edges(s);
      if (s.kind == StmtKind::Sync) {
        AccessPath monitor = normalize_path(*s.lock_expr, m_, cls_, program_);
        g_.nodes.insert(monitor);
        if (!stack_.empty())
          add_edge(stack_.back(), monitor, s.span);
        stack_.push_back(monitor);
        walk(s.body);
        stack_.pop_back();
      } else {
        walk(s.body);
        walk(s.else_body);
      }
    }
  }

  const MethodDecl &m_;
  const ClassDecl &cls_;
  const Program &program_;
  const AcquireMap &acquires_;
  LockOrderGraph &g_;
  std::vector<AccessPath> stack_;
};

} // namespace

LockOrderGraph build_lock_order(const Program &program) {
  AcquireMap acquires = acquire_fixpoint(program);
  LockOrderGraph g;
  for (const auto &cls : program.classes)
    for (const auto &m : cls.methods)
      LockWalker(m, cls, program, acquires, g).run();
  return g;
}

std::vector<std::vector<AccessPath>>
find_deadlock_cycles(const LockOrderGraph &g) {
  // Successor lists without self-loops (re-entrant acquire is legal).
  std::map<AccessPath, std::vector<AccessPath>> succ;
  for (const auto &[edge, _] : g.edges)
    if (!(edge.first == edge.second))
      succ[edge.first].push_back(edge.second);

  std::vector<AccessPath> nodes(g.nodes.begin(), g.nodes.end());
  std::set<std::vector<AccessPath>> found;

  // Each elementary cycle is discovered exactly once: rooted at its least
  // node, never revisiting anything smaller than the root.
  for (const auto &root : nodes) {
    std::vector<AccessPath> path{root};
    std::set<AccessPath> on_path{root};
    std::function<void()> dfs = [&]() {
      auto it = succ.find(path.back());
      if (it == succ.end())
        return;
      for (const auto &next : it->second) {
        if (next == root) {
          if (path.size() >= 2)
            found.insert(path);
          continue;
        }
        if (next < root || on_path.count(next))
          continue;
        path.push_back(next);
        on_path.insert(next);
        dfs();
        on_path.erase(next);
        path.pop_back();
      }
    };
    dfs();
  }

  return {found.begin(), found.end()};
}

} // namespace racefix
