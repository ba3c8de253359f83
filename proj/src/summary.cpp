#include "racefix/summary.hpp"

#include "racefix/paths.hpp"
#include "racefix/printer.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace racefix {

std::string kind_name(AccessKind k) {
  return k == AccessKind::Read ? "rd" : "wr";
}

std::string thread_name(ThreadKind t) {
  switch (t) {
  case ThreadKind::NoThread:
    return "NoThread";
  case ThreadKind::AnyThreadButMain:
    return "AnyThreadButMain";
  case ThreadKind::AnyThread:
    return "AnyThread";
  }
  return "NoThread";
}

namespace {

// ---------------------------------------------------------------------------
// Shared walking utilities

bool stmts_contain_sync(const std::vector<Stmt> &stmts) {
  for (const auto &s : stmts) {
    if (s.kind == StmtKind::Sync)
      return true;
    if (stmts_contain_sync(s.body) || stmts_contain_sync(s.else_body))
      return true;
  }
  return false;
}

// Path-shaped receiver of a call expression.
Expr receiver_expr(const Expr &call) {
  Expr r;
  r.kind = ExprKind::PathRead;
  r.base = call.base;
  r.segs = call.segs;
  size_t n = call.index_seg_count();
  r.children.assign(call.children.begin(), call.children.begin() + n);
  r.span = call.span;
  return r;
}

struct ResolvedCallee {
  const ClassDecl *cls = nullptr;
  const MethodDecl *method = nullptr;
};

// Resolve the target of a call using the receiver's static type.
ResolvedCallee resolve_call(const Expr &call, const MethodDecl &method,
                            const ClassDecl &cls, const Program &program) {
  Expr recv = receiver_expr(call);
  auto rp = try_normalize_path(recv, method, cls, program);
  if (!rp)
    return {};
  std::string t;
  if (rp->elements.empty() && program.find_class(rp->base) &&
      rp->base != cls.name)
    t = rp->base; // static call C.m(...)
  else
    t = type_of_path(*rp, method, cls, program);
  t = element_type(t);
  const ClassDecl *callee_cls = program.find_class(t);
  if (!callee_cls)
    return {};
  const MethodDecl *callee = callee_cls->find_method(call.text);
  if (!callee)
    return {};
  return {callee_cls, callee};
}

} // namespace

ResolvedCall resolve_call_target(const Expr &call, const MethodDecl &method,
                                 const ClassDecl &cls,
                                 const Program &program) {
  ResolvedCallee rc = resolve_call(call, method, cls, program);
  return {rc.cls, rc.method};
}

namespace {

// Visit every expression in a method body (conditions, initializers,
// arguments, subscripts, ...).
void walk_exprs(const std::vector<Stmt> &stmts,
                const std::function<void(const Expr &)> &visit) {
  std::function<void(const Expr &)> visit_expr = [&](const Expr &e) {
    visit(e);
    for (const auto &c : e.children)
      visit_expr(c);
  };
  for (const auto &s : stmts) {
    for (const auto *e : {&s.init, &s.target, &s.value, &s.lock_expr, &s.cond})
      if (e->has_value())
        visit_expr(**e);
    walk_exprs(s.body, visit);
    walk_exprs(s.else_body, visit);
  }
}

// ---------------------------------------------------------------------------
// Call graph

std::map<MethodKey, std::set<MethodKey>> call_graph(const Program &p) {
  std::map<MethodKey, std::set<MethodKey>> g;
  for (const auto &cls : p.classes) {
    for (const auto &m : cls.methods) {
      auto &edges = g[{cls.name, m.name}];
      walk_exprs(m.body, [&](const Expr &e) {
        if (e.kind != ExprKind::Call)
          return;
        ResolvedCallee rc = resolve_call(e, m, cls, p);
        if (rc.cls)
          edges.insert({rc.cls->name, rc.method->name});
      });
    }
  }
  return g;
}

std::set<MethodKey>
reachable_from(const std::set<MethodKey> &roots,
               const std::map<MethodKey, std::set<MethodKey>> &g) {
  std::set<MethodKey> seen = roots;
  std::vector<MethodKey> work(roots.begin(), roots.end());
  while (!work.empty()) {
    MethodKey k = work.back();
    work.pop_back();
    auto it = g.find(k);
    if (it == g.end())
      continue;
    for (const auto &next : it->second)
      if (seen.insert(next).second)
        work.push_back(next);
  }
  return seen;
}

} // namespace

// ---------------------------------------------------------------------------
// Concurrency scope

ConcurrencyScope infer_scope(const Program &p) {
  ConcurrencyScope scope;

  // Classes whose instances are referenced inside some run() body.
  std::set<std::string> referenced_in_run;
  for (const auto &cls : p.classes) {
    if (!cls.implements_runnable)
      continue;
    const MethodDecl *run = cls.find_method("run");
    if (!run)
      continue;
    walk_exprs(run->body, [&](const Expr &e) {
      if (e.kind == ExprKind::New || e.kind == ExprKind::NewArray) {
        if (p.find_class(element_type(e.text)))
          referenced_in_run.insert(element_type(e.text));
        return;
      }
      std::optional<AccessPath> path;
      if (e.kind == ExprKind::PathRead)
        path = try_normalize_path(e, *run, cls, p);
      else if (e.kind == ExprKind::Call)
        path = try_normalize_path(receiver_expr(e), *run, cls, p);
      if (!path)
        return;
      for (const auto &c : class_types_on_path(*path, *run, cls, p))
        if (c != cls.name)
          referenced_in_run.insert(c);
    });
  }

  for (const auto &cls : p.classes) {
    bool has_sync = false;
    for (const auto &m : cls.methods)
      has_sync = has_sync || m.is_synchronized || stmts_contain_sync(m.body);
    if (cls.has_annotation("ThreadSafe") || has_sync ||
        referenced_in_run.count(cls.name))
      scope.roots.insert(cls.name);
  }

  // Closure over field and parameter types of flagged classes.
  scope.all = scope.roots;
  std::vector<std::string> work(scope.roots.begin(), scope.roots.end());
  while (!work.empty()) {
    const ClassDecl *cls = p.find_class(work.back());
    work.pop_back();
    if (!cls)
      continue;
    auto add = [&](const std::string &type_name) {
      std::string t = element_type(type_name);
      if (p.find_class(t) && scope.all.insert(t).second)
        work.push_back(t);
    };
    for (const auto &f : cls->fields)
      add(f.type);
    for (const auto &m : cls->methods)
      for (const auto &prm : m.params)
        add(prm.type);
  }
  return scope;
}

std::set<std::string> infer_concurrent_classes(const Program &p) {
  return infer_scope(p).all;
}

std::map<MethodKey, ThreadKind> thread_kinds(const Program &p,
                                             const ConcurrencyScope &scope) {
  auto g = call_graph(p);

  std::set<MethodKey> run_roots, main_roots;
  for (const auto &cls : p.classes) {
    if (cls.implements_runnable && cls.find_method("run"))
      run_roots.insert({cls.name, "run"});
    for (const auto &m : cls.methods)
      if (m.is_static && m.name == "main" && m.return_type == "void")
        main_roots.insert({cls.name, "main"});
  }
  auto run_reach = reachable_from(run_roots, g);
  auto main_reach = reachable_from(main_roots, g);

  std::map<MethodKey, ThreadKind> out;
  for (const auto &cls : p.classes) {
    for (const auto &m : cls.methods) {
      MethodKey k{cls.name, m.name};
      if (run_reach.count(k))
        out[k] = ThreadKind::AnyThread;
      else if (main_reach.count(k))
        out[k] = ThreadKind::AnyThreadButMain;
      else if (scope.all.count(cls.name))
        out[k] = ThreadKind::AnyThread;
      else
        out[k] = ThreadKind::NoThread;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-method analysis

namespace {

class MethodAnalyzer {
public:
  MethodAnalyzer(const MethodDecl &m, const ClassDecl &cls,
                 const Program &program, const SummaryMap &callees,
                 ThreadKind thread, std::vector<std::string> *warnings)
      : m_(m), cls_(cls), program_(program), callees_(callees),
        thread_(thread), warnings_(warnings) {
    classify_locals();
  }

  MethodSummary run() {
    MethodSummary out;
    out.cls = cls_.name;
    out.method = m_.name;
    summary_ = &out;

    if (m_.is_synchronized) {
      // A synchronized method holds `this` (or the class object for statics)
      // for its whole body.
      AccessPath monitor;
      if (m_.is_static)
        monitor = AccessPath(cls_.name, {"class"});
      else
        monitor = AccessPath("this");
      lock_stack_.push_back(monitor);
    }
    walk(m_.body);
    return out;
  }

private:
  // A local is an ownership root when every definition assigns it a freshly
  // allocated object.
  void classify_locals() {
    std::map<std::string, std::pair<int, int>> defs; // name -> (total, fresh)
    std::function<void(const std::vector<Stmt> &)> scan =
        [&](const std::vector<Stmt> &stmts) {
          for (const auto &s : stmts) {
            if (s.kind == StmtKind::LocalDecl && s.init) {
              auto &d = defs[s.decl_name];
              ++d.first;
              if (s.init->kind == ExprKind::New ||
                  s.init->kind == ExprKind::NewArray)
                ++d.second;
            }
            if (s.kind == StmtKind::Assign && s.target->segs.empty() &&
                s.target->base != "this") {
              auto &d = defs[s.target->base];
              ++d.first;
              if (s.value->kind == ExprKind::New ||
                  s.value->kind == ExprKind::NewArray)
                ++d.second;
            }
            scan(s.body);
            scan(s.else_body);
          }
        };
    scan(m_.body);
    for (const auto &[name, d] : defs)
      if (d.first > 0 && d.first == d.second)
        fresh_locals_.insert(name);
  }

  Ownership ownership_of_base(const std::string &base) const {
    if (base == "this")
      return Ownership::make_unowned();
    int pi = m_.param_index(base);
    if (pi >= 0)
      return Ownership::conditional({pi});
    if (fresh_locals_.count(base))
      return Ownership::owned();
    return Ownership::make_unowned();
  }

  // Volatile terminal fields take part in no snapshots: marking a field
  // volatile removes its accesses from the race analysis, which is exactly
  // how a VOLATILE patch validates.
  bool is_volatile_access(const AccessPath &p) const {
    if (p.elements.empty() || p.elements.back() == AccessPath::kWildcard)
      return false;
    const FieldDecl *f = terminal_field_decl(p, m_, cls_, program_, nullptr);
    return f && f->is_volatile;
  }

  void emit(const AccessPath &path, AccessKind kind) {
    if (path.elements.empty())
      return; // bare local/param/this: not a heap access
    if (is_volatile_access(path))
      return;
    AccessSnapshot snap;
    snap.path = path;
    snap.kind = kind;
    snap.locks = {lock_stack_.begin(), lock_stack_.end()};
    snap.thread = thread_;
    snap.ownership = ownership_of_base(path.base);
    snap.site = current_site_;
    summary_->snapshots.insert(std::move(snap));
  }

  void warn(const std::string &msg) {
    if (warnings_)
      warnings_->push_back(msg);
  }

  // Substitute a callee-side path into caller coordinates.  Returns nothing
  // when the path must not propagate (rooted at a callee local, or at a
  // formal bound to a non-path actual).
  std::optional<AccessPath>
  substitute(const AccessPath &callee_path, const MethodDecl &callee,
             const std::optional<AccessPath> &recv,
             const std::vector<std::optional<AccessPath>> &actuals) const {
    auto splice = [&](const AccessPath &root) {
      AccessPath out = root;
      out.elements.insert(out.elements.end(), callee_path.elements.begin(),
                          callee_path.elements.end());
      return out;
    };
    if (callee_path.base == "this")
      return recv ? std::optional<AccessPath>(splice(*recv)) : std::nullopt;
    int pi = callee.param_index(callee_path.base);
    if (pi >= 0) {
      if (pi < static_cast<int>(actuals.size()) && actuals[pi])
        return splice(*actuals[pi]);
      return std::nullopt;
    }
    if (program_.find_class(callee_path.base))
      return callee_path; // static root: global, unchanged
    return std::nullopt;  // callee local: never propagates
  }

  void inline_call(const Expr &call) {
    ResolvedCallee rc = resolve_call(call, m_, cls_, program_);
    if (!rc.cls) {
      warn("unresolved call to '" + call.text + "' at " +
           current_site_.file + ":" + std::to_string(call.span.start_line));
      return;
    }
    auto it = callees_.find({rc.cls->name, rc.method->name});
    if (it == callees_.end())
      return; // no summary yet (first fixpoint round of a recursive SCC)

    std::optional<AccessPath> recv;
    if (!rc.method->is_static)
      recv = try_normalize_path(receiver_expr(call), m_, cls_, program_);

    size_t nidx = call.index_seg_count();
    std::vector<std::optional<AccessPath>> actuals;
    for (size_t i = nidx; i < call.children.size(); ++i) {
      const Expr &arg = call.children[i];
      actuals.push_back(try_normalize_path(arg, m_, cls_, program_));
    }

    TraceFrame frame{rc.cls->name, rc.method->name};
    for (const AccessSnapshot &s : it->second.snapshots) {
      // Cut at the first repeated frame: deeper recursive instances add no
      // new information and would grow traces forever.
      if (std::find(s.trace.begin(), s.trace.end(), frame) != s.trace.end())
        continue;
      auto path = substitute(s.path, *rc.method, recv, actuals);
      if (!path)
        continue;
      AccessSnapshot out;
      out.path = *path;
      out.kind = s.kind;
      for (const auto &lock : s.locks)
        if (auto l = substitute(lock, *rc.method, recv, actuals))
          out.locks.insert(*l);
      out.locks.insert(lock_stack_.begin(), lock_stack_.end());
      out.thread = thread_; // the inlined access runs on the caller's thread
      out.ownership = ownership_of_base(out.path.base);
      out.trace.push_back(frame);
      out.trace.insert(out.trace.end(), s.trace.begin(), s.trace.end());
      out.site = current_site_;
      summary_->snapshots.insert(std::move(out));
    }
  }

  // Emit reads (and inline calls) for every value position in an expression.
  void walk_expr(const Expr &e) {
    switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::NullLit:
      return;
    case ExprKind::PathRead: {
      for (const auto &c : e.children)
        walk_expr(c); // subscript expressions are reads
      if (auto p = try_normalize_path(e, m_, cls_, program_))
        emit(*p, AccessKind::Read);
      return;
    }
    case ExprKind::Call: {
      for (const auto &c : e.children)
        walk_expr(c); // receiver subscripts + arguments
      inline_call(e);
      return;
    }
    case ExprKind::New:
    case ExprKind::NewArray:
    case ExprKind::Unary:
    case ExprKind::Binary:
      for (const auto &c : e.children)
        walk_expr(c);
      return;
    }
  }

  void walk(const std::vector<Stmt> &stmts) {
    for (const auto &s : stmts) {
      current_site_ = s.span;
      switch (s.kind) {
      case StmtKind::LocalDecl:
        if (s.init)
          walk_expr(*s.init);
        break;
      case StmtKind::Assign: {
        walk_expr(*s.value);
        for (const auto &c : s.target->children)
          walk_expr(c); // subscripts on the left-hand side are reads
        if (auto p = try_normalize_path(*s.target, m_, cls_, program_))
          emit(*p, AccessKind::Write);
        break;
      }
      case StmtKind::Sync: {
        AccessPath monitor =
            normalize_path(*s.lock_expr, m_, cls_, program_);
        for (const auto &c : s.lock_expr->children)
          walk_expr(c);
        lock_stack_.push_back(monitor);
        walk(s.body);
        lock_stack_.pop_back();
        current_site_ = s.span;
        break;
      }
      case StmtKind::If:
        walk_expr(*s.cond);
        walk(s.body);
        walk(s.else_body);
        break;
      case StmtKind::While:
        walk_expr(*s.cond);
        walk(s.body);
        break;
      case StmtKind::Call:
      case StmtKind::ExprStmt:
      case StmtKind::Return:
        if (s.value)
          walk_expr(*s.value);
        break;
      }
    }
  }

  const MethodDecl &m_;
  const ClassDecl &cls_;
  const Program &program_;
  const SummaryMap &callees_;
  ThreadKind thread_;
  std::vector<std::string> *warnings_;

  MethodSummary *summary_ = nullptr;
  std::vector<AccessPath> lock_stack_;
  std::set<std::string> fresh_locals_;
  SourceSpan current_site_;
};

} // namespace

MethodSummary analyze_method(const MethodDecl &m, const ClassDecl &cls,
                             const Program &program, const SummaryMap &callees,
                             ThreadKind thread,
                             std::vector<std::string> *warnings) {
  return MethodAnalyzer(m, cls, program, callees, thread, warnings).run();
}

// ---------------------------------------------------------------------------
// Whole-program fixpoint

namespace {

// Tarjan's strongly-connected components over method keys.  Components are
// emitted callees-first, which is exactly the bottom-up order the summary
// computation needs.
struct Tarjan {
  const std::map<MethodKey, std::set<MethodKey>> &g;
  std::map<MethodKey, int> index, low;
  std::map<MethodKey, bool> on_stack;
  std::vector<MethodKey> stack;
  std::vector<std::vector<MethodKey>> sccs;
  int next = 0;

  explicit Tarjan(const std::map<MethodKey, std::set<MethodKey>> &g_) : g(g_) {
    for (const auto &[k, _] : g)
      if (!index.count(k))
        visit(k);
  }

  void visit(const MethodKey &v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on_stack[v] = true;
    auto it = g.find(v);
    if (it != g.end()) {
      for (const auto &w : it->second) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<MethodKey> scc;
      for (;;) {
        MethodKey w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(w);
        if (w == v)
          break;
      }
      std::sort(scc.begin(), scc.end());
      sccs.push_back(std::move(scc));
    }
  }
};

} // namespace

AnalysisResult analyze_program(const Program &p) {
  AnalysisResult result;
  result.scope = infer_scope(p);
  auto tks = thread_kinds(p, result.scope);
  auto g = call_graph(p);

  std::map<MethodKey, std::pair<const ClassDecl *, const MethodDecl *>> decls;
  for (const auto &cls : p.classes)
    for (const auto &m : cls.methods)
      decls[{cls.name, m.name}] = {&cls, &m};

  Tarjan scc(g);
  for (const auto &component : scc.sccs) {
    // Iterate the component to a fixed point.  Snapshot sets only grow, and
    // trace cutting keeps the domain finite, so this terminates.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto &key : component) {
        auto d = decls.find(key);
        if (d == decls.end())
          continue;
        MethodSummary next =
            analyze_method(*d->second.second, *d->second.first, p,
                           result.summaries, tks[key], &result.warnings);
        auto cur = result.summaries.find(key);
        if (cur == result.summaries.end() ||
            cur->second.snapshots != next.snapshots) {
          result.summaries[key] = std::move(next);
          changed = true;
        }
      }
    }
  }

  // Deduplicate warnings accumulated across fixpoint rounds.
  std::sort(result.warnings.begin(), result.warnings.end());
  result.warnings.erase(
      std::unique(result.warnings.begin(), result.warnings.end()),
      result.warnings.end());
  return result;
}

} // namespace racefix
