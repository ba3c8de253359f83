#include "racefix/lower.hpp"

#include "racefix/diagnostics.hpp"
#include "racefix/paths.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>

namespace racefix {

namespace {

// (index, branch) steps from a method body down to a statement: index picks
// the statement in the current list, branch picks which of its child lists
// the path continues into (0 = body, 1 = else).  The final element's branch
// is unused.
using TreePath = std::vector<std::pair<size_t, int>>;

bool locate_stmt(const std::vector<Stmt> &list, const SourceSpan &site,
                 TreePath &path) {
  for (size_t i = 0; i < list.size(); ++i) {
    path.emplace_back(i, 0);
    if (list[i].span == site) // spans compare by file + start position
      return true;
    if (locate_stmt(list[i].body, site, path))
      return true;
    path.back().second = 1;
    if (locate_stmt(list[i].else_body, site, path))
      return true;
    path.pop_back();
  }
  return false;
}

std::vector<Stmt> *list_at(std::vector<Stmt> &body, const TreePath &prefix) {
  std::vector<Stmt> *list = &body;
  for (const auto &[index, branch] : prefix) {
    Stmt &s = (*list)[index];
    list = branch == 0 ? &s.body : &s.else_body;
  }
  return list;
}

const std::vector<Stmt> *list_at(const std::vector<Stmt> &body,
                                 const TreePath &prefix) {
  return list_at(const_cast<std::vector<Stmt> &>(body), prefix);
}

// Does `name` occur as the root of any path/call in these statements?
bool uses_name(const std::vector<Stmt> &stmts, const std::string &name) {
  std::function<bool(const Expr &)> in_expr = [&](const Expr &e) {
    if ((e.kind == ExprKind::PathRead || e.kind == ExprKind::Call) &&
        e.base == name)
      return true;
    for (const auto &c : e.children)
      if (in_expr(c))
        return true;
    return false;
  };
  for (const auto &s : stmts) {
    for (const auto *e : {&s.init, &s.target, &s.value, &s.lock_expr, &s.cond})
      if (e->has_value() && in_expr(**e))
        return true;
    if (uses_name(s.body, name) || uses_name(s.else_body, name))
      return true;
  }
  return false;
}

std::string span_text(const SourceSpan &s) {
  return s.file + ":" + std::to_string(s.start_line) + ":" +
         std::to_string(s.start_col);
}

} // namespace

std::vector<AstAction> insert_lock(const PatchAction &sync,
                                   const Program &program) {
  assert(sync.kind == PatchAction::Kind::Sync && !sync.targets.empty());
  const std::string &cls_name = sync.targets.front().cls;
  const std::string &method_name = sync.targets.front().method;
  for (const auto &t : sync.targets) {
    (void)t;
    assert(t.cls == cls_name && t.method == method_name &&
           "SYNC merged across methods");
  }

  const ClassDecl *cls = program.find_class(cls_name);
  const MethodDecl *method = cls ? cls->find_method(method_name) : nullptr;
  if (!method)
    throw StalePatchError("method " + cls_name + "." + method_name +
                          " no longer exists");

  std::vector<TreePath> paths;
  for (const auto &t : sync.targets) {
    TreePath p;
    if (!locate_stmt(method->body, t.snapshot.site, p))
      throw StalePatchError("no statement at " + span_text(t.snapshot.site) +
                            " in " + cls_name + "." + method_name);
    paths.push_back(std::move(p));
  }

  // Longest common prefix of all target paths: agreement on both the
  // statement index and the child branch the path continues through.
  size_t common = paths.front().size();
  for (const auto &p : paths)
    common = std::min(common, p.size());
  for (size_t d = 0; d < common; ++d) {
    for (const auto &p : paths) {
      if (p[d] != paths.front()[d]) {
        common = d;
        break;
      }
    }
  }

  // The slice: the smallest run of siblings covering every target.
  TreePath prefix;
  size_t lo, hi;
  bool ancestor_is_target =
      std::any_of(paths.begin(), paths.end(),
                  [&](const TreePath &p) { return p.size() == common; });
  if (ancestor_is_target) {
    // One target is the statement every other path runs through; wrapping
    // that statement alone covers the whole cluster.
    assert(common > 0 && "located paths are never empty");
    prefix.assign(paths.front().begin(),
                  paths.front().begin() + static_cast<long>(common) - 1);
    lo = hi = paths.front()[common - 1].first;
  } else {
    // Targets diverge below the prefix.  Covering the statement index range
    // at that level also covers divergence by branch (then vs else), since
    // the whole statement is wrapped either way.
    prefix.assign(paths.front().begin(),
                  paths.front().begin() + static_cast<long>(common));
    lo = hi = paths.front()[common].first;
    for (const auto &p : paths) {
      lo = std::min(lo, p[common].first);
      hi = std::max(hi, p[common].first);
    }
  }

  const std::vector<Stmt> &list = *list_at(method->body, prefix);

  // Hoist local declarations that outlive the wrapped region: the
  // declaration moves out, its initializer stays inside as an assignment.
  std::vector<Stmt> after(list.begin() + static_cast<long>(hi) + 1,
                          list.end());
  std::vector<Stmt> hoisted;
  std::vector<Stmt> inner;
  for (size_t i = lo; i <= hi; ++i) {
    const Stmt &s = list[i];
    if (s.kind == StmtKind::LocalDecl && uses_name(after, s.decl_name)) {
      Stmt decl;
      decl.kind = StmtKind::LocalDecl;
      decl.decl_type = s.decl_type;
      decl.decl_name = s.decl_name;
      hoisted.push_back(std::move(decl));
      if (s.init) {
        Stmt assign;
        assign.kind = StmtKind::Assign;
        Expr target;
        target.kind = ExprKind::PathRead;
        target.base = s.decl_name;
        assign.target = std::move(target);
        assign.value = s.init;
        inner.push_back(std::move(assign));
      }
      continue;
    }
    inner.push_back(s);
  }

  Stmt wrap;
  wrap.kind = StmtKind::Sync;
  wrap.lock_expr = path_to_expr(sync.lock); // throws on wildcard locks
  wrap.body = std::move(inner);

  std::vector<AstAction> out;
  if (!hoisted.empty()) {
    AstAction ins;
    ins.kind = AstAction::Kind::InsertBefore;
    ins.ref = StmtLoc{cls_name, method_name, list[lo].id, list[lo].id};
    ins.stmts = std::move(hoisted);
    out.push_back(std::move(ins));
  }
  AstAction rep;
  rep.kind = AstAction::Kind::Replace;
  rep.ref = StmtLoc{cls_name, method_name, list[lo].id, list[hi].id};
  rep.stmts = {std::move(wrap)};
  out.push_back(std::move(rep));
  return out;
}

AstAction declare_variable(const std::string &cls, const std::string &name,
                           const std::string &type,
                           const std::vector<PatchAction> &peer_syncs,
                           const Program &program) {
  const ClassDecl *decl_cls = program.find_class(cls);
  if (!decl_cls)
    throw StalePatchError("class " + cls + " no longer exists");
  std::map<std::string, int> used;
  collect_identifiers(*decl_cls, used);
  if (used.count(name))
    throw FreshNameError("name " + name + " already used in class " + cls);

  bool is_static = false;
  for (const auto &sync : peer_syncs) {
    if (sync.kind != PatchAction::Kind::Sync)
      continue;
    if (program.find_class(sync.lock.base))
      is_static = true; // lock spelled through the class name
    for (const auto &t : sync.targets) {
      const ClassDecl *tc = program.find_class(t.cls);
      const MethodDecl *tm = tc ? tc->find_method(t.method) : nullptr;
      if (tm && tm->is_static)
        is_static = true;
    }
  }

  FieldDecl field;
  field.name = name;
  field.type = type;
  field.visibility = Visibility::None;
  field.is_static = is_static;
  field.is_final = true;
  Expr init;
  init.kind = ExprKind::New;
  init.text = type;
  field.init = std::move(init);

  AstAction act;
  act.kind = AstAction::Kind::InsertBefore;
  act.ref = MemberAnchor{cls};
  act.field = std::move(field);
  return act;
}

std::vector<AstAction> make_volatile(const std::string &field,
                                     const std::string &cls,
                                     const Program &program,
                                     std::vector<std::string> &warnings) {
  const ClassDecl *c = program.find_class(cls);
  const FieldDecl *f = c ? c->find_field(field) : nullptr;
  if (!f)
    throw StalePatchError("field " + cls + "." + field + " no longer exists");
  if (f->is_volatile)
    return {};
  if (is_array_type(f->type))
    warnings.push_back("volatile on array field " + cls + "." + field +
                       " guards the reference, not the elements");
  FieldDecl updated = *f;
  updated.is_volatile = true;

  AstAction act;
  act.kind = AstAction::Kind::Replace;
  act.ref = FieldLoc{cls, field};
  act.field = std::move(updated);
  return {act};
}

namespace {

// Merge SYNCs that share a lock and a target method (Algorithm 2's
// normalization); everything else passes through in order.
PatchAlternative merge_syncs(const PatchAlternative &alt) {
  PatchAlternative out;
  out.is_volatile = alt.is_volatile;
  std::map<std::tuple<std::string, std::string, std::string>, size_t> index;
  for (const auto &action : alt.actions) {
    if (action.kind != PatchAction::Kind::Sync) {
      out.actions.push_back(action);
      continue;
    }
    auto key = std::make_tuple(action.targets.front().cls,
                               action.targets.front().method,
                               action.lock.render());
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.actions.size());
      out.actions.push_back(action);
    } else {
      auto &targets = out.actions[it->second].targets;
      targets.insert(targets.end(), action.targets.begin(),
                     action.targets.end());
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()),
                    targets.end());
    }
  }
  return out;
}

} // namespace

AstPatch create_patch(const PatchEncoding &enc, const Program &program) {
  AstPatch patch;
  patch.cluster_path = enc.cluster_path;
  patch.cluster_cls = enc.cluster_cls;

  for (const auto &raw_alt : enc.alternatives) {
    PatchAlternative alt = merge_syncs(raw_alt);
    AstAlternative lowered;
    lowered.dsl = render_dsl(alt);
    lowered.is_volatile = alt.is_volatile;
    bool usable = true;
    for (const auto &action : alt.actions) {
      switch (action.kind) {
      case PatchAction::Kind::Sync:
        try {
          for (auto &a : insert_lock(action, program))
            lowered.actions.push_back(std::move(a));
        } catch (const NotAPathError &) {
          // A lock containing an array wildcard has no monitor expression at
          // this target; the alternative cannot be applied here.
          usable = false;
        }
        break;
      case PatchAction::Kind::Declare:
        lowered.actions.push_back(declare_variable(
            action.cls, action.var, action.type, alt.actions, program));
        break;
      case PatchAction::Kind::Volatile:
        for (auto &a : make_volatile(action.var, action.cls, program,
                                     lowered.warnings))
          lowered.actions.push_back(std::move(a));
        break;
      case PatchAction::Kind::Nil:
        break;
      }
      if (!usable)
        break;
    }
    if (!usable)
      continue;
    // Different locks in one method can demand overlapping wrap regions;
    // such an alternative has no consistent application order.  Probe the
    // whole alternative once and drop it if its actions collide.
    try {
      apply_patch(program, lowered);
    } catch (const ConflictError &) {
      continue;
    }
    patch.alternatives.push_back(std::move(lowered));
  }
  return patch;
}

// ---------------------------------------------------------------------------
// Application

namespace {

void assign_fresh_ids(std::vector<Stmt> &stmts, Program &p) {
  for (auto &s : stmts) {
    if (s.id < 0)
      s.id = p.fresh_stmt_id();
    assign_fresh_ids(s.body, p);
    assign_fresh_ids(s.else_body, p);
  }
}

// Find the sibling list holding both ids of a StmtLoc, anywhere in a method.
struct RunLoc {
  std::vector<Stmt> *list = nullptr;
  size_t lo = 0, hi = 0;
};

bool find_run(std::vector<Stmt> &list, int first_id, int last_id, RunLoc &out) {
  for (size_t i = 0; i < list.size(); ++i) {
    if (list[i].id == first_id) {
      for (size_t j = i; j < list.size(); ++j) {
        if (list[j].id == last_id) {
          out = {&list, i, j};
          return true;
        }
      }
      return false;
    }
    if (find_run(list[i].body, first_id, last_id, out) ||
        find_run(list[i].else_body, first_id, last_id, out))
      return true;
  }
  return false;
}

struct StmtOp {
  AstAction::Kind kind;
  RunLoc run;
  std::vector<Stmt> stmts;
  size_t splice_index() const {
    return kind == AstAction::Kind::InsertAfter ? run.hi + 1 : run.lo;
  }
};

} // namespace

Program apply_patch(const Program &program, const AstAlternative &alt) {
  Program out = program;

  // Member-level edits are independent of statement ids; statement edits are
  // grouped per method so positions resolve against the untouched list.
  std::map<std::pair<std::string, std::string>, std::vector<const AstAction *>>
      stmt_actions;
  std::vector<const AstAction *> member_actions;
  for (const auto &action : alt.actions) {
    if (std::holds_alternative<StmtLoc>(action.ref))
      stmt_actions[{std::get<StmtLoc>(action.ref).cls,
                    std::get<StmtLoc>(action.ref).method}]
          .push_back(&action);
    else
      member_actions.push_back(&action);
  }

  for (auto &[key, actions] : stmt_actions) {
    ClassDecl *cls = out.find_class(key.first);
    MethodDecl *method = cls ? cls->find_method(key.second) : nullptr;
    if (!method)
      throw StalePatchError("method " + key.first + "." + key.second +
                            " no longer exists");

    std::vector<StmtOp> ops;
    for (const AstAction *action : actions) {
      const StmtLoc &loc = std::get<StmtLoc>(action->ref);
      StmtOp op;
      op.kind = action->kind;
      if (!find_run(method->body, loc.first_id, loc.last_id, op.run))
        throw StalePatchError("statements " + std::to_string(loc.first_id) +
                              ".." + std::to_string(loc.last_id) + " in " +
                              key.first + "." + key.second +
                              " no longer exist");
      op.stmts = action->stmts;
      ops.push_back(std::move(op));
    }

    // No two replacements may overlap, and no insertion may land strictly
    // inside a replaced run.
    for (size_t i = 0; i < ops.size(); ++i) {
      for (size_t j = 0; j < ops.size(); ++j) {
        if (i == j || ops[i].run.list != ops[j].run.list)
          continue;
        const StmtOp &a = ops[i];
        const StmtOp &b = ops[j];
        if (a.kind == AstAction::Kind::Replace &&
            b.kind == AstAction::Kind::Replace && i < j &&
            a.run.lo <= b.run.hi && b.run.lo <= a.run.hi)
          throw ConflictError("overlapping replacements in " + key.first +
                              "." + key.second);
        if (a.kind == AstAction::Kind::Replace &&
            b.kind != AstAction::Kind::Replace &&
            b.splice_index() > a.run.lo && b.splice_index() <= a.run.hi)
          throw ConflictError("insertion inside replaced region in " +
                              key.first + "." + key.second);
      }
    }

    // Back-to-front so earlier indices stay valid; at equal positions the
    // replacement goes first, leaving insertions physically before it.
    std::stable_sort(ops.begin(), ops.end(), [](const StmtOp &a,
                                                const StmtOp &b) {
      if (a.run.list != b.run.list)
        return a.run.list > b.run.list;
      if (a.splice_index() != b.splice_index())
        return a.splice_index() > b.splice_index();
      return a.kind == AstAction::Kind::Replace &&
             b.kind != AstAction::Kind::Replace;
    });

    for (auto &op : ops) {
      std::vector<Stmt> payload = op.stmts;
      assign_fresh_ids(payload, out);
      auto &list = *op.run.list;
      auto insert_at = list.begin() + static_cast<long>(op.splice_index());
      if (op.kind == AstAction::Kind::Replace) {
        auto first = list.begin() + static_cast<long>(op.run.lo);
        auto last = list.begin() + static_cast<long>(op.run.hi) + 1;
        auto pos = list.erase(first, last);
        list.insert(pos, payload.begin(), payload.end());
      } else {
        list.insert(insert_at, payload.begin(), payload.end());
      }
    }
  }

  // Field edits; reversed so several front-insertions keep action order.
  for (auto it = member_actions.rbegin(); it != member_actions.rend(); ++it) {
    const AstAction &action = **it;
    assert(action.field.has_value());
    if (std::holds_alternative<MemberAnchor>(action.ref)) {
      ClassDecl *cls = out.find_class(std::get<MemberAnchor>(action.ref).cls);
      if (!cls)
        throw StalePatchError("class " +
                              std::get<MemberAnchor>(action.ref).cls +
                              " no longer exists");
      cls->fields.insert(cls->fields.begin(), *action.field);
    } else {
      const FieldLoc &loc = std::get<FieldLoc>(action.ref);
      ClassDecl *cls = out.find_class(loc.cls);
      FieldDecl *field = nullptr;
      if (cls)
        for (auto &f : cls->fields)
          if (f.name == loc.field)
            field = &f;
      if (!field)
        throw StalePatchError("field " + loc.cls + "." + loc.field +
                              " no longer exists");
      *field = *action.field;
    }
  }

  return out;
}

} // namespace racefix
