#include "racefix/paths.hpp"

#include "racefix/diagnostics.hpp"
#include "racefix/printer.hpp"

#include <functional>

namespace racefix {

// ---------------------------------------------------------------------------
// ast.hpp helpers

std::string element_type(const std::string &type_name) {
  if (is_array_type(type_name))
    return type_name.substr(0, type_name.size() - 2);
  return type_name;
}

bool is_array_type(const std::string &type_name) {
  return type_name.size() >= 2 &&
         type_name.compare(type_name.size() - 2, 2, "[]") == 0;
}

std::optional<AccessPath> raw_path_of(const Expr &e) {
  if (e.kind != ExprKind::PathRead)
    return std::nullopt;
  AccessPath p;
  p.base = e.base;
  for (const auto &seg : e.segs)
    p.elements.push_back(seg.is_index ? AccessPath::kWildcard : seg.field);
  return p;
}

Expr path_to_expr(const AccessPath &p) {
  Expr e;
  e.kind = ExprKind::PathRead;
  e.base = p.base;
  for (const auto &el : p.elements) {
    // Wildcard elements have no source form; callers must filter them out
    // before asking for an expression.
    if (el == AccessPath::kWildcard)
      throw NotAPathError("wildcard element in " + p.render() +
                          " cannot be rendered as source");
    Expr::Seg seg;
    seg.field = el;
    e.segs.push_back(seg);
  }
  return e;
}

const Stmt *find_stmt_by_id(const std::vector<Stmt> &stmts, int id) {
  for (const auto &s : stmts) {
    if (s.id == id)
      return &s;
    if (const Stmt *hit = find_stmt_by_id(s.body, id))
      return hit;
    if (const Stmt *hit = find_stmt_by_id(s.else_body, id))
      return hit;
  }
  return nullptr;
}

const Stmt *find_stmt_at(const std::vector<Stmt> &stmts,
                         const SourceSpan &at) {
  for (const auto &s : stmts) {
    if (s.span == at)
      return &s;
    if (const Stmt *hit = find_stmt_at(s.body, at))
      return hit;
    if (const Stmt *hit = find_stmt_at(s.else_body, at))
      return hit;
  }
  return nullptr;
}

namespace {

void collect_expr_idents(const Expr &e, std::map<std::string, int> &out) {
  if (!e.base.empty())
    ++out[e.base];
  for (const auto &seg : e.segs)
    if (!seg.is_index)
      ++out[seg.field];
  if (!e.text.empty())
    ++out[e.text];
  for (const auto &c : e.children)
    collect_expr_idents(c, out);
}

void collect_stmt_idents(const Stmt &s, std::map<std::string, int> &out) {
  if (!s.decl_name.empty())
    ++out[s.decl_name];
  for (const auto *e : {&s.init, &s.target, &s.value, &s.lock_expr, &s.cond})
    if (e->has_value())
      collect_expr_idents(**e, out);
  for (const auto &c : s.body)
    collect_stmt_idents(c, out);
  for (const auto &c : s.else_body)
    collect_stmt_idents(c, out);
}

} // namespace

void collect_identifiers(const ClassDecl &cls,
                         std::map<std::string, int> &out) {
  ++out[cls.name];
  for (const auto &f : cls.fields) {
    ++out[f.name];
    if (f.init)
      collect_expr_idents(*f.init, out);
  }
  for (const auto &m : cls.methods) {
    ++out[m.name];
    for (const auto &p : m.params)
      ++out[p.name];
    for (const auto &s : m.body)
      collect_stmt_idents(s, out);
  }
}

// ---------------------------------------------------------------------------
// Scope resolution

namespace {

// Declared type of a local, searching the whole method body (local names are
// unique per method by construction).
std::string local_type(const MethodDecl &m, const std::string &name) {
  std::string found;
  std::function<void(const std::vector<Stmt> &)> walk =
      [&](const std::vector<Stmt> &stmts) {
        for (const auto &s : stmts) {
          if (s.kind == StmtKind::LocalDecl && s.decl_name == name)
            found = s.decl_type;
          walk(s.body);
          walk(s.else_body);
        }
      };
  walk(m.body);
  return found;
}

bool is_local_or_param(const MethodDecl &m, const std::string &name) {
  if (m.param_index(name) >= 0)
    return true;
  return !local_type(m, name).empty();
}

} // namespace

std::optional<AccessPath> try_normalize_path(const Expr &expr,
                                             const MethodDecl &method,
                                             const ClassDecl &cls,
                                             const Program &program) {
  auto raw = raw_path_of(expr);
  if (!raw)
    return std::nullopt;
  AccessPath p = *raw;
  if (p.base == "this")
    return p;
  if (is_local_or_param(method, p.base))
    return p;
  if (const FieldDecl *f = cls.find_field(p.base)) {
    // Unqualified field access: root it at `this`, or at the class for
    // statics (and always at the class inside a static method).
    AccessPath rooted;
    rooted.base = (f->is_static || method.is_static) ? cls.name : "this";
    rooted.elements.push_back(p.base);
    rooted.elements.insert(rooted.elements.end(), p.elements.begin(),
                           p.elements.end());
    return rooted;
  }
  if (program.find_class(p.base))
    return p; // static access rooted at a class name
  // Unknown identifier: keep it as written (treated like a local).
  return p;
}

AccessPath normalize_path(const Expr &expr, const MethodDecl &method,
                          const ClassDecl &cls, const Program &program) {
  if (auto p = try_normalize_path(expr, method, cls, program))
    return *p;
  throw NotAPathError(render_expr(expr));
}

// ---------------------------------------------------------------------------
// Type walking

namespace {

// Type of the path's base component; "" if unknown.
std::string base_type(const AccessPath &p, const MethodDecl &method,
                      const ClassDecl &cls, const Program &program) {
  if (p.base == "this")
    return cls.name;
  int pi = method.param_index(p.base);
  if (pi >= 0)
    return method.params[pi].type;
  std::string lt = local_type(method, p.base);
  if (!lt.empty())
    return lt;
  if (program.find_class(p.base))
    return p.base; // class name used as a static root
  return "";
}

std::string step_type(const std::string &current, const std::string &element,
                      const Program &program) {
  if (current.empty())
    return "";
  if (element == AccessPath::kWildcard)
    return is_array_type(current) ? element_type(current) : "";
  const ClassDecl *c = program.find_class(current);
  if (!c)
    return "";
  const FieldDecl *f = c->find_field(element);
  return f ? f->type : "";
}

} // namespace

std::string type_of_path(const AccessPath &p, const MethodDecl &method,
                         const ClassDecl &cls, const Program &program) {
  std::string t = base_type(p, method, cls, program);
  for (const auto &el : p.elements)
    t = step_type(t, el, program);
  return t;
}

std::vector<std::string> class_types_on_path(const AccessPath &p,
                                             const MethodDecl &method,
                                             const ClassDecl &cls,
                                             const Program &program) {
  std::vector<std::string> out;
  std::string t = base_type(p, method, cls, program);
  auto note = [&](const std::string &ty) {
    std::string e = element_type(ty);
    if (program.find_class(e))
      out.push_back(e);
  };
  note(t);
  for (const auto &el : p.elements) {
    t = step_type(t, el, program);
    note(t);
  }
  return out;
}

std::string declaring_class_of_terminal(const AccessPath &p,
                                        const ClassDecl &owner,
                                        const Program &program) {
  // Walk up to (not including) the last non-wildcard element; the type at
  // that point declares the raced field.
  int last_field = -1;
  for (int i = static_cast<int>(p.elements.size()) - 1; i >= 0; --i) {
    if (p.elements[i] != AccessPath::kWildcard) {
      last_field = i;
      break;
    }
  }
  if (last_field < 0)
    return owner.name;

  std::string t = p.base == "this" ? owner.name
                  : program.find_class(p.base) != nullptr ? p.base
                                                          : "";
  // Local/param bases need a method context the caller does not always have;
  // they resolve through the snapshot's owner method in race.cpp before this
  // helper is used.  An unknown base falls back to the owner class.
  if (t.empty())
    return owner.name;
  for (int i = 0; i < last_field; ++i)
    t = step_type(t, p.elements[i], program);
  std::string holder = element_type(t);
  if (program.find_class(holder))
    return holder;
  return owner.name;
}

const FieldDecl *terminal_field_decl(const AccessPath &p,
                                     const MethodDecl &method,
                                     const ClassDecl &cls,
                                     const Program &program,
                                     std::string *declaring_cls) {
  if (p.elements.empty() || p.elements.back() == AccessPath::kWildcard)
    return nullptr;
  std::string t = base_type(p, method, cls, program);
  for (size_t i = 0; i + 1 < p.elements.size(); ++i)
    t = step_type(t, p.elements[i], program);
  const ClassDecl *holder = program.find_class(element_type(t));
  if (!holder)
    return nullptr;
  const FieldDecl *f = holder->find_field(p.elements.back());
  if (f && declaring_cls)
    *declaring_cls = holder->name;
  return f;
}

} // namespace racefix
