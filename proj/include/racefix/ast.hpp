// AST for MiniJava-CC, the concurrent mini-language the analysis and repair
// operate on.  The language is a small Java subset: classes with fields and
// methods, `implements Runnable`, `synchronized` blocks/methods, assignments,
// locals, if/while, calls, and `new`.  All nodes are plain value types and
// freely copyable; a Program is immutable by convention once built (patches
// produce new Programs).
//
// Two path notions coexist:
//   * path-shaped *expressions* (Expr with base + segments) keep the original
//     surface syntax, including array index expressions, for faithful
//     re-rendering;
//   * AccessPath is the analysis-level normal form where every array
//     subscript is erased to the wildcard element `[*]`.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace racefix {

// ---------------------------------------------------------------------------
// Source locations

struct SourceSpan {
  std::string file;
  int start_line = 0, start_col = 0;
  int end_line = 0, end_col = 0;

  // Comparisons and identity throughout the pipeline key on the *start*
  // point only: that is all the JSON site schema carries, and using the same
  // key everywhere keeps exported and freshly computed artifacts aligned.
  friend bool operator==(const SourceSpan &a, const SourceSpan &b) {
    return a.file == b.file && a.start_line == b.start_line &&
           a.start_col == b.start_col;
  }
  friend bool operator<(const SourceSpan &a, const SourceSpan &b) {
    if (a.file != b.file)
      return a.file < b.file;
    if (a.start_line != b.start_line)
      return a.start_line < b.start_line;
    return a.start_col < b.start_col;
  }
};

// ---------------------------------------------------------------------------
// Access paths (normalized)

struct AccessPath {
  std::string base;                  // local/param name, "this", or class name
  std::vector<std::string> elements; // field names; kWildcard for subscripts

  static constexpr const char *kWildcard = "[*]";

  AccessPath() = default;
  explicit AccessPath(std::string b, std::vector<std::string> es = {})
      : base(std::move(b)), elements(std::move(es)) {}

  // Number of components including the base; `this.a.b` has length 3.
  size_t length() const { return 1 + elements.size(); }

  bool has_wildcard() const {
    for (const auto &e : elements)
      if (e == kWildcard)
        return true;
    return false;
  }

  bool is_prefix_of(const AccessPath &other) const {
    if (base != other.base || elements.size() > other.elements.size())
      return false;
    for (size_t i = 0; i < elements.size(); ++i)
      if (elements[i] != other.elements[i])
        return false;
    return true;
  }

  // Dotted display form, e.g. "this.accounts.[*].balance".
  std::string render() const {
    std::string out = base;
    for (const auto &e : elements) {
      out += '.';
      out += e;
    }
    return out;
  }

  friend bool operator==(const AccessPath &a, const AccessPath &b) {
    return a.base == b.base && a.elements == b.elements;
  }
  friend bool operator!=(const AccessPath &a, const AccessPath &b) {
    return !(a == b);
  }
  friend bool operator<(const AccessPath &a, const AccessPath &b) {
    if (a.base != b.base)
      return a.base < b.base;
    return a.elements < b.elements;
  }
};

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  IntLit,
  BoolLit,
  NullLit,
  PathRead, // base + segments, e.g. accounts[i].balance
  Call,     // receiver segments + method name + args
  New,      // new T(args)
  NewArray, // new T[size]
  Unary,    // op operand
  Binary,   // lhs op rhs
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceSpan span;

  long long int_value = 0; // IntLit
  bool bool_value = false; // BoolLit

  // Unary/Binary: operator spelling.  New/NewArray: type name.  Call: method
  // name.
  std::string text;

  // Path-shaped payload (PathRead, and the receiver of Call).  A segment is
  // either a field name or an array subscript; subscript segments consume the
  // next entry of the index-expression block in `children` (in order).
  struct Seg {
    std::string field; // empty when is_index
    bool is_index = false;
  };
  std::string base; // "", "this", identifier, or class name
  std::vector<Seg> segs;

  // Child layout by kind:
  //   PathRead: index expressions, one per index segment, in order.
  //   Call:     receiver index expressions first, then the arguments.
  //   New:      constructor arguments (normally none).
  //   NewArray: exactly one size expression.
  //   Unary:    one operand.  Binary: lhs, rhs.
  std::vector<Expr> children;

  // Call only: whether the source spelled a receiver (`a.m()` vs `m()`).
  bool explicit_receiver = false;

  size_t index_seg_count() const {
    size_t n = 0;
    for (const auto &s : segs)
      if (s.is_index)
        ++n;
    return n;
  }
};

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
  LocalDecl, // T x; | T x = init;
  Assign,    // path = expr;
  Sync,      // synchronized(path) { body }
  If,        // if (cond) { body } else { else_body }
  While,     // while (cond) { body }
  Call,      // expr statement that is a call
  Return,    // return; | return expr;
  ExprStmt,  // any other expression statement
};

struct Stmt {
  StmtKind kind = StmtKind::ExprStmt;
  int id = -1; // unique within a Program; stable until re-parse
  SourceSpan span;

  // LocalDecl
  std::string decl_type, decl_name;
  std::optional<Expr> init;

  // Assign target (path-shaped Expr so index expressions survive rendering)
  std::optional<Expr> target;

  // Assign rhs / Return value / Call expression / ExprStmt expression
  std::optional<Expr> value;

  // Sync monitor (path-shaped Expr)
  std::optional<Expr> lock_expr;

  // If/While condition
  std::optional<Expr> cond;

  std::vector<Stmt> body;      // Sync body / If then / While body
  std::vector<Stmt> else_body; // If only
};

// ---------------------------------------------------------------------------
// Declarations

enum class Visibility { None, Public, Private, Protected };

struct Param {
  std::string type, name;
};

struct FieldDecl {
  std::string name, type;
  Visibility visibility = Visibility::None;
  bool is_static = false;
  bool is_final = false;
  bool is_volatile = false;
  std::optional<Expr> init;
  SourceSpan span;
};

struct MethodDecl {
  std::string name;
  std::string return_type = "void";
  Visibility visibility = Visibility::None;
  bool is_static = false;
  bool is_synchronized = false;
  std::vector<Param> params;
  std::vector<Stmt> body;
  SourceSpan span;

  int param_index(const std::string &name_) const {
    for (size_t i = 0; i < params.size(); ++i)
      if (params[i].name == name_)
        return static_cast<int>(i);
    return -1;
  }
};

struct ClassDecl {
  std::string name;
  std::vector<std::string> annotations; // e.g. "ThreadSafe"
  bool implements_runnable = false;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  SourceSpan span;

  bool has_annotation(const std::string &a) const {
    for (const auto &x : annotations)
      if (x == a)
        return true;
    return false;
  }
  const FieldDecl *find_field(const std::string &n) const {
    for (const auto &f : fields)
      if (f.name == n)
        return &f;
    return nullptr;
  }
  const MethodDecl *find_method(const std::string &n) const {
    for (const auto &m : methods)
      if (m.name == n)
        return &m;
    return nullptr;
  }
  MethodDecl *find_method(const std::string &n) {
    for (auto &m : methods)
      if (m.name == n)
        return &m;
    return nullptr;
  }
};

struct Program {
  std::vector<ClassDecl> classes;
  std::string source_name;
  int next_stmt_id = 0; // patches draw fresh statement ids from here

  const ClassDecl *find_class(const std::string &n) const {
    for (const auto &c : classes)
      if (c.name == n)
        return &c;
    return nullptr;
  }
  ClassDecl *find_class(const std::string &n) {
    for (auto &c : classes)
      if (c.name == n)
        return &c;
    return nullptr;
  }
  int fresh_stmt_id() { return next_stmt_id++; }
};

// ---------------------------------------------------------------------------
// Small AST helpers used by several passes (defined in paths.cpp)

// Strip trailing "[]" pairs from a type name: "Account[]" -> "Account".
std::string element_type(const std::string &type_name);

bool is_array_type(const std::string &type_name);

// Normal form of a path-shaped expression *without* scope resolution: keeps
// the written base, erases subscripts to [*].  Returns nothing for
// non-path-shaped expressions.
std::optional<AccessPath> raw_path_of(const Expr &e);

// Build a path-shaped Expr (no index expressions) from a normalized path.
// The path must be wildcard-free.
Expr path_to_expr(const AccessPath &p);

// Recursively search a statement list for the statement with the given id.
// Returns nullptr if absent.
const Stmt *find_stmt_by_id(const std::vector<Stmt> &stmts, int id);

// Recursively search for the statement whose span *start* equals `at`.
const Stmt *find_stmt_at(const std::vector<Stmt> &stmts, const SourceSpan &at);

// All identifiers appearing anywhere in a class (field/method/param/local
// names plus every path base and segment).  Used for fresh-name selection.
void collect_identifiers(const ClassDecl &cls, std::map<std::string, int> &out);

} // namespace racefix
