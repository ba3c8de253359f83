// Access-path normalization and the little static-type walker both the
// analysis and the patch planner rely on.
//
// Normalization turns a path-shaped expression into its analysis normal form:
// array subscripts become the wildcard element `[*]`, and a bare identifier
// base is resolved against the enclosing scope — locals and parameters keep
// their name, instance fields gain a `this.` root, static fields gain a
// `<ClassName>.` root, and known class names stand for themselves (statics).
#pragma once

#include "racefix/ast.hpp"

#include <optional>
#include <string>
#include <vector>

namespace racefix {

// Scope-aware normalization.  Throws NotAPathError for expressions that are
// not path-shaped (arithmetic, literals, calls, new, ...).
AccessPath normalize_path(const Expr &expr, const MethodDecl &method,
                          const ClassDecl &cls, const Program &program);

// Same, but returns nothing instead of throwing.
std::optional<AccessPath> try_normalize_path(const Expr &expr,
                                             const MethodDecl &method,
                                             const ClassDecl &cls,
                                             const Program &program);

// Static type of the location a normalized path denotes, or "" when the walk
// leaves the known world (unknown base, unknown field, primitive prefix).
// `this` resolves to `self` under the path's owner class.
std::string type_of_path(const AccessPath &p, const MethodDecl &method,
                         const ClassDecl &cls, const Program &program);

// Every user-declared class type traversed while walking the path (including
// the terminal type when it is a class).  Used for scope inference.
std::vector<std::string> class_types_on_path(const AccessPath &p,
                                             const MethodDecl &method,
                                             const ClassDecl &cls,
                                             const Program &program);

// The class declaring the path's terminal field, resolved by walking the
// type chain; "" when unresolvable.
std::string declaring_class_of_terminal(const AccessPath &p,
                                        const ClassDecl &owner,
                                        const Program &program);

// Declaration of the path's terminal field (nullptr when the path ends in a
// subscript or the type walk fails).  Resolves locals and parameters through
// `method`.  When non-null and `declaring_cls` is given, it receives the name
// of the class holding the field.
const FieldDecl *terminal_field_decl(const AccessPath &p,
                                     const MethodDecl &method,
                                     const ClassDecl &cls,
                                     const Program &program,
                                     std::string *declaring_cls);

} // namespace racefix
