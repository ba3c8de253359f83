#pragma once

#include "racefix/ast.hpp"
#include "racefix/synth.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace racefix {

// A contiguous run of sibling statements in one method, addressed by the
// stable ids of its first and last statement.
struct StmtLoc {
  std::string cls;
  std::string method;
  int first_id = -1;
  int last_id = -1;
};

// A field declaration addressed by name.
struct FieldLoc {
  std::string cls;
  std::string field;
};

// The member-insertion point at the top of a class body.
struct MemberAnchor {
  std::string cls;
};

using NodeRef = std::variant<StmtLoc, FieldLoc, MemberAnchor>;

// One tree edit.  Statement payloads apply to StmtLoc refs, the field
// payload to FieldLoc/MemberAnchor refs.
struct AstAction {
  enum class Kind { Replace, InsertBefore, InsertAfter };

  Kind kind = Kind::Replace;
  NodeRef ref;
  std::vector<Stmt> stmts;
  std::optional<FieldDecl> field;
};

// One applicable fix lowered to tree edits, with its source-level reading.
struct AstAlternative {
  std::vector<AstAction> actions;
  std::string dsl;
  bool is_volatile = false;
  std::vector<std::string> warnings;

  size_t cost() const { return actions.size(); }
};

// All lowered fixes for one cluster, candidate order preserved.
struct AstPatch {
  AccessPath cluster_path;
  std::string cluster_cls;
  std::vector<AstAlternative> alternatives;
};

// Wrap the statements a SYNC action names in `synchronized(lock) { ... }`.
// The wrapped region is the smallest run of sibling statements covering all
// targets; local declarations used after that region are hoisted out, their
// initializers staying inside as assignments.
std::vector<AstAction> insert_lock(const PatchAction &sync,
                                   const Program &program);

// New `final <type> <name> = new <type>();` field at the top of `cls`;
// static when any peer SYNC lands in a static method or the lock is rooted
// at a class name.
AstAction declare_variable(const std::string &cls, const std::string &name,
                           const std::string &type,
                           const std::vector<PatchAction> &peer_syncs,
                           const Program &program);

// Add `volatile` to the field's declaration; empty when already volatile.
std::vector<AstAction> make_volatile(const std::string &field,
                                     const std::string &cls,
                                     const Program &program,
                                     std::vector<std::string> &warnings);

// Lower a whole encoding: merge SYNCs sharing (lock, method), then map each
// alternative's actions to tree edits.
AstPatch create_patch(const PatchEncoding &enc, const Program &program);

// Apply one alternative, producing a new program.  The input program is not
// modified.  Throws StalePatchError when a ref no longer exists and
// ConflictError when two edits overlap.
Program apply_patch(const Program &program, const AstAlternative &alt);

} // namespace racefix
