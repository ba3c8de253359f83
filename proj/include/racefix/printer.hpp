// Canonical source printer.  render_program is the single formatting
// authority: patches are materialized by editing the AST and re-rendering, and
// parse(render(p)) is structurally identical to p.
#pragma once

#include "racefix/ast.hpp"

#include <string>

namespace racefix {

std::string render_program(const Program &p);
std::string render_expr(const Expr &e);

} // namespace racefix
