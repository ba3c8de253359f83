#pragma once

#include "racefix/ast.hpp"
#include "racefix/race.hpp"
#include "racefix/repair.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace racefix {

// Entry point behind main(): parses `args` (without the program name) and
// executes one subcommand.  All I/O goes through the given streams so tests
// can drive the tool in-process.
// Exit codes: 0 clean/fixed, 1 bugs remain or fix incomplete, 2 usage or
// input errors.
int run(const std::vector<std::string> &args, std::istream &in,
        std::ostream &out, std::ostream &err);

// Numbered patch menu over `in`/`out`: shows DSL and diff per alternative,
// re-prompts on invalid input, aborts (-1) on EOF, 'q', or the third invalid
// answer.
InteractiveSelector make_interactive_selector(std::istream &in,
                                              std::ostream &out);

// Parse and merge the given source files into one program (classes may
// reference each other across files).  Throws on unreadable input, parse
// errors, or duplicate class names.
Program load_program(const std::vector<std::string> &files);

// Human-readable reports (one line per bug / cycle).
std::string render_bugs_text(const std::vector<Bug> &bugs);
std::string
render_cycles_text(const std::vector<std::vector<AccessPath>> &cycles);

} // namespace racefix
