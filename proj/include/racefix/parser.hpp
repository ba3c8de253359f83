// Recursive-descent parser for MiniJava-CC.
//
// Grammar sketch (braces are mandatory on all bodies, which makes locking
// lexically balanced by construction):
//
//   program    := class*
//   class      := ('@' IDENT)* 'class' IDENT ('implements' 'Runnable')?
//                 '{' member* '}'
//   member     := modifier* type IDENT ( field-rest | method-rest )
//   field-rest := ('=' expr)? ';'
//   method-rest:= '(' (type IDENT (',' type IDENT)*)? ')' block
//   type       := (IDENT | 'void') ('[' ']')*
//   block      := '{' stmt* '}'
//   stmt       := type IDENT ('=' expr)? ';'              (local declaration)
//              |  pathexpr '=' expr ';'                    (assignment)
//              |  pathexpr-call ';'                        (call statement)
//              |  'synchronized' '(' pathexpr ')' block
//              |  'if' '(' expr ')' block ('else' block)?
//              |  'while' '(' expr ')' block
//              |  'return' expr? ';'
//              |  expr ';'
//
// Monitors of synchronized blocks are restricted to path expressions; any
// other expression there is a syntax error.
#pragma once

#include "racefix/ast.hpp"

#include <string>

namespace racefix {

// Parse a whole program.  Deterministic; throws ParseError with location and
// expected-token information on bad syntax, and on duplicate class / member /
// parameter / local names.  `file` is recorded in all spans.
Program parse_program(const std::string &source,
                      const std::string &file = "<memory>");

} // namespace racefix
