// Hand-rolled lexer for MiniJava-CC.  Produces the whole token stream up
// front; the parser indexes into it with one token of lookahead (two in the
// local-declaration case).
#pragma once

#include <string>
#include <vector>

namespace racefix {

enum class Tok {
  Ident,
  IntLit,
  // keywords
  KwClass,
  KwImplements,
  KwVoid,
  KwIf,
  KwElse,
  KwWhile,
  KwReturn,
  KwNew,
  KwThis,
  KwNull,
  KwTrue,
  KwFalse,
  KwSynchronized,
  KwStatic,
  KwVolatile,
  KwFinal,
  KwPublic,
  KwPrivate,
  KwProtected,
  // punctuation / operators
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Dot,
  At,
  Assign, // =
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Not,  // !
  Lt,
  Gt,
  Le,
  Ge,
  EqEq,
  NotEq,
  AndAnd,
  OrOr,
  End, // end of input
};

struct Token {
  Tok kind = Tok::End;
  std::string text; // identifier spelling / literal digits
  int line = 0, col = 0;
};

// Human-readable spelling of a token kind, for error messages.
std::string token_name(Tok t);

// Tokenize the whole input.  Throws ParseError on an unexpected character or
// an unterminated block comment.  `file` is used only for locations.
std::vector<Token> lex(const std::string &source, const std::string &file);

} // namespace racefix
