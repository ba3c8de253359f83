#include "racefix/lexer.hpp"

#include "racefix/diagnostics.hpp"

#include <cctype>
#include <map>

namespace racefix {

namespace {

const std::map<std::string, Tok> kKeywords = {
    {"class", Tok::KwClass},
    {"implements", Tok::KwImplements},
    {"void", Tok::KwVoid},
    {"if", Tok::KwIf},
    {"else", Tok::KwElse},
    {"while", Tok::KwWhile},
    {"return", Tok::KwReturn},
    {"new", Tok::KwNew},
    {"this", Tok::KwThis},
    {"null", Tok::KwNull},
    {"true", Tok::KwTrue},
    {"false", Tok::KwFalse},
    {"synchronized", Tok::KwSynchronized},
    {"static", Tok::KwStatic},
    {"volatile", Tok::KwVolatile},
    {"final", Tok::KwFinal},
    {"public", Tok::KwPublic},
    {"private", Tok::KwPrivate},
    {"protected", Tok::KwProtected},
};

} // namespace

std::string token_name(Tok t) {
  switch (t) {
  case Tok::Ident:
    return "identifier";
  case Tok::IntLit:
    return "integer literal";
  case Tok::LParen:
    return "'('";
  case Tok::RParen:
    return "')'";
  case Tok::LBrace:
    return "'{'";
  case Tok::RBrace:
    return "'}'";
  case Tok::LBracket:
    return "'['";
  case Tok::RBracket:
    return "']'";
  case Tok::Semi:
    return "';'";
  case Tok::Comma:
    return "','";
  case Tok::Dot:
    return "'.'";
  case Tok::At:
    return "'@'";
  case Tok::Assign:
    return "'='";
  case Tok::Plus:
    return "'+'";
  case Tok::Minus:
    return "'-'";
  case Tok::Star:
    return "'*'";
  case Tok::Slash:
    return "'/'";
  case Tok::Percent:
    return "'%'";
  case Tok::Not:
    return "'!'";
  case Tok::Lt:
    return "'<'";
  case Tok::Gt:
    return "'>'";
  case Tok::Le:
    return "'<='";
  case Tok::Ge:
    return "'>='";
  case Tok::EqEq:
    return "'=='";
  case Tok::NotEq:
    return "'!='";
  case Tok::AndAnd:
    return "'&&'";
  case Tok::OrOr:
    return "'||'";
  case Tok::End:
    return "end of input";
  default:
    // keywords: find the spelling
    for (const auto &[spelling, kind] : kKeywords)
      if (kind == t)
        return "'" + spelling + "'";
    return "token";
  }
}

std::vector<Token> lex(const std::string &source, const std::string &file) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < source.size(); ++k, ++i) {
      if (source[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](size_t off = 0) -> char {
    return i + off < source.size() ? source[i + off] : '\0';
  };
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), l, c});
  };

  while (i < source.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < source.size() && peek() != '\n')
        advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      int l = line, cc = col;
      advance(2);
      bool closed = false;
      while (i < source.size()) {
        if (peek() == '*' && peek(1) == '/') {
          advance(2);
          closed = true;
          break;
        }
        advance(1);
      }
      if (!closed)
        throw ParseError(file, l, cc, "unterminated block comment");
      continue;
    }

    int l = line, cc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (std::isalnum(static_cast<unsigned char>(peek())) ||
             peek() == '_') {
        word += peek();
        advance(1);
      }
      auto it = kKeywords.find(word);
      if (it != kKeywords.end())
        push(it->second, word, l, cc);
      else
        push(Tok::Ident, word, l, cc);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance(1);
      }
      push(Tok::IntLit, digits, l, cc);
      continue;
    }

    auto two = [&](char a, char b, Tok k) -> bool {
      if (c == a && peek(1) == b) {
        push(k, std::string{a, b}, l, cc);
        advance(2);
        return true;
      }
      return false;
    };
    if (two('=', '=', Tok::EqEq) || two('!', '=', Tok::NotEq) ||
        two('<', '=', Tok::Le) || two('>', '=', Tok::Ge) ||
        two('&', '&', Tok::AndAnd) || two('|', '|', Tok::OrOr))
      continue;

    Tok k;
    switch (c) {
    case '(': k = Tok::LParen; break;
    case ')': k = Tok::RParen; break;
    case '{': k = Tok::LBrace; break;
    case '}': k = Tok::RBrace; break;
    case '[': k = Tok::LBracket; break;
    case ']': k = Tok::RBracket; break;
    case ';': k = Tok::Semi; break;
    case ',': k = Tok::Comma; break;
    case '.': k = Tok::Dot; break;
    case '@': k = Tok::At; break;
    case '=': k = Tok::Assign; break;
    case '+': k = Tok::Plus; break;
    case '-': k = Tok::Minus; break;
    case '*': k = Tok::Star; break;
    case '/': k = Tok::Slash; break;
    case '%': k = Tok::Percent; break;
    case '!': k = Tok::Not; break;
    case '<': k = Tok::Lt; break;
    case '>': k = Tok::Gt; break;
    default:
      throw ParseError(file, l, cc,
                       std::string("unexpected character '") + c + "'");
    }
    push(k, std::string(1, c), l, cc);
    advance(1);
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

} // namespace racefix
