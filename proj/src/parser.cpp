#include "racefix/parser.hpp"

#include "racefix/diagnostics.hpp"
#include "racefix/lexer.hpp"

#include <set>

namespace racefix {

namespace {

class Parser {
public:
  Parser(std::vector<Token> toks, std::string file)
      : toks_(std::move(toks)), file_(std::move(file)) {}

  Program parse() {
    Program p;
    p.source_name = file_;
    std::set<std::string> class_names;
    while (!at(Tok::End)) {
      ClassDecl cls = parse_class();
      if (!class_names.insert(cls.name).second)
        err_at(cls.span.start_line, cls.span.start_col,
               "duplicate class name '" + cls.name + "'");
      p.classes.push_back(std::move(cls));
    }
    p.next_stmt_id = next_id_;
    return p;
  }

private:
  // ---- token plumbing -----------------------------------------------------

  const Token &cur() const { return toks_[pos_]; }
  const Token &peek(size_t off = 1) const {
    size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return cur().kind == k; }

  Token take() { return toks_[pos_++]; }

  Token expect(Tok k, const char *context) {
    if (!at(k))
      err_expected({token_name(k)}, context);
    last_ = cur();
    return take();
  }
  bool accept(Tok k) {
    if (!at(k))
      return false;
    last_ = cur();
    take();
    return true;
  }

  [[noreturn]] void err_expected(std::vector<std::string> expected,
                                 const std::string &context) {
    throw ParseError(file_, cur().line, cur().col,
                     "syntax error in " + context + ": found " +
                         describe(cur()),
                     std::move(expected));
  }
  [[noreturn]] void err_at(int line, int col, const std::string &msg) {
    throw ParseError(file_, line, col, msg);
  }
  static std::string describe(const Token &t) {
    if (t.kind == Tok::Ident)
      return "identifier '" + t.text + "'";
    if (t.kind == Tok::End)
      return "end of input";
    return "'" + t.text + "'";
  }

  SourceSpan span_from(const Token &start) const {
    SourceSpan s;
    s.file = file_;
    s.start_line = start.line;
    s.start_col = start.col;
    s.end_line = last_.line;
    s.end_col = last_.col + static_cast<int>(last_.text.size());
    return s;
  }

  // ---- declarations -------------------------------------------------------

  ClassDecl parse_class() {
    Token start = cur();
    ClassDecl cls;
    while (accept(Tok::At)) {
      Token a = expect(Tok::Ident, "annotation");
      cls.annotations.push_back(a.text);
    }
    expect(Tok::KwClass, "class declaration");
    cls.name = expect(Tok::Ident, "class declaration").text;
    if (accept(Tok::KwImplements)) {
      Token iface = expect(Tok::Ident, "implements clause");
      if (iface.text != "Runnable")
        err_at(iface.line, iface.col,
               "only 'implements Runnable' is supported, got '" + iface.text +
                   "'");
      cls.implements_runnable = true;
    }
    expect(Tok::LBrace, "class body");
    std::set<std::string> member_names;
    while (!at(Tok::RBrace)) {
      parse_member(cls, member_names);
    }
    expect(Tok::RBrace, "class body");
    cls.span = span_from(start);
    return cls;
  }

  struct Modifiers {
    Visibility vis = Visibility::None;
    bool is_static = false, is_final = false, is_volatile = false,
         is_synchronized = false;
  };

  Modifiers parse_modifiers() {
    Modifiers m;
    for (;;) {
      if (accept(Tok::KwPublic))
        m.vis = Visibility::Public;
      else if (accept(Tok::KwPrivate))
        m.vis = Visibility::Private;
      else if (accept(Tok::KwProtected))
        m.vis = Visibility::Protected;
      else if (accept(Tok::KwStatic))
        m.is_static = true;
      else if (accept(Tok::KwFinal))
        m.is_final = true;
      else if (accept(Tok::KwVolatile))
        m.is_volatile = true;
      else if (accept(Tok::KwSynchronized))
        m.is_synchronized = true;
      else
        return m;
    }
  }

  // type := (IDENT | void) ('[' ']')*
  std::string parse_type(const char *context) {
    std::string t;
    if (at(Tok::Ident))
      t = take().text;
    else if (at(Tok::KwVoid))
      t = take().text;
    else
      err_expected({"type name"}, context);
    last_ = toks_[pos_ - 1];
    while (at(Tok::LBracket) && peek().kind == Tok::RBracket) {
      take();
      last_ = cur();
      take();
      t += "[]";
    }
    return t;
  }

  void parse_member(ClassDecl &cls, std::set<std::string> &member_names) {
    Token start = cur();
    Modifiers mods = parse_modifiers();
    std::string type = parse_type("member declaration");
    Token name = expect(Tok::Ident, "member declaration");
    if (!member_names.insert(name.text).second)
      err_at(name.line, name.col,
             "duplicate member name '" + name.text + "' in class '" +
                 cls.name + "'");

    if (at(Tok::LParen)) {
      // method
      MethodDecl m;
      m.name = name.text;
      m.return_type = type;
      m.visibility = mods.vis;
      m.is_static = mods.is_static;
      m.is_synchronized = mods.is_synchronized;
      expect(Tok::LParen, "parameter list");
      std::set<std::string> names;
      if (!at(Tok::RParen)) {
        do {
          Param prm;
          prm.type = parse_type("parameter");
          Token pn = expect(Tok::Ident, "parameter");
          prm.name = pn.text;
          if (!names.insert(prm.name).second)
            err_at(pn.line, pn.col,
                   "duplicate parameter name '" + prm.name + "'");
          m.params.push_back(std::move(prm));
        } while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "parameter list");
      // Locals must be unique per method (and distinct from parameters);
      // this keeps path normalization free of block-scope bookkeeping.
      locals_ = names;
      m.body = parse_block("method body");
      locals_.clear();
      m.span = span_from(start);
      cls.methods.push_back(std::move(m));
    } else {
      // field
      if (mods.is_synchronized)
        err_at(start.line, start.col, "field cannot be synchronized");
      if (type == "void")
        err_at(start.line, start.col, "field cannot have type void");
      FieldDecl f;
      f.name = name.text;
      f.type = type;
      f.visibility = mods.vis;
      f.is_static = mods.is_static;
      f.is_final = mods.is_final;
      f.is_volatile = mods.is_volatile;
      if (accept(Tok::Assign))
        f.init = parse_expr();
      expect(Tok::Semi, "field declaration");
      f.span = span_from(start);
      cls.fields.push_back(std::move(f));
    }
  }

  // ---- statements ---------------------------------------------------------

  std::vector<Stmt> parse_block(const char *context) {
    expect(Tok::LBrace, context);
    std::vector<Stmt> out;
    while (!at(Tok::RBrace))
      out.push_back(parse_stmt());
    expect(Tok::RBrace, context);
    return out;
  }

  Stmt parse_stmt() {
    Token start = cur();
    Stmt s;
    s.id = next_id_++;

    if (at(Tok::KwSynchronized)) {
      take();
      s.kind = StmtKind::Sync;
      expect(Tok::LParen, "synchronized statement");
      Expr lock = parse_expr();
      if (!raw_path_of(lock))
        err_at(lock.span.start_line, lock.span.start_col,
               "synchronized monitor must be an access path");
      s.lock_expr = std::move(lock);
      expect(Tok::RParen, "synchronized statement");
      s.body = parse_block("synchronized body");
      s.span = span_from(start);
      return s;
    }
    if (at(Tok::KwIf)) {
      take();
      s.kind = StmtKind::If;
      expect(Tok::LParen, "if statement");
      s.cond = parse_expr();
      expect(Tok::RParen, "if statement");
      s.body = parse_block("if body");
      if (accept(Tok::KwElse))
        s.else_body = parse_block("else body");
      s.span = span_from(start);
      return s;
    }
    if (at(Tok::KwWhile)) {
      take();
      s.kind = StmtKind::While;
      expect(Tok::LParen, "while statement");
      s.cond = parse_expr();
      expect(Tok::RParen, "while statement");
      s.body = parse_block("while body");
      s.span = span_from(start);
      return s;
    }
    if (at(Tok::KwReturn)) {
      take();
      last_ = toks_[pos_ - 1];
      s.kind = StmtKind::Return;
      if (!at(Tok::Semi))
        s.value = parse_expr();
      expect(Tok::Semi, "return statement");
      s.span = span_from(start);
      return s;
    }

    // Local declaration?  IDENT IDENT ...  or  IDENT '[' ']' ... IDENT
    if (at(Tok::Ident) && starts_local_decl()) {
      s.kind = StmtKind::LocalDecl;
      s.decl_type = parse_type("local declaration");
      Token n = expect(Tok::Ident, "local declaration");
      s.decl_name = n.text;
      if (!locals_.insert(s.decl_name).second)
        err_at(n.line, n.col,
               "duplicate local name '" + s.decl_name +
                   "' (locals must be unique within a method)");
      if (accept(Tok::Assign))
        s.init = parse_expr();
      expect(Tok::Semi, "local declaration");
      s.span = span_from(start);
      return s;
    }

    // Assignment, call statement, or plain expression statement.
    Expr e = parse_expr();
    if (at(Tok::Assign)) {
      if (!raw_path_of(e))
        err_at(e.span.start_line, e.span.start_col,
               "assignment target must be an access path");
      take();
      s.kind = StmtKind::Assign;
      s.target = std::move(e);
      s.value = parse_expr();
      expect(Tok::Semi, "assignment");
      s.span = span_from(start);
      return s;
    }
    expect(Tok::Semi, "expression statement");
    s.kind = e.kind == ExprKind::Call ? StmtKind::Call : StmtKind::ExprStmt;
    s.value = std::move(e);
    s.span = span_from(start);
    return s;
  }

  // Lookahead for "type name ..." — distinguishes `Account a` and
  // `int[] xs` (declaration) from `xs[0] = 1` and `a.m()` (expression).
  bool starts_local_decl() const {
    size_t i = 1;
    while (peek(i).kind == Tok::LBracket && peek(i + 1).kind == Tok::RBracket)
      i += 2;
    return peek(i).kind == Tok::Ident;
  }

  // ---- expressions --------------------------------------------------------

  Expr parse_expr() { return parse_or(); }

  Expr parse_binary_chain(Expr (Parser::*next)(),
                          std::initializer_list<Tok> ops) {
    Expr lhs = (this->*next)();
    for (;;) {
      bool matched = false;
      for (Tok op : ops) {
        if (at(op)) {
          Token t = take();
          last_ = t;
          Expr rhs = (this->*next)();
          Expr bin;
          bin.kind = ExprKind::Binary;
          bin.text = t.text;
          bin.span = lhs.span;
          bin.span.end_line = rhs.span.end_line;
          bin.span.end_col = rhs.span.end_col;
          bin.children.push_back(std::move(lhs));
          bin.children.push_back(std::move(rhs));
          lhs = std::move(bin);
          matched = true;
          break;
        }
      }
      if (!matched)
        return lhs;
    }
  }

  Expr parse_or() {
    return parse_binary_chain(&Parser::parse_and, {Tok::OrOr});
  }
  Expr parse_and() {
    return parse_binary_chain(&Parser::parse_equality, {Tok::AndAnd});
  }
  Expr parse_equality() {
    return parse_binary_chain(&Parser::parse_relational,
                              {Tok::EqEq, Tok::NotEq});
  }
  Expr parse_relational() {
    return parse_binary_chain(&Parser::parse_additive,
                              {Tok::Lt, Tok::Gt, Tok::Le, Tok::Ge});
  }
  Expr parse_additive() {
    return parse_binary_chain(&Parser::parse_multiplicative,
                              {Tok::Plus, Tok::Minus});
  }
  Expr parse_multiplicative() {
    return parse_binary_chain(&Parser::parse_unary,
                              {Tok::Star, Tok::Slash, Tok::Percent});
  }

  Expr parse_unary() {
    if (at(Tok::Not) || at(Tok::Minus)) {
      Token t = take();
      Expr e;
      e.kind = ExprKind::Unary;
      e.text = t.text;
      Expr operand = parse_unary();
      e.span.file = file_;
      e.span.start_line = t.line;
      e.span.start_col = t.col;
      e.span.end_line = operand.span.end_line;
      e.span.end_col = operand.span.end_col;
      e.children.push_back(std::move(operand));
      return e;
    }
    return parse_primary();
  }

  Expr parse_primary() {
    Token start = cur();
    if (at(Tok::IntLit)) {
      Token t = take();
      last_ = t;
      Expr e;
      e.kind = ExprKind::IntLit;
      e.int_value = std::stoll(t.text);
      e.span = span_from(start);
      return e;
    }
    if (at(Tok::KwTrue) || at(Tok::KwFalse)) {
      Token t = take();
      last_ = t;
      Expr e;
      e.kind = ExprKind::BoolLit;
      e.bool_value = t.kind == Tok::KwTrue;
      e.span = span_from(start);
      return e;
    }
    if (at(Tok::KwNull)) {
      last_ = take();
      Expr e;
      e.kind = ExprKind::NullLit;
      e.span = span_from(start);
      return e;
    }
    if (accept(Tok::LParen)) {
      Expr e = parse_expr();
      expect(Tok::RParen, "parenthesized expression");
      return e;
    }
    if (at(Tok::KwNew)) {
      take();
      Token tn = expect(Tok::Ident, "new expression");
      Expr e;
      e.text = tn.text;
      if (at(Tok::LBracket)) {
        take();
        e.kind = ExprKind::NewArray;
        e.children.push_back(parse_expr());
        expect(Tok::RBracket, "array creation");
      } else {
        e.kind = ExprKind::New;
        expect(Tok::LParen, "new expression");
        if (!at(Tok::RParen)) {
          do {
            e.children.push_back(parse_expr());
          } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "new expression");
      }
      e.span = span_from(start);
      return e;
    }
    if (at(Tok::Ident) || at(Tok::KwThis))
      return parse_path_or_call(start);

    err_expected({"expression"}, "expression");
  }

  // Parses base ('.' field | '[' expr ']')* and, if a '(' follows the final
  // plain-field segment, turns the whole thing into a call whose receiver is
  // everything before that segment.
  Expr parse_path_or_call(const Token &start) {
    Expr e;
    e.kind = ExprKind::PathRead;
    if (at(Tok::KwThis)) {
      last_ = take();
      e.base = "this";
    } else {
      Token b = expect(Tok::Ident, "path expression");
      e.base = b.text;
    }

    // Bare call `m(...)`: base becomes the method, receiver is implicit.
    if (at(Tok::LParen) && e.base != "this") {
      Expr call;
      call.kind = ExprKind::Call;
      call.text = e.base;
      call.base = "this";
      call.explicit_receiver = false;
      parse_call_args(call);
      call.span = span_from(start);
      return call;
    }

    for (;;) {
      if (accept(Tok::Dot)) {
        Token f = expect(Tok::Ident, "path expression");
        if (at(Tok::LParen)) {
          // receiver.f(...) — e is the receiver
          Expr call;
          call.kind = ExprKind::Call;
          call.text = f.text;
          call.base = e.base;
          call.segs = e.segs;
          call.children = e.children; // receiver index expressions
          call.explicit_receiver = true;
          parse_call_args(call);
          call.span = span_from(start);
          return call;
        }
        Expr::Seg seg;
        seg.field = f.text;
        e.segs.push_back(seg);
      } else if (at(Tok::LBracket)) {
        take();
        Expr idx = parse_expr();
        expect(Tok::RBracket, "array subscript");
        Expr::Seg seg;
        seg.is_index = true;
        e.segs.push_back(seg);
        e.children.push_back(std::move(idx));
      } else {
        break;
      }
    }
    e.span = span_from(start);
    return e;
  }

  void parse_call_args(Expr &call) {
    expect(Tok::LParen, "call");
    if (!at(Tok::RParen)) {
      do {
        call.children.push_back(parse_expr());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "call");
  }

  std::vector<Token> toks_;
  std::string file_;
  size_t pos_ = 0;
  Token last_;                   // last consumed token, for span ends
  std::set<std::string> locals_; // params + locals of the current method
  int next_id_ = 0;
};

} // namespace

Program parse_program(const std::string &source, const std::string &file) {
  return Parser(lex(source, file), file).parse();
}

} // namespace racefix
