#include "racefix/printer.hpp"

#include <cassert>

namespace racefix {

namespace {

const char *kIndent = "    ";

void indent_to(std::string &out, int depth) {
  for (int i = 0; i < depth; ++i)
    out += kIndent;
}

std::string vis_prefix(Visibility v) {
  switch (v) {
  case Visibility::Public:
    return "public ";
  case Visibility::Private:
    return "private ";
  case Visibility::Protected:
    return "protected ";
  case Visibility::None:
    return "";
  }
  return "";
}

void render_path_shaped(std::string &out, const Expr &e, size_t index_offset) {
  out += e.base;
  size_t idx = index_offset;
  for (const auto &seg : e.segs) {
    if (seg.is_index) {
      out += '[';
      out += render_expr(e.children[idx++]);
      out += ']';
    } else {
      out += '.';
      out += seg.field;
    }
  }
}

void render_stmt(std::string &out, const Stmt &s, int depth);

void render_body(std::string &out, const std::vector<Stmt> &body, int depth) {
  for (const auto &s : body)
    render_stmt(out, s, depth);
}

void render_stmt(std::string &out, const Stmt &s, int depth) {
  indent_to(out, depth);
  switch (s.kind) {
  case StmtKind::LocalDecl:
    out += s.decl_type + " " + s.decl_name;
    if (s.init) {
      out += " = ";
      out += render_expr(*s.init);
    }
    out += ";\n";
    break;
  case StmtKind::Assign:
    out += render_expr(*s.target);
    out += " = ";
    out += render_expr(*s.value);
    out += ";\n";
    break;
  case StmtKind::Sync: {
    // Exactly "synchronized(<path>) {" — tests count this spelling.
    out += "synchronized(";
    out += render_expr(*s.lock_expr);
    out += ") {\n";
    render_body(out, s.body, depth + 1);
    indent_to(out, depth);
    out += "}\n";
    break;
  }
  case StmtKind::If:
    out += "if (";
    out += render_expr(*s.cond);
    out += ") {\n";
    render_body(out, s.body, depth + 1);
    indent_to(out, depth);
    out += "}";
    if (!s.else_body.empty()) {
      out += " else {\n";
      render_body(out, s.else_body, depth + 1);
      indent_to(out, depth);
      out += "}";
    }
    out += "\n";
    break;
  case StmtKind::While:
    out += "while (";
    out += render_expr(*s.cond);
    out += ") {\n";
    render_body(out, s.body, depth + 1);
    indent_to(out, depth);
    out += "}\n";
    break;
  case StmtKind::Call:
  case StmtKind::ExprStmt:
    out += render_expr(*s.value);
    out += ";\n";
    break;
  case StmtKind::Return:
    out += "return";
    if (s.value) {
      out += ' ';
      out += render_expr(*s.value);
    }
    out += ";\n";
    break;
  }
}

} // namespace

std::string render_expr(const Expr &e) {
  std::string out;
  switch (e.kind) {
  case ExprKind::IntLit:
    out = std::to_string(e.int_value);
    break;
  case ExprKind::BoolLit:
    out = e.bool_value ? "true" : "false";
    break;
  case ExprKind::NullLit:
    out = "null";
    break;
  case ExprKind::PathRead:
    render_path_shaped(out, e, 0);
    break;
  case ExprKind::Call: {
    size_t recv_indices = e.index_seg_count();
    if (e.explicit_receiver) {
      render_path_shaped(out, e, 0);
      out += '.';
    }
    out += e.text;
    out += '(';
    for (size_t i = recv_indices; i < e.children.size(); ++i) {
      if (i > recv_indices)
        out += ", ";
      out += render_expr(e.children[i]);
    }
    out += ')';
    break;
  }
  case ExprKind::New:
    out = "new " + e.text + "(";
    for (size_t i = 0; i < e.children.size(); ++i) {
      if (i)
        out += ", ";
      out += render_expr(e.children[i]);
    }
    out += ')';
    break;
  case ExprKind::NewArray:
    assert(e.children.size() == 1);
    out = "new " + e.text + "[" + render_expr(e.children[0]) + "]";
    break;
  case ExprKind::Unary: {
    const Expr &c = e.children[0];
    // `-a + b` and `-(a + b)` parse differently; keep the grouping explicit.
    bool paren = c.kind == ExprKind::Binary;
    out = e.text + (paren ? "(" : "") + render_expr(c) + (paren ? ")" : "");
    break;
  }
  case ExprKind::Binary:
    // Fully parenthesize nested binaries so re-parsing cannot reassociate.
    for (int side = 0; side < 2; ++side) {
      const Expr &c = e.children[side];
      bool paren = c.kind == ExprKind::Binary;
      if (side == 1)
        out += " " + e.text + " ";
      if (paren)
        out += '(';
      out += render_expr(c);
      if (paren)
        out += ')';
    }
    break;
  }
  return out;
}

std::string render_program(const Program &p) {
  std::string out;
  bool first_class = true;
  for (const auto &cls : p.classes) {
    if (!first_class)
      out += '\n';
    first_class = false;
    for (const auto &a : cls.annotations)
      out += "@" + a + "\n";
    out += "class " + cls.name;
    if (cls.implements_runnable)
      out += " implements Runnable";
    out += " {\n";
    for (const auto &f : cls.fields) {
      indent_to(out, 1);
      out += vis_prefix(f.visibility);
      if (f.is_static)
        out += "static ";
      if (f.is_final)
        out += "final ";
      if (f.is_volatile)
        out += "volatile ";
      out += f.type + " " + f.name;
      if (f.init) {
        out += " = ";
        out += render_expr(*f.init);
      }
      out += ";\n";
    }
    bool separator_needed = !cls.fields.empty();
    for (const auto &m : cls.methods) {
      if (separator_needed)
        out += '\n';
      separator_needed = true;
      indent_to(out, 1);
      out += vis_prefix(m.visibility);
      if (m.is_static)
        out += "static ";
      if (m.is_synchronized)
        out += "synchronized ";
      out += m.return_type + " " + m.name + "(";
      for (size_t i = 0; i < m.params.size(); ++i) {
        if (i)
          out += ", ";
        out += m.params[i].type + " " + m.params[i].name;
      }
      out += ") {\n";
      render_body(out, m.body, 2);
      indent_to(out, 1);
      out += "}\n";
    }
    out += "}\n";
  }
  return out;
}

} // namespace racefix
