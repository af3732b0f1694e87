#include <sstream>

#include "asmw/parser.hpp"

namespace asmw {

namespace {

void emit_term(std::ostream& out, const TermPtr& t) { out << term_to_string(t); }

void emit_rule(std::ostream& out, const RulePtr& r, int indent, bool suppress_first_pad) {
  std::string pad(indent, ' ');
  std::string first_pad = suppress_first_pad ? "" : pad;
  switch (r->kind) {
    case Rule::Kind::Assign: {
      out << first_pad << r->lhs_head;
      if (!r->lhs_args.empty()) {
        out << '(';
        for (std::size_t i = 0; i < r->lhs_args.size(); ++i) {
          if (i) out << ", ";
          emit_term(out, r->lhs_args[i]);
        }
        out << ')';
      }
      out << " := ";
      emit_term(out, r->rhs);
      return;
    }
    case Rule::Kind::Par: {
      if (r->children.empty()) {
        out << first_pad << "skip";
        return;
      }
      out << first_pad << "par {\n";
      for (std::size_t i = 0; i < r->children.size(); ++i) {
        emit_rule(out, r->children[i], indent + 2, false);
        out << (i + 1 < r->children.size() ? ";\n" : "\n");
      }
      out << pad << '}';
      return;
    }
    case Rule::Kind::Cond: {
      out << first_pad << "if ";
      emit_term(out, r->guard);
      out << " then\n";
      emit_rule(out, r->then_rule, indent + 2, false);
      out << '\n' << pad << "else";
      if (r->else_rule->kind == Rule::Kind::Cond) {
        out << ' ';
        emit_rule(out, r->else_rule, indent, true);
      } else {
        out << '\n';
        emit_rule(out, r->else_rule, indent + 2, false);
      }
      return;
    }
  }
}

void emit_fn(std::ostream& out, const Symbol& s) {
  out << "fn " << s.name << "/" << s.arity << (s.static_ ? " static" : " dynamic");
  if (s.extrinsic) out << " extrinsic";
  if (s.relational) out << " relational";
  if (s.numerical) out << " numeric";
  if (s.io_role == IoRole::Input) out << " in " << s.input_pos;
  if (s.io_role == IoRole::Output) out << " out";
  out << '\n';
}

void emit_table(std::ostream& out, const TableDecl& t) {
  out << "table " << t.symbol << " {";
  bool any = !t.entries.empty() || t.default_value;
  if (!any) {
    out << "}\n";
    return;
  }
  out << '\n';
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    out << "  (";
    for (std::size_t j = 0; j < e.args.size(); ++j) {
      if (j) out << ", ";
      emit_term(out, e.args[j]);
    }
    out << ") -> ";
    emit_term(out, e.value);
    out << (i + 1 < t.entries.size() || t.default_value ? ";\n" : "\n");
  }
  if (t.default_value) {
    out << "  default -> ";
    emit_term(out, t.default_value);
    out << '\n';
  }
  out << "}\n";
}

}  // namespace

std::string print_term(const TermPtr& t) { return term_to_string(t); }

std::string print_rule(const RulePtr& r, int indent) {
  std::ostringstream out;
  emit_rule(out, r, indent, false);
  return out.str();
}

std::string print_unit(const SourceUnit& u) {
  std::ostringstream out;
  if (u.generated) out << "pragma generated\n";
  if (u.uses_arithmetic) out << "backend arithmetic\n";
  for (const auto& e : u.enums) {
    out << "backend enum " << e.name << " { ";
    for (std::size_t i = 0; i < e.elements.size(); ++i)
      out << (i ? ", " : "") << e.elements[i];
    out << " }\n";
  }
  for (const auto& s : u.decls) emit_fn(out, s);
  for (const auto& t : u.tables) emit_table(out, t);
  out << "program\n";
  emit_rule(out, u.program, 0, false);
  out << '\n';
  return out.str();
}

}  // namespace asmw
