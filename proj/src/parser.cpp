#include "asmw/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace asmw {

namespace {

// Words with fixed meaning inside rules and terms. Declaration keywords
// (fn, table, program, backend, enum, pragma, flag names, default) are only
// special in their respective positions and stay usable as symbol names.
bool is_rule_keyword(const std::string& w) {
  return w == "true" || w == "false" || w == "nil" || w == "if" || w == "then" ||
         w == "else" || w == "par" || w == "skip" || logic::is_logic_name(w);
}

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind;
  std::string text;
  std::uint64_t number = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { next(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    next();
    return t;
  }

 private:
  void next() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
        continue;
      }
      break;
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::Kind::End;
      tok_.text.clear();
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++col_;
      }
      tok_.kind = Token::Kind::Number;
      tok_.text = text_.substr(start, pos_ - start);
      tok_.number = std::stoull(tok_.text);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t start = pos_;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '$') {
          ++pos_;
          ++col_;
        } else {
          break;
        }
      }
      tok_.kind = Token::Kind::Ident;
      tok_.text = text_.substr(start, pos_ - start);
      return;
    }
    // Multi-character punctuation: ":=" and "->".
    if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
      tok_.kind = Token::Kind::Punct;
      tok_.text = ":=";
      pos_ += 2;
      col_ += 2;
      return;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      tok_.kind = Token::Kind::Punct;
      tok_.text = "->";
      pos_ += 2;
      col_ += 2;
      return;
    }
    tok_.kind = Token::Kind::Punct;
    tok_.text = std::string(1, c);
    ++pos_;
    ++col_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  SourceUnit unit() {
    SourceUnit u;
    while (true) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::End) fail("expected declarations and a program");
      if (t.kind != Token::Kind::Ident) fail("expected a declaration keyword");
      if (t.text == "pragma") {
        lex_.take();
        Token which = expect_ident("pragma name");
        if (which.text != "generated") fail_at(which, "unknown pragma '" + which.text + "'");
        u.generated = true;
      } else if (t.text == "backend") {
        lex_.take();
        Token which = expect_ident("backend kind");
        if (which.text == "arithmetic") {
          u.uses_arithmetic = true;
        } else if (which.text == "enum") {
          u.enums.push_back(enum_decl());
        } else {
          fail_at(which, "unknown backend '" + which.text + "'");
        }
      } else if (t.text == "fn") {
        lex_.take();
        u.decls.push_back(fn_decl());
      } else if (t.text == "table") {
        lex_.take();
        u.tables.push_back(table_decl());
      } else if (t.text == "program") {
        lex_.take();
        u.program = rule();
        Token end = lex_.take();
        if (end.kind != Token::Kind::End) fail_at(end, "trailing input after the program rule");
        return u;
      } else {
        fail_at(t, "unknown declaration '" + t.text + "'");
      }
    }
  }

 private:
  EnumDecl enum_decl() {
    EnumDecl e;
    e.name = expect_ident("enum name").text;
    expect_punct("{");
    e.elements.push_back(expect_ident("enum element").text);
    while (peek_punct(",")) {
      lex_.take();
      e.elements.push_back(expect_ident("enum element").text);
    }
    expect_punct("}");
    return e;
  }

  Symbol fn_decl() {
    Symbol s;
    s.name = expect_ident("function name").text;
    expect_punct("/");
    Token ar = lex_.take();
    if (ar.kind != Token::Kind::Number) fail_at(ar, "expected an arity");
    s.arity = static_cast<int>(ar.number);
    bool saw_static_flag = false;
    while (lex_.peek().kind == Token::Kind::Ident) {
      std::string flag = lex_.peek().text;
      if (flag == "static") {
        lex_.take();
        s.static_ = true;
        saw_static_flag = true;
      } else if (flag == "dynamic") {
        lex_.take();
        s.static_ = false;
        saw_static_flag = true;
      } else if (flag == "intrinsic") {
        lex_.take();
        s.extrinsic = false;
      } else if (flag == "extrinsic") {
        lex_.take();
        s.extrinsic = true;
      } else if (flag == "relational") {
        lex_.take();
        s.relational = true;
      } else if (flag == "numeric") {
        lex_.take();
        s.numerical = true;
      } else if (flag == "in") {
        lex_.take();
        Token pos = lex_.take();
        if (pos.kind != Token::Kind::Number) fail_at(pos, "expected an input position");
        s.io_role = IoRole::Input;
        s.input_pos = static_cast<int>(pos.number);
      } else if (flag == "out") {
        lex_.take();
        s.io_role = IoRole::Output;
      } else {
        break;  // next declaration
      }
    }
    if (s.extrinsic && !saw_static_flag) s.static_ = true;
    return s;
  }

  TableDecl table_decl() {
    TableDecl t;
    t.symbol = expect_ident("table symbol").text;
    expect_punct("{");
    if (!peek_punct("}")) {
      table_entry(t);
      while (peek_punct(";")) {
        lex_.take();
        table_entry(t);
      }
    }
    expect_punct("}");
    std::sort(t.entries.begin(), t.entries.end(),
              [](const TableEntryDecl& a, const TableEntryDecl& b) {
                return entry_key(a) < entry_key(b);
              });
    return t;
  }

  static std::string entry_key(const TableEntryDecl& e) {
    std::string key;
    for (const auto& a : e.args) key += term_to_string(a) + ",";
    return key;
  }

  void table_entry(TableDecl& t) {
    const Token& p = lex_.peek();
    if (p.kind == Token::Kind::Ident && p.text == "default") {
      Token kw = lex_.take();
      expect_punct("->");
      if (t.default_value) fail_at(kw, "duplicate default entry");
      t.default_value = term();
      return;
    }
    TableEntryDecl e;
    if (peek_punct("(")) {
      lex_.take();
      if (!peek_punct(")")) {
        e.args.push_back(term());
        while (peek_punct(",")) {
          lex_.take();
          e.args.push_back(term());
        }
      }
      expect_punct(")");
    } else {
      e.args.push_back(term());
    }
    expect_punct("->");
    e.value = term();
    t.entries.push_back(std::move(e));
  }

  RulePtr rule() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Ident) {
      if (t.text == "skip") {
        lex_.take();
        return Rule::skip();
      }
      if (t.text == "if") {
        lex_.take();
        TermPtr guard = term();
        Token kw = lex_.take();
        if (kw.kind != Token::Kind::Ident || kw.text != "then")
          fail_at(kw, "expected 'then'");
        RulePtr then_rule = rule();
        RulePtr else_rule = Rule::skip();
        if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "else") {
          lex_.take();
          else_rule = rule();
        }
        return Rule::cond(std::move(guard), std::move(then_rule), std::move(else_rule));
      }
      if (t.text == "par") {
        lex_.take();
        expect_punct("{");
        std::vector<RulePtr> children;
        if (!peek_punct("}")) {
          children.push_back(rule());
          while (peek_punct(";")) {
            lex_.take();
            children.push_back(rule());
          }
        }
        expect_punct("}");
        return Rule::par(std::move(children));
      }
      if (is_rule_keyword(t.text)) fail_at(t, "expected a rule");
      // Assignment: app ":=" term.
      Token head = lex_.take();
      std::vector<TermPtr> args;
      if (peek_punct("(")) {
        lex_.take();
        if (!peek_punct(")")) {
          args.push_back(term());
          while (peek_punct(",")) {
            lex_.take();
            args.push_back(term());
          }
        }
        expect_punct(")");
      }
      expect_punct(":=");
      TermPtr rhs = term();
      return Rule::assign(head.text, std::move(args), std::move(rhs));
    }
    fail_at(t, "expected a rule");
    return nullptr;
  }

  TermPtr term() {
    Token t = lex_.take();
    if (t.kind == Token::Kind::Number) return Term::nat(t.number);
    if (t.kind != Token::Kind::Ident) fail_at(t, "expected a term");
    if (t.text == "true") return Term::true_lit();
    if (t.text == "false") return Term::false_lit();
    if (t.text == "nil") return Term::nil_lit();
    if (t.text == "if" || t.text == "then" || t.text == "else" || t.text == "par" ||
        t.text == "skip")
      fail_at(t, "expected a term, found keyword '" + t.text + "'");
    std::vector<TermPtr> args;
    if (peek_punct("(")) {
      lex_.take();
      if (!peek_punct(")")) {
        args.push_back(term());
        while (peek_punct(",")) {
          lex_.take();
          args.push_back(term());
        }
      }
      expect_punct(")");
    }
    if (logic::is_logic_name(t.text)) {
      int want = logic::logic_arity(t.text);
      if (static_cast<int>(args.size()) != want)
        fail_at(t, "'" + t.text + "' takes " + std::to_string(want) + " arguments");
    }
    return Term::app(t.text, std::move(args));
  }

  Token expect_ident(const std::string& what) {
    Token t = lex_.take();
    if (t.kind != Token::Kind::Ident) fail_at(t, "expected " + what);
    return t;
  }

  void expect_punct(const std::string& p) {
    Token t = lex_.take();
    if (t.kind != Token::Kind::Punct || t.text != p) fail_at(t, "expected '" + p + "'");
  }

  bool peek_punct(const std::string& p) {
    return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
  }

  [[noreturn]] void fail(const std::string& message) { fail_at(lex_.peek(), message); }

  [[noreturn]] void fail_at(const Token& t, const std::string& message) {
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.col, message + " (found " + found + ")");
  }

  Lexer lex_;
};

}  // namespace

SourceUnit parse_unit(const std::string& text) { return Parser(text).unit(); }

bool unit_equal(const SourceUnit& a, const SourceUnit& b) {
  if (a.generated != b.generated || a.uses_arithmetic != b.uses_arithmetic) return false;
  if (a.enums.size() != b.enums.size() || a.decls.size() != b.decls.size() ||
      a.tables.size() != b.tables.size())
    return false;
  for (std::size_t i = 0; i < a.enums.size(); ++i)
    if (a.enums[i].name != b.enums[i].name || a.enums[i].elements != b.enums[i].elements)
      return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i)
    if (!a.decls[i].same_declaration(b.decls[i])) return false;
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    const TableDecl& x = a.tables[i];
    const TableDecl& y = b.tables[i];
    if (x.symbol != y.symbol || x.entries.size() != y.entries.size()) return false;
    if ((x.default_value == nullptr) != (y.default_value == nullptr)) return false;
    if (x.default_value && !term_equal(x.default_value, y.default_value)) return false;
    for (std::size_t j = 0; j < x.entries.size(); ++j) {
      if (x.entries[j].args.size() != y.entries[j].args.size()) return false;
      for (std::size_t k = 0; k < x.entries[j].args.size(); ++k)
        if (!term_equal(x.entries[j].args[k], y.entries[j].args[k])) return false;
      if (!term_equal(x.entries[j].value, y.entries[j].value)) return false;
    }
  }
  return rule_equal(a.program, b.program);
}

}  // namespace asmw
