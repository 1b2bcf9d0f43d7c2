// Copyright 2026 The UIL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <charconv>
#include <sstream>

#include "uil/text.hpp"

namespace uil {
namespace {

struct Token {
  enum class Kind { kIdent, kNumber, kSized, kString, kPunct, kEof };
  Kind kind = Kind::kEof;
  std::string text;
  uint64_t value = 0;
  uint32_t width = 0;  // kSized only
  int line = 1;
  int col = 1;
};

struct SyntaxError {
  SourceSpan span;
  std::string message;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file)
      : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Token::Kind::kIdent;
        while (pos_ < src_.size() && is_ident(src_[pos_])) t.text += take();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(t);
      } else if (c == '"') {
        take();
        t.kind = Token::Kind::kString;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n')
          t.text += take();
        if (pos_ >= src_.size() || src_[pos_] != '"')
          fail(t, "unterminated string");
        take();
      } else {
        t.kind = Token::Kind::kPunct;
        static const char* two[] = {"->", "==", "!=", "<=", ">="};
        for (const char* p : two) {
          if (src_.substr(pos_, 2) == p) {
            t.text = p;
            take();
            take();
            break;
          }
        }
        if (t.text.empty()) {
          if (std::string_view("{}()[];,=:?&|!<>%@.").find(c) ==
              std::string_view::npos)
            fail(t, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, take());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_ident(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (src_.substr(pos_, 2) == "/*") {
        Token at{Token::Kind::kEof, "", 0, 0, line_, col_};
        take();
        take();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") take();
        if (pos_ >= src_.size()) fail(at, "unterminated comment");
        take();
        take();
      } else {
        return;
      }
    }
  }

  uint64_t digits(const Token& t, int base) {
    std::string s;
    while (pos_ < src_.size() &&
           (std::isxdigit(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      char c = take();
      if (c != '_') s += c;
    }
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      fail(t, "malformed number '" + s + "'");
    return v;
  }

  void lex_number(Token& t) {
    t.kind = Token::Kind::kNumber;
    std::string s;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_])))
      s += take();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t.value);
    if (ec != std::errc()) fail(t, "number out of range '" + s + "'");
    t.text = s;
    if (pos_ < src_.size() && src_[pos_] == '\'') {
      take();
      if (pos_ >= src_.size()) fail(t, "malformed constant");
      char base = take();
      int radix = base == 'd' ? 10 : base == 'b' ? 2 : (base == 'h' || base == 'x') ? 16 : 0;
      if (radix == 0) fail(t, "unknown constant base '" + std::string(1, base) + "'");
      if (t.value == 0 || t.value > 64) fail(t, "constant width must be in [1, 64]");
      t.kind = Token::Kind::kSized;
      t.width = static_cast<uint32_t>(t.value);
      t.value = digits(t, radix);
    }
  }

  [[noreturn]] void fail(const Token& t, std::string msg) {
    throw SyntaxError{{file_, t.line, t.col, col_}, std::move(msg)};
  }

  std::string_view src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file)
      : toks_(std::move(toks)), file_(std::move(file)) {}

  Program program() {
    Program prog;
    if (is_ident("import")) {
      next();
      const Token& s = expect_kind(Token::Kind::kString, "library name");
      if (s.text != "primitives")
        fail(s, "only \"primitives\" can be imported");
      expect(";");
      prog.import_primitives = true;
    }
    std::string marked;
    while (peek().kind != Token::Kind::kEof) {
      Component comp = component();
      if (comp.attrs.erase("toplevel")) {
        if (!marked.empty()) fail(peek(), "multiple @toplevel components");
        marked = comp.name;
      }
      prog.components.push_back(std::move(comp));
    }
    if (!marked.empty()) {
      prog.entry = marked;
    } else if (!prog.components.empty()) {
      prog.entry = prog.components.back().name;
    }
    return prog;
  }

 private:
  const Token& peek(size_t k = 0) const {
    size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is(const char* punct, size_t k = 0) const {
    return peek(k).kind == Token::Kind::kPunct && peek(k).text == punct;
  }
  bool is_ident(const char* word, size_t k = 0) const {
    return peek(k).kind == Token::Kind::kIdent && peek(k).text == word;
  }
  bool accept(const char* punct) {
    if (!is(punct)) return false;
    next();
    return true;
  }
  const Token& expect(const char* punct) {
    if (!is(punct))
      fail(peek(), std::string("expected '") + punct + "', found " +
                       describe(peek()));
    return next();
  }
  const Token& expect_kind(Token::Kind kind, const char* what) {
    if (peek().kind != kind)
      fail(peek(), std::string("expected ") + what + ", found " +
                       describe(peek()));
    return next();
  }
  std::string ident(const char* what = "identifier") {
    return expect_kind(Token::Kind::kIdent, what).text;
  }
  void keyword(const char* word) {
    if (!is_ident(word))
      fail(peek(), std::string("expected '") + word + "', found " +
                       describe(peek()));
    next();
  }
  uint64_t number() { return expect_kind(Token::Kind::kNumber, "number").value; }

  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::kEof) return "end of input";
    return "'" + t.text + "'";
  }
  SourceSpan span(const Token& t) const {
    return {file_, t.line, t.col,
            t.col + static_cast<int>(std::max<size_t>(t.text.size(), 1))};
  }
  [[noreturn]] void fail(const Token& t, std::string msg) const {
    throw SyntaxError{span(t), std::move(msg)};
  }

  Attributes attributes() {
    Attributes attrs;
    while (accept("@")) {
      std::string name = ident("attribute name");
      uint64_t value = 1;
      if (accept("(")) {
        value = number();
        expect(")");
      }
      attrs[name] = value;
    }
    return attrs;
  }

  std::vector<PortDef> port_list(Direction dir) {
    std::vector<PortDef> ports;
    expect("(");
    if (!is(")")) {
      do {
        const Token& t = peek();
        PortDef p;
        p.name = ident("port name");
        expect(":");
        uint64_t w = number();
        if (w == 0 || w > 64) fail(t, "port width must be in [1, 64]");
        p.width = static_cast<uint32_t>(w);
        p.dir = dir;
        p.span = span(t);
        if (p.name == "go" || p.name == "done") {
          if (p.width != 1) fail(t, "port '" + p.name + "' must be 1 bit");
          continue;  // implicit interface ports are re-added below
        }
        ports.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    return ports;
  }

  Component component() {
    Component comp;
    const Token& start = peek();
    comp.attrs = attributes();
    if (is_ident("static")) {
      next();
      expect("<");
      comp.latency = number();
      expect(">");
    }
    keyword("component");
    comp.span = span(peek());
    comp.name = ident("component name");
    comp.ports = port_list(Direction::kInput);
    expect("->");
    for (PortDef& p : port_list(Direction::kOutput))
      comp.ports.push_back(std::move(p));
    comp.add_interface_ports();
    (void)start;
    comp_ = &comp;
    expect("{");
    if (is_ident("cells")) {
      next();
      expect("{");
      while (!accept("}")) comp.cells.push_back(cell());
    }
    if (is_ident("wires")) {
      next();
      expect("{");
      while (!accept("}")) wire_item(comp);
    }
    if (is_ident("control")) {
      next();
      expect("{");
      comp.control = block("}", false);
    }
    expect("}");
    comp_ = nullptr;
    return comp;
  }

  Cell cell() {
    Cell c;
    c.attrs = attributes();
    c.span = span(peek());
    c.name = ident("cell name");
    expect("=");
    c.prototype = ident("prototype name");
    expect("(");
    if (!is(")")) {
      do {
        c.args.push_back(number());
      } while (accept(","));
    }
    expect(")");
    expect(";");
    return c;
  }

  void wire_item(Component& comp) {
    size_t mark = pos_;
    Attributes attrs = attributes();
    if (is_ident("group") && peek(1).kind == Token::Kind::kIdent) {
      next();
      Group g;
      g.attrs = std::move(attrs);
      g.span = span(peek());
      g.name = ident("group name");
      expect("{");
      while (!accept("}")) g.assignments.push_back(assignment());
      comp.groups.push_back(std::move(g));
      return;
    }
    if (is_ident("static") && is("<", 1)) {
      next();
      next();
      StaticGroup g;
      g.latency = number();
      expect(">");
      if (is_ident("group") && peek(1).kind == Token::Kind::kIdent) next();
      g.attrs = std::move(attrs);
      g.span = span(peek());
      g.name = ident("group name");
      expect("{");
      while (!accept("}")) g.assignments.push_back(assignment());
      comp.static_groups.push_back(std::move(g));
      return;
    }
    if (!attrs.empty()) fail(toks_[mark], "attributes are not allowed here");
    comp.continuous.push_back(assignment());
  }

  PortRef port_ref() {
    std::string first = ident("port");
    if (accept(".")) return PortRef::Cell(first, ident("port name"));
    if (accept("[")) {
      const Token& t = peek();
      std::string sig = ident("go or done");
      if (sig != "go" && sig != "done") fail(t, "expected 'go' or 'done'");
      expect("]");
      return sig == "go" ? PortRef::Go(first) : PortRef::Done(first);
    }
    return PortRef::This(first);
  }

  Atom atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::kNumber) {
      next();
      return Constant{t.value, std::nullopt};
    }
    if (t.kind == Token::Kind::kSized) {
      next();
      return Constant{t.value, t.width};
    }
    if (t.kind == Token::Kind::kIdent) return port_ref();
    fail(t, "expected a port or constant, found " + describe(t));
  }

  bool guard_follows() const {
    for (size_t i = pos_; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.kind == Token::Kind::kEof) return false;
      if (t.kind != Token::Kind::kPunct) continue;
      if (t.text == "?") return true;
      if (t.text == ";" || t.text == "{" || t.text == "}") return false;
    }
    return false;
  }

  Assignment assignment() {
    Assignment a;
    const Token& start = peek();
    a.dst = port_ref();
    expect("=");
    if (guard_follows()) a.guard = guard();
    a.src = atom();
    expect(";");
    a.span = span(start);
    return a;
  }

  Guard guard() {
    timing_.reset();
    const Token& start = peek();
    GuardExpr e = guard_or(true);
    expect("?");
    Guard g;
    g.cond = std::move(e);
    g.timing = timing_;
    timing_.reset();
    if (g.timing && g.timing->begin >= g.timing->end)
      fail(start, "empty timing interval");
    return g;
  }

  GuardExpr guard_or(bool top) {
    GuardExpr e = guard_and(top);
    while (is("|")) {
      if (top && timing_)
        fail(peek(), "a timing guard must be a top-level conjunct");
      next();
      e = GuardExpr::Or(std::move(e), guard_and(false));
      top = false;
    }
    return e;
  }

  GuardExpr guard_and(bool top) {
    GuardExpr e = guard_unary(top);
    while (accept("&")) e = conjoin_raw(std::move(e), guard_unary(top));
    return e;
  }

  // Like `conjoin`, but only the placeholder left by a timing term folds.
  GuardExpr conjoin_raw(GuardExpr a, GuardExpr b) {
    if (a.is_true()) return b;
    if (b.is_true()) return a;
    return GuardExpr::And(std::move(a), std::move(b));
  }

  GuardExpr guard_unary(bool top) {
    if (is("%")) {
      const Token& t = next();
      if (!top || timing_)
        fail(t, "a timing guard must be a top-level conjunct");
      if (accept("[")) {
        uint64_t b = number();
        expect(":");
        uint64_t e = number();
        expect("]");
        timing_ = Interval{b, e};
      } else {
        uint64_t k = number();
        timing_ = Interval{k, k + 1};
      }
      return GuardExpr::True();
    }
    if (accept("!")) return GuardExpr::Not(guard_unary(false));
    if (accept("(")) {
      GuardExpr e = guard_or(false);
      expect(")");
      return e;
    }
    Atom lhs = atom();
    static const std::pair<const char*, CmpOp> ops[] = {
        {"==", CmpOp::kEq}, {"!=", CmpOp::kNeq}, {"<", CmpOp::kLt},
        {">", CmpOp::kGt},  {"<=", CmpOp::kLe},  {">=", CmpOp::kGe}};
    for (const auto& [text, op] : ops) {
      if (is(text)) {
        next();
        return GuardExpr::Cmp(op, std::move(lhs), atom());
      }
    }
    const PortRef* p = as_port(lhs);
    if (!p) fail(peek(), "a constant cannot be used as a guard");
    return GuardExpr::Port(*p);
  }

  // Statements up to `close`. Zero statements give Empty, several an
  // implicit (static) seq.
  Control block(const char* close, bool in_static) {
    std::vector<Control> stmts = statements(close, in_static);
    if (stmts.empty()) return Control::Empty();
    if (stmts.size() == 1) return std::move(stmts[0]);
    return in_static ? Control::StaticSeq(std::move(stmts))
                     : Control::Seq(std::move(stmts));
  }

  std::vector<Control> statements(const char* close, bool in_static) {
    std::vector<Control> out;
    while (!accept(close)) out.push_back(statement(in_static));
    return out;
  }

  Control braced(bool in_static) {
    expect("{");
    return block("}", in_static);
  }

  std::vector<Binding> bindings() {
    std::vector<Binding> out;
    expect("(");
    if (!is(")")) {
      do {
        Binding b;
        b.port = ident("port name");
        expect("=");
        b.value = atom();
        out.push_back(std::move(b));
      } while (accept(","));
    }
    expect(")");
    return out;
  }

  Control statement(bool in_static) {
    const Token& start = peek();
    Attributes attrs = attributes();
    Control c;
    if (is_ident("static") &&
        (is("<", 1) || peek(1).kind == Token::Kind::kIdent)) {
      next();
      std::optional<Cycles> lat;
      if (accept("<")) {
        lat = number();
        expect(">");
      }
      c = static_statement();
      c.latency = lat;
    } else if ((is_ident("seq") || is_ident("par")) && is("{", 1)) {
      bool seq = next().text == "seq";
      expect("{");
      auto kids = statements("}", in_static);
      c = seq ? Control::Seq(std::move(kids)) : Control::Par(std::move(kids));
    } else if (is_ident("if") && peek(1).kind == Token::Kind::kIdent) {
      next();
      PortRef cond = port_ref();
      Control t = braced(false);
      Control f;
      if (is_ident("else")) {
        next();
        f = braced(false);
      }
      c = Control::If(cond, std::move(t), std::move(f));
    } else if (is_ident("while") && peek(1).kind == Token::Kind::kIdent) {
      next();
      PortRef cond = port_ref();
      c = Control::While(cond, braced(false));
    } else if (is_ident("repeat") && peek(1).kind == Token::Kind::kNumber) {
      next();
      uint64_t n = number();
      c = Control::Repeat(n, braced(false));
    } else if (is_ident("invoke") && peek(1).kind == Token::Kind::kIdent) {
      next();
      std::string cell = ident();
      c = Control::Invoke(cell, bindings());
      expect(";");
    } else {
      std::string name = ident("control statement");
      expect(";");
      c = comp_->find_static_group(name) ? Control::StaticEnable(name)
                                         : Control::Enable(name);
    }
    c.attrs = std::move(attrs);
    c.span = span(start);
    return c;
  }

  Control static_statement() {
    const Token& t = peek();
    std::string kw = ident("static control keyword");
    if (kw == "seq" || kw == "par") {
      expect("{");
      auto kids = statements("}", true);
      return kw == "seq" ? Control::StaticSeq(std::move(kids))
                         : Control::StaticPar(std::move(kids));
    }
    if (kw == "if") {
      PortRef cond = port_ref();
      Control th = braced(true);
      Control el;
      if (is_ident("else")) {
        next();
        el = braced(true);
      }
      return Control::StaticIf(cond, std::move(th), std::move(el));
    }
    if (kw == "repeat") {
      uint64_t n = number();
      return Control::StaticRepeat(n, braced(true));
    }
    if (kw == "invoke") {
      std::string cell = ident();
      Control c = Control::StaticInvoke(cell, bindings());
      expect(";");
      return c;
    }
    fail(t, "expected seq, par, if, repeat or invoke after 'static'");
  }

  std::vector<Token> toks_;
  std::string file_;
  size_t pos_ = 0;
  std::optional<Interval> timing_;
  const Component* comp_ = nullptr;
};

}  // namespace

ParseResult parse(std::string_view text, const std::string& file) {
  ParseResult result;
  try {
    std::vector<Token> toks = Lexer(text, file).run();
    result.program = Parser(std::move(toks), file).program();
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(
        {Diagnostic::Severity::kError, e.message, e.span});
  }
  return result;
}

Program parse_valid(std::string_view text, const std::string& file) {
  ParseResult r = parse(text, file);
  std::vector<Diagnostic> diags = r.diagnostics;
  if (r.program) {
    auto more = validate(*r.program);
    diags.insert(diags.end(), more.begin(), more.end());
  }
  if (has_errors(diags) || !r.program) {
    std::ostringstream msg;
    for (const Diagnostic& d : diags) msg << d.str() << "\n";
    throw std::runtime_error(msg.str());
  }
  return std::move(*r.program);
}

}  // namespace uil
