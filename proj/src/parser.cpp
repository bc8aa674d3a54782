#include "swcert/parser.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace swcert {

namespace {

enum class Tok {
  Ident, Number, LBrace, RBrace, LParen, RParen, Semi, Comma, Colon, Prime,
  Arrow, Assign, Plus, Minus, Star, Slash, Caret, Amp, Bar,
  Lt, Le, Eq, Ge, Gt, End
};

struct Token {
  Tok kind;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    skip_space();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        id.push_back(eat());
      tok_ = {Tok::Ident, id, tok_.line, tok_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      bool dot = false;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) || (!dot && src_[pos_] == '.'))) {
        if (src_[pos_] == '.') dot = true;
        num.push_back(eat());
      }
      tok_ = {Tok::Number, num, tok_.line, tok_.col};
      return;
    }
    if (two('-', '>')) { eat(); eat(); tok_ = {Tok::Arrow, "->", tok_.line, tok_.col}; return; }
    if (two(':', '=')) { eat(); eat(); tok_ = {Tok::Assign, ":=", tok_.line, tok_.col}; return; }
    if (two('<', '=')) { eat(); eat(); tok_ = {Tok::Le, "<=", tok_.line, tok_.col}; return; }
    if (two('>', '=')) { eat(); eat(); tok_ = {Tok::Ge, ">=", tok_.line, tok_.col}; return; }
    if (two('=', '=')) { eat(); eat(); tok_ = {Tok::Eq, "==", tok_.line, tok_.col}; return; }
    Tok k;
    switch (c) {
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ';': k = Tok::Semi; break;
      case ',': k = Tok::Comma; break;
      case ':': k = Tok::Colon; break;
      case '\'': k = Tok::Prime; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '=': k = Tok::Eq; break;
      default: {
        std::ostringstream os;
        os << "unexpected character '" << c << "'";
        throw_syntax(os.str());
        k = Tok::End;
      }
    }
    std::string text(1, eat());
    tok_ = {k, text, tok_.line, tok_.col};
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') { ++line_; col_ = 1; ++pos_; continue; }
      if (std::isspace(static_cast<unsigned char>(c))) { ++col_; ++pos_; continue; }
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
  }

  char eat() {
    char c = src_[pos_++];
    ++col_;
    return c;
  }

  [[noreturn]] void throw_syntax(const std::string& what) const {
    std::ostringstream os;
    os << line_ << ":" << col_ << ": " << what;
    throw std::runtime_error(os.str());
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
public:
  Parser(const std::string& src) : lex_(src) {}

  SwitchedModel parse_system() {
    expect_keyword("system");
    model_.name = expect(Tok::Ident).text;
    expect(Tok::LBrace);
    // Declarations first, then modes/transitions/annotations in any order.
    while (lex_.peek().kind != Tok::RBrace && lex_.peek().kind != Tok::End) parse_item();
    expect(Tok::RBrace);
    if (model_.modes.empty()) fail(lex_.peek(), "at least one mode required");
    return model_;
  }

  Predicate parse_predicate_only(const std::vector<std::string>& vars) {
    vars_ = vars;
    Predicate p = parse_predicate();
    expect(Tok::End);
    return p;
  }

  Poly parse_poly_only(const std::vector<std::string>& vars) {
    vars_ = vars;
    Poly p = parse_expr();
    expect(Tok::End);
    return p;
  }

private:
  void parse_item() {
    Token t = lex_.peek();
    if (t.kind != Tok::Ident) fail(t, "expected a declaration keyword");
    const std::string& kw = t.text;
    if (kw == "const") parse_const();
    else if (kw == "var") parse_vars(model_.state_vars);
    else if (kw == "aux") parse_vars(model_.aux_vars);
    else if (kw == "kind") parse_kind();
    else if (kw == "mode") parse_mode();
    else if (kw == "transition") parse_transition();
    else if (kw == "lyapunov") parse_lyapunov();
    else if (kw == "rate") parse_rate();
    else if (kw == "sigma") parse_sigma();
    else if (kw == "region") parse_region();
    else fail(t, "unknown declaration '" + kw + "'");
  }

  void parse_const() {
    lex_.take();
    std::string name = expect(Tok::Ident).text;
    expect(Tok::Eq);
    Poly v = parse_expr();
    if (!v.is_constant()) fail(lex_.peek(), "constant '" + name + "' must be a number");
    model_.constants[name] = v.constant_term();
    expect(Tok::Semi);
  }

  void parse_vars(std::vector<std::string>& into) {
    lex_.take();
    while (true) {
      Token id = expect(Tok::Ident);
      into.push_back(id.text);
      refresh_vars();
      if (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        continue;
      }
      break;
    }
    expect(Tok::Semi);
  }

  void parse_kind() {
    lex_.take();
    Token id = expect(Tok::Ident);
    auto k = switch_kind_parse(id.text);
    if (!k) fail(id, "unknown kind '" + id.text + "'");
    model_.kind = *k;
    refresh_vars();
    expect(Tok::Semi);
  }

  void parse_mode() {
    lex_.take();
    Token id = expect(Tok::Ident);
    for (const auto& m : model_.modes)
      if (m.id == id.text) fail(id, "duplicate mode id '" + id.text + "'");
    Mode mode;
    mode.id = id.text;
    expect(Tok::LBrace);
    while (lex_.peek().kind != Tok::RBrace) {
      Token t = lex_.peek();
      if (t.kind != Tok::Ident) fail(t, "expected ode/domain/maxdwell");
      if (t.text == "ode") {
        lex_.take();
        expect(Tok::LBrace);
        while (lex_.peek().kind != Tok::RBrace) {
          Token v = expect(Tok::Ident);
          if (!is_var(v.text)) fail(v, "unknown variable '" + v.text + "'");
          expect(Tok::Prime);
          expect(Tok::Eq);
          Poly rhs = parse_expr();
          mode.field.rhs[v.text] = rhs;
          if (lex_.peek().kind == Tok::Semi || lex_.peek().kind == Tok::Comma) lex_.take();
        }
        expect(Tok::RBrace);
      } else if (t.text == "domain") {
        lex_.take();
        mode.domain = parse_predicate();
      } else if (t.text == "maxdwell") {
        lex_.take();
        mode.max_dwell = parse_rational();
      } else {
        fail(t, "expected ode/domain/maxdwell");
      }
    }
    expect(Tok::RBrace);
    // Auxiliary variables without an explicit derivative do not drift.
    for (const auto& v : model_.aux_vars)
      if (!mode.field.defines(v)) mode.field.rhs[v] = Poly(vars_);
    model_.modes.push_back(std::move(mode));
  }

  void parse_transition() {
    lex_.take();
    Transition tr;
    tr.from = expect(Tok::Ident).text;
    expect(Tok::Arrow);
    tr.to = expect(Tok::Ident).text;
    while (lex_.peek().kind == Tok::Ident) {
      const std::string& kw = lex_.peek().text;
      if (kw == "when") {
        lex_.take();
        tr.guard = parse_predicate();
      } else if (kw == "reset") {
        lex_.take();
        while (true) {
          Token v = expect(Tok::Ident);
          if (!is_var(v.text)) fail(v, "unknown variable '" + v.text + "'");
          expect(Tok::Assign);
          tr.reset[v.text] = parse_expr();
          if (lex_.peek().kind == Tok::Comma) {
            lex_.take();
            continue;
          }
          break;
        }
      } else if (kw == "mindwell") {
        lex_.take();
        tr.min_dwell = parse_rational();
      } else {
        break;
      }
    }
    expect(Tok::Semi);
    model_.transitions.push_back(std::move(tr));
  }

  void parse_lyapunov() {
    lex_.take();
    std::string mode = expect(Tok::Ident).text;
    expect(Tok::Colon);
    model_.lyapunov[mode] = parse_expr();
    expect(Tok::Semi);
  }

  void parse_rate() {
    lex_.take();
    std::string mode = expect(Tok::Ident).text;
    expect(Tok::Colon);
    model_.rates[mode] = parse_rational();
    expect(Tok::Semi);
  }

  void parse_sigma() {
    lex_.take();
    model_.sigma = parse_rational();
    expect(Tok::Semi);
  }

  void parse_region() {
    lex_.take();
    model_.region = parse_predicate();
    expect(Tok::Semi);
  }

  Rational parse_rational() {
    Poly p = parse_expr();
    if (!p.is_constant()) fail(lex_.peek(), "expected a rational constant");
    return p.constant_term();
  }

  // predicate := conj ('|' conj)* ; conj := factor ('&' factor)*
  // factor := '(' predicate ')' | atom ; atom := expr cmp expr | true | false
  Predicate parse_predicate() {
    Predicate out = parse_pred_conj();
    while (lex_.peek().kind == Tok::Bar) {
      lex_.take();
      out = out.or_with(parse_pred_conj());
    }
    return out;
  }

  Predicate parse_pred_conj() {
    Predicate out = parse_pred_factor();
    while (lex_.peek().kind == Tok::Amp) {
      lex_.take();
      out = out.and_with(parse_pred_factor());
    }
    return out;
  }

  Predicate parse_pred_factor() {
    if (lex_.peek().kind == Tok::LParen) {
      // Could be a parenthesized predicate or a parenthesized arithmetic
      // expression starting an atom; try the predicate reading first by
      // scanning for a comparison at depth zero after the matching paren.
      if (paren_wraps_predicate()) {
        lex_.take();
        Predicate p = parse_predicate();
        expect(Tok::RParen);
        return p;
      }
    }
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "true") {
      lex_.take();
      return Predicate::top();
    }
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "false") {
      lex_.take();
      return Predicate::bottom();
    }
    Poly lhs = parse_expr();
    Token op = lex_.take();
    Cmp cmp;
    switch (op.kind) {
      case Tok::Lt: cmp = Cmp::Lt; break;
      case Tok::Le: cmp = Cmp::Le; break;
      case Tok::Eq: cmp = Cmp::Eq; break;
      case Tok::Ge: cmp = Cmp::Ge; break;
      case Tok::Gt: cmp = Cmp::Gt; break;
      default: fail(op, "expected a comparison operator");
    }
    Poly rhs = parse_expr();
    return Predicate::atom(lhs - rhs, cmp);
  }

  // expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
  // unary := '-' unary | primary ('^' int)?
  Poly parse_expr() {
    Poly acc = parse_term();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      Token op = lex_.take();
      Poly rhs = parse_term();
      acc = op.kind == Tok::Plus ? acc + rhs : acc - rhs;
    }
    return acc;
  }

  Poly parse_term() {
    Poly acc = parse_unary();
    while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
      Token op = lex_.take();
      Poly rhs = parse_unary();
      if (op.kind == Tok::Star) {
        acc = acc * rhs;
      } else {
        if (!rhs.is_constant() || rhs.constant_term().is_zero())
          fail(op, "division only by a nonzero constant");
        acc = acc.scaled(Rational(1) / rhs.constant_term());
      }
    }
    return acc;
  }

  Poly parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return -parse_unary();
    }
    Poly base = parse_primary();
    if (lex_.peek().kind == Tok::Caret) {
      lex_.take();
      Token e = expect(Tok::Number);
      if (e.text.find('.') != std::string::npos) fail(e, "exponent must be an integer");
      unsigned long p = std::stoul(e.text);
      base = base.pow(static_cast<unsigned>(p));
    }
    return base;
  }

  Poly parse_primary() {
    Token t = lex_.take();
    if (t.kind == Tok::Number) return Poly::constant(Rational::parse(t.text), vars_);
    if (t.kind == Tok::LParen) {
      Poly p = parse_expr();
      expect(Tok::RParen);
      return p;
    }
    if (t.kind == Tok::Ident) {
      auto cit = model_.constants.find(t.text);
      if (cit != model_.constants.end()) return Poly::constant(cit->second, vars_);
      if (!is_var(t.text)) fail(t, "unknown variable '" + t.text + "'");
      return Poly::var(t.text, vars_);
    }
    fail(t, "expected a number, variable or parenthesized expression");
  }

  // Lookahead: does the '(' at the current position enclose |, & or a
  // comparison at depth 1? Then it must be read as a predicate group.
  bool paren_wraps_predicate() {
    // The lexer has no backtracking; scan the raw token stream by copy.
    Lexer probe = lex_;
    probe.take();  // '('
    int depth = 1;
    while (depth > 0) {
      Token t = probe.take();
      if (t.kind == Tok::End) return false;
      if (t.kind == Tok::LParen) ++depth;
      else if (t.kind == Tok::RParen) --depth;
      else if (depth == 1 && (t.kind == Tok::Amp || t.kind == Tok::Bar || t.kind == Tok::Lt ||
                              t.kind == Tok::Le || t.kind == Tok::Eq || t.kind == Tok::Ge ||
                              t.kind == Tok::Gt))
        return true;
    }
    return false;
  }

  bool is_var(const std::string& name) const {
    for (const auto& v : vars_)
      if (v == name) return true;
    return false;
  }

  void refresh_vars() {
    vars_ = model_.continuous_vars();
    if (model_.kind == SwitchKind::Timed) vars_ = merge_vars(vars_, {"tau"});
  }

  Token expect(Tok k) {
    Token t = lex_.take();
    if (t.kind != k) fail(t, "unexpected token '" + t.text + "'");
    return t;
  }

  void expect_keyword(const std::string& kw) {
    Token t = lex_.take();
    if (t.kind != Tok::Ident || t.text != kw) fail(t, "expected '" + kw + "'");
  }

  [[noreturn]] void fail(const Token& t, const std::string& what) {
    std::ostringstream os;
    os << t.line << ":" << t.col << ": " << what;
    throw std::runtime_error(os.str());
  }

  Lexer lex_;
  SwitchedModel model_;
  std::vector<std::string> vars_;
};

}  // namespace

ParseResult parse_model(const std::string& text) {
  ParseResult out;
  try {
    Parser p(text);
    out.model = p.parse_system();
  } catch (const std::exception& e) {
    out.diagnostics.error("parse", e.what());
  }
  return out;
}

Predicate parse_predicate(const std::string& text, const std::vector<std::string>& vars) {
  Parser p(text);
  return p.parse_predicate_only(vars);
}

Poly parse_poly(const std::string& text, const std::vector<std::string>& vars) {
  Parser p(text);
  return p.parse_poly_only(vars);
}

}  // namespace swcert
