#include "minijs.hpp"

#include <array>
#include <cctype>
#include <string_view>
#include <unordered_set>

#include "snipfix/errors.hpp"

namespace snipfix::minijs {

namespace {

const std::unordered_set<std::string>& keywords() {
  static const std::unordered_set<std::string> kw = {
      "var",    "let",   "const", "function", "return",     "if",
      "else",   "while", "for",   "import",   "from",       "new",
      "typeof", "in",    "of",    "true",     "false",      "null",
      "this",   "void",  "delete", "undefined", "instanceof",
  };
  return kw;
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Longest-match punctuation table, longest first.
constexpr std::array<std::string_view, 36> kPuncts = {
    "===", "!==", ">>>", "...", "&&=", "||=", "?\?=", "=>", "==", "!=",
    "<=",  ">=",  "&&",  "||",  "??",  "?.",  "++",  "--", "+=", "-=",
    "*=",  "/=",  "%=",  "**",  "<<",  ">>",  "+",   "-",  "*",  "/",
    "%",   "=",   "<",   ">",   "!",   "?",
};
constexpr std::string_view kSinglePuncts = ":;,.()[]{}&|^~";

}  // namespace

std::vector<Token> lex(const SourceText& src) {
  std::vector<Token> out;
  const auto& lines = src.lines();
  int li = 0;         // 0-based line index
  size_t ci = 0;      // column index into the current line
  bool in_block_comment = false;
  int block_comment_line = 1;

  auto cur = [&]() -> const std::string& { return lines[li]; };

  for (li = 0; li < static_cast<int>(lines.size()); ++li) {
    ci = 0;
    // templates can advance li mid-line, so always read through cur()
    while (ci < cur().size()) {
      const std::string& line = cur();
      if (in_block_comment) {
        size_t close = line.find("*/", ci);
        if (close == std::string::npos) {
          ci = line.size();
        } else {
          ci = close + 2;
          in_block_comment = false;
        }
        continue;
      }
      char c = line[ci];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++ci;
        continue;
      }
      if (c == '/' && ci + 1 < line.size() && line[ci + 1] == '/') break;
      if (c == '/' && ci + 1 < line.size() && line[ci + 1] == '*') {
        in_block_comment = true;
        block_comment_line = li + 1;
        ci += 2;
        continue;
      }
      Token tok;
      tok.line = li + 1;
      tok.col = static_cast<int>(ci) + 1;
      if (ident_start(c)) {
        size_t start = ci;
        while (ci < line.size() && ident_char(line[ci])) ++ci;
        tok.text = line.substr(start, ci - start);
        tok.kind = keywords().count(tok.text) ? Token::Kind::Keyword
                                              : Token::Kind::Ident;
        out.push_back(std::move(tok));
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = ci;
        while (ci < line.size() &&
               (std::isalnum(static_cast<unsigned char>(line[ci])) ||
                line[ci] == '.')) {
          ++ci;
        }
        tok.kind = Token::Kind::Number;
        tok.text = line.substr(start, ci - start);
        out.push_back(std::move(tok));
        continue;
      }
      if (c == '\'' || c == '"') {
        size_t start = ci++;
        std::string value;
        bool closed = false;
        while (ci < line.size()) {
          char d = line[ci];
          if (d == '\\' && ci + 1 < line.size()) {
            value.push_back(line[ci + 1]);
            ci += 2;
            continue;
          }
          if (d == c) {
            closed = true;
            ++ci;
            break;
          }
          value.push_back(d);
          ++ci;
        }
        if (!closed) {
          throw ParseError(li + 1, "unterminated string literal");
        }
        tok.kind = Token::Kind::String;
        tok.text = line.substr(start, ci - start);
        tok.value = std::move(value);
        out.push_back(std::move(tok));
        continue;
      }
      if (c == '`') {
        // Template literals may span lines; holes are kept opaque.
        tok.kind = Token::Kind::Template;
        std::string raw = "`";
        ++ci;
        bool closed = false;
        while (!closed) {
          if (ci >= cur().size()) {
            raw += "\n";
            if (li + 1 >= static_cast<int>(lines.size())) {
              throw ParseError(tok.line, "unterminated template literal");
            }
            ++li;
            ci = 0;
            continue;
          }
          char d = cur()[ci];
          if (d == '\\' && ci + 1 < cur().size()) {
            raw += cur().substr(ci, 2);
            ci += 2;
            continue;
          }
          raw.push_back(d);
          ++ci;
          if (d == '`') closed = true;
        }
        tok.text = std::move(raw);
        out.push_back(std::move(tok));
        continue;
      }
      bool matched = false;
      for (std::string_view p : kPuncts) {
        if (line.compare(ci, p.size(), p) == 0) {
          tok.kind = Token::Kind::Punct;
          tok.text = std::string(p);
          ci += p.size();
          out.push_back(std::move(tok));
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (kSinglePuncts.find(c) != std::string_view::npos) {
        tok.kind = Token::Kind::Punct;
        tok.text = std::string(1, c);
        ++ci;
        out.push_back(std::move(tok));
        continue;
      }
      throw ParseError(li + 1, std::string("unexpected character '") + c + "'");
    }
  }
  if (in_block_comment) {
    throw ParseError(block_comment_line, "unterminated block comment");
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = src.line_count() + 1;
  end.col = 1;
  out.push_back(std::move(end));
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<Stmt> parse_all() {
    std::vector<Stmt> stmts;
    while (!at_end()) stmts.push_back(parse_statement());
    return stmts;
  }

 private:
  std::vector<Token> toks_;
  int pos_ = 0;
  int depth_ = 0;

  // Predictions are untrusted input; cap nesting instead of overflowing
  // the stack.
  static constexpr int kMaxNesting = 300;

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxNesting) {
        throw ParseError(parser.peek().line, "nesting too deep");
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  const Token& peek(int off = 0) const {
    int i = pos_ + off;
    if (i >= static_cast<int>(toks_.size())) return toks_.back();
    return toks_[i];
  }
  const Token& prev() const { return toks_[pos_ > 0 ? pos_ - 1 : 0]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool at_punct(std::string_view p) const {
    return peek().kind == Token::Kind::Punct && peek().text == p;
  }
  bool at_keyword(std::string_view k) const {
    return peek().kind == Token::Kind::Keyword && peek().text == k;
  }
  void advance() { if (!at_end()) ++pos_; }
  bool eat_punct(std::string_view p) {
    if (at_punct(p)) { advance(); return true; }
    return false;
  }
  bool eat_keyword(std::string_view k) {
    if (at_keyword(k)) { advance(); return true; }
    return false;
  }
  void expect_punct(std::string_view p, const char* what) {
    if (!eat_punct(p)) {
      throw ParseError(peek().line, std::string("expected '") + std::string(p) +
                                        "' " + what);
    }
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) {
      throw ParseError(peek().line, std::string("expected identifier ") + what);
    }
    std::string name = peek().text;
    advance();
    return name;
  }

  // Optional semicolon: allow omission before '}', end of input, or a line
  // break after the statement's last token.
  void finish_statement() {
    if (eat_punct(";")) return;
    if (at_end() || at_punct("}")) return;
    if (peek().line > prev().line) return;
    throw ParseError(peek().line, "expected ';'");
  }

  Stmt parse_statement() {
    DepthGuard guard(*this);
    int tok_begin = pos_;
    Stmt s;
    if (at_keyword("import")) {
      s = parse_import();
    } else if (at_keyword("var") || at_keyword("let") || at_keyword("const")) {
      s = parse_var_decl();
      finish_statement();
    } else if (at_keyword("function")) {
      s = parse_func_decl();
    } else if (at_keyword("if")) {
      s = parse_if();
    } else if (at_keyword("while")) {
      s = parse_while();
    } else if (at_keyword("for")) {
      s = parse_for();
    } else if (at_keyword("return")) {
      s = parse_return();
    } else if (at_punct("{")) {
      s.kind = Stmt::Kind::Block;
      advance();
      while (!at_punct("}")) {
        if (at_end()) throw ParseError(peek().line, "unterminated block");
        s.children.push_back(parse_statement());
      }
      advance();
    } else if (at_punct(";")) {
      s.kind = Stmt::Kind::Empty;
      advance();
    } else {
      s.kind = Stmt::Kind::Expr;
      s.exprs.push_back(parse_sequence());
      finish_statement();
    }
    s.tok_begin = tok_begin;
    s.tok_end = pos_ - 1;
    s.start_line = toks_[tok_begin].line;
    s.end_line = toks_[s.tok_end].line;
    return s;
  }

  Stmt parse_import() {
    Stmt s;
    s.kind = Stmt::Kind::Import;
    advance();  // import
    if (peek().kind == Token::Kind::String) {
      s.module = peek().value;
      advance();
      finish_statement();
      return s;
    }
    if (eat_punct("*")) {
      if (peek().kind != Token::Kind::Ident || peek().text != "as") {
        throw ParseError(peek().line, "expected 'as' in namespace import");
      }
      advance();
      s.name = expect_ident("after 'as'");
    } else if (at_punct("{")) {
      advance();
      while (!at_punct("}")) {
        std::string item = expect_ident("in import list");
        if (s.name.empty()) s.name = item;
        if (!eat_punct(",")) break;
      }
      expect_punct("}", "after import list");
    } else {
      s.name = expect_ident("after 'import'");
    }
    if (!eat_keyword("from")) {
      throw ParseError(peek().line, "expected 'from' in import");
    }
    if (peek().kind != Token::Kind::String) {
      throw ParseError(peek().line, "expected module string in import");
    }
    s.module = peek().value;
    advance();
    finish_statement();
    return s;
  }

  Stmt parse_var_decl() {
    Stmt s;
    s.kind = Stmt::Kind::VarDecl;
    advance();  // var / let / const
    while (true) {
      std::string name = expect_ident("in declaration");
      std::optional<Expr> init;
      if (eat_punct("=")) init = parse_assign();
      s.decl_names.push_back(name);
      s.inits.push_back(std::move(init));
      if (!eat_punct(",")) break;
    }
    // `const x = require('mod')` is the CommonJS import form.
    if (s.decl_names.size() == 1 && s.inits[0] &&
        s.inits[0]->kind == Expr::Kind::Call &&
        s.inits[0]->kids[0].kind == Expr::Kind::Ident &&
        s.inits[0]->kids[0].name == "require" &&
        s.inits[0]->kids.size() == 2 &&
        s.inits[0]->kids[1].kind == Expr::Kind::String) {
      s.is_require = true;
      s.name = s.decl_names[0];
      s.module = s.inits[0]->kids[1].name;
    }
    return s;
  }

  std::vector<std::string> parse_param_list() {
    std::vector<std::string> params;
    expect_punct("(", "before parameter list");
    while (!at_punct(")")) {
      eat_punct("...");
      params.push_back(expect_ident("in parameter list"));
      if (!eat_punct(",")) break;
    }
    expect_punct(")", "after parameter list");
    return params;
  }

  std::vector<Stmt> parse_braced_body() {
    expect_punct("{", "before body");
    std::vector<Stmt> body;
    while (!at_punct("}")) {
      if (at_end()) throw ParseError(peek().line, "unterminated body");
      body.push_back(parse_statement());
    }
    advance();
    return body;
  }

  Stmt parse_func_decl() {
    Stmt s;
    s.kind = Stmt::Kind::FuncDecl;
    advance();  // function
    s.name = expect_ident("after 'function'");
    s.params = parse_param_list();
    s.children = parse_braced_body();
    return s;
  }

  std::vector<Stmt> parse_body_or_stmt() {
    if (at_punct("{")) return parse_braced_body();
    std::vector<Stmt> body;
    body.push_back(parse_statement());
    return body;
  }

  Stmt parse_if() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    advance();  // if
    expect_punct("(", "after 'if'");
    s.exprs.push_back(parse_sequence());
    expect_punct(")", "after condition");
    s.children = parse_body_or_stmt();
    s.else_index = static_cast<int>(s.children.size());
    if (eat_keyword("else")) {
      auto arm = parse_body_or_stmt();
      for (auto& st : arm) s.children.push_back(std::move(st));
    }
    return s;
  }

  Stmt parse_while() {
    Stmt s;
    s.kind = Stmt::Kind::While;
    advance();  // while
    expect_punct("(", "after 'while'");
    s.exprs.push_back(parse_sequence());
    expect_punct(")", "after condition");
    s.children = parse_body_or_stmt();
    return s;
  }

  Stmt parse_for() {
    Stmt s;
    s.kind = Stmt::Kind::For;
    advance();  // for
    expect_punct("(", "after 'for'");
    if (at_keyword("var") || at_keyword("let") || at_keyword("const")) {
      Stmt init = parse_var_decl();
      if (eat_keyword("of") || eat_keyword("in")) {
        s.exprs.push_back(parse_sequence());
        expect_punct(")", "after for-of/in");
        s.children = parse_body_or_stmt();
        return s;
      }
      for (auto& i : init.inits) {
        if (i) s.exprs.push_back(std::move(*i));
      }
    } else if (!at_punct(";")) {
      s.exprs.push_back(parse_sequence());
      if (eat_keyword("of") || eat_keyword("in")) {
        s.exprs.push_back(parse_sequence());
        expect_punct(")", "after for-of/in");
        s.children = parse_body_or_stmt();
        return s;
      }
    }
    expect_punct(";", "in 'for' header");
    if (!at_punct(";")) s.exprs.push_back(parse_sequence());
    expect_punct(";", "in 'for' header");
    if (!at_punct(")")) s.exprs.push_back(parse_sequence());
    expect_punct(")", "after 'for' header");
    s.children = parse_body_or_stmt();
    return s;
  }

  Stmt parse_return() {
    Stmt s;
    s.kind = Stmt::Kind::Return;
    int kw_line = peek().line;
    advance();  // return
    if (!at_punct(";") && !at_punct("}") && !at_end() &&
        peek().line == kw_line) {
      s.exprs.push_back(parse_sequence());
    }
    finish_statement();
    return s;
  }

  // ---- expressions ----

  Expr parse_sequence() {
    Expr e = parse_assign();
    while (at_punct(",")) {
      Expr seq;
      seq.kind = Expr::Kind::Binary;
      seq.name = ",";
      seq.line = e.line;
      seq.col = e.col;
      advance();
      Expr rhs = parse_assign();
      seq.kids.push_back(std::move(e));
      seq.kids.push_back(std::move(rhs));
      e = std::move(seq);
    }
    return e;
  }

  bool is_assign_op(const Token& t) const {
    if (t.kind != Token::Kind::Punct) return false;
    return t.text == "=" || t.text == "+=" || t.text == "-=" ||
           t.text == "*=" || t.text == "/=" || t.text == "%=" ||
           t.text == "&&=" || t.text == "||=" || t.text == "?\?=";
  }

  Expr parse_assign() {
    DepthGuard guard(*this);
    Expr lhs = parse_ternary();
    if (is_assign_op(peek())) {
      Expr e;
      e.kind = Expr::Kind::Assign;
      e.name = peek().text;
      e.line = lhs.line;
      e.col = lhs.col;
      advance();
      Expr rhs = parse_assign();
      e.kids.push_back(std::move(lhs));
      e.kids.push_back(std::move(rhs));
      return e;
    }
    return lhs;
  }

  Expr parse_ternary() {
    Expr cond = parse_binary();
    if (at_punct("?")) {
      advance();
      Expr e;
      e.kind = Expr::Kind::Ternary;
      e.line = cond.line;
      e.col = cond.col;
      Expr then = parse_assign();
      expect_punct(":", "in conditional expression");
      Expr other = parse_assign();
      e.kids.push_back(std::move(cond));
      e.kids.push_back(std::move(then));
      e.kids.push_back(std::move(other));
      return e;
    }
    return cond;
  }

  bool is_binary_op(const Token& t) const {
    if (t.kind == Token::Kind::Keyword) {
      return t.text == "in" || t.text == "instanceof";
    }
    if (t.kind != Token::Kind::Punct) return false;
    static const std::unordered_set<std::string> ops = {
        "+",  "-",  "*",  "/",  "%",  "**", "==", "===", "!=", "!==",
        "<",  ">",  "<=", ">=", "&&", "||", "??", "&",   "|",  "^",
        "<<", ">>", ">>>",
    };
    return ops.count(t.text) > 0;
  }

  Expr parse_binary() {
    // Left-associative chain; precedence is irrelevant for this grammar's
    // consumers, which only inspect operand structure.
    Expr lhs = parse_unary();
    while (is_binary_op(peek())) {
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.name = peek().text;
      e.line = lhs.line;
      e.col = lhs.col;
      advance();
      Expr rhs = parse_unary();
      e.kids.push_back(std::move(lhs));
      e.kids.push_back(std::move(rhs));
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr parse_unary() {
    const Token& t = peek();
    bool unary_kw = t.kind == Token::Kind::Keyword &&
                    (t.text == "typeof" || t.text == "void" ||
                     t.text == "delete");
    bool unary_punct = t.kind == Token::Kind::Punct &&
                       (t.text == "!" || t.text == "-" || t.text == "+" ||
                        t.text == "~" || t.text == "++" || t.text == "--");
    if (unary_kw || unary_punct) {
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.name = t.text;
      e.line = t.line;
      e.col = t.col;
      advance();
      e.kids.push_back(parse_unary());
      return e;
    }
    if (t.kind == Token::Kind::Keyword && t.text == "new") {
      Expr e;
      e.kind = Expr::Kind::New;
      e.line = t.line;
      e.col = t.col;
      advance();
      e.kids.push_back(parse_postfix());
      return e;
    }
    return parse_postfix();
  }

  Expr parse_postfix() {
    Expr e = parse_primary();
    while (true) {
      if (at_punct(".") || at_punct("?.")) {
        advance();
        Expr m;
        m.kind = Expr::Kind::Member;
        m.line = e.line;
        m.col = e.col;
        if (peek().kind != Token::Kind::Ident &&
            peek().kind != Token::Kind::Keyword) {
          throw ParseError(peek().line, "expected property name after '.'");
        }
        m.name = peek().text;
        advance();
        m.kids.push_back(std::move(e));
        e = std::move(m);
        continue;
      }
      if (at_punct("(")) {
        advance();
        Expr call;
        call.kind = Expr::Kind::Call;
        call.line = e.line;
        call.col = e.col;
        call.kids.push_back(std::move(e));
        while (!at_punct(")")) {
          if (at_end()) throw ParseError(peek().line, "unterminated call");
          call.kids.push_back(parse_assign_or_spread());
          if (!eat_punct(",")) break;
        }
        expect_punct(")", "after arguments");
        e = std::move(call);
        continue;
      }
      if (at_punct("[")) {
        advance();
        Expr idx;
        idx.kind = Expr::Kind::Index;
        idx.line = e.line;
        idx.col = e.col;
        idx.kids.push_back(std::move(e));
        idx.kids.push_back(parse_sequence());
        expect_punct("]", "after index");
        e = std::move(idx);
        continue;
      }
      if (at_punct("++") || at_punct("--")) {
        Expr p;
        p.kind = Expr::Kind::Postfix;
        p.name = peek().text;
        p.line = e.line;
        p.col = e.col;
        advance();
        p.kids.push_back(std::move(e));
        e = std::move(p);
        continue;
      }
      break;
    }
    return e;
  }

  Expr parse_assign_or_spread() {
    if (at_punct("...")) {
      Expr s;
      s.kind = Expr::Kind::Spread;
      s.line = peek().line;
      s.col = peek().col;
      advance();
      s.kids.push_back(parse_assign());
      return s;
    }
    return parse_assign();
  }

  // Wrap an expression-bodied arrow in a synthetic return statement so the
  // analyses see a uniform body shape.
  std::vector<Stmt> arrow_expr_body(Expr value, int tok_begin) {
    Stmt ret;
    ret.kind = Stmt::Kind::Return;
    ret.synthetic = true;
    ret.tok_begin = tok_begin;
    ret.tok_end = pos_ - 1;
    ret.start_line = value.line;
    ret.end_line = toks_[ret.tok_end].line;
    ret.exprs.push_back(std::move(value));
    std::vector<Stmt> body;
    body.push_back(std::move(ret));
    return body;
  }

  // Decide whether '(' opens arrow parameters by scanning to the matching
  // ')' and checking for '=>'.
  bool paren_starts_arrow() const {
    int depth = 0;
    int i = pos_;
    while (i < static_cast<int>(toks_.size())) {
      const Token& t = toks_[i];
      if (t.kind == Token::Kind::End) return false;
      if (t.kind == Token::Kind::Punct) {
        if (t.text == "(") ++depth;
        if (t.text == ")") {
          --depth;
          if (depth == 0) {
            return i + 1 < static_cast<int>(toks_.size()) &&
                   toks_[i + 1].kind == Token::Kind::Punct &&
                   toks_[i + 1].text == "=>";
          }
        }
      }
      ++i;
    }
    return false;
  }

  Expr parse_arrow_after_params(std::vector<std::string> params, int line,
                                int col) {
    expect_punct("=>", "in arrow function");
    Expr e;
    e.kind = Expr::Kind::Arrow;
    e.params = std::move(params);
    e.line = line;
    e.col = col;
    if (at_punct("{")) {
      e.body = parse_braced_body();
    } else {
      int tok_begin = pos_;
      e.body = arrow_expr_body(parse_assign(), tok_begin);
    }
    return e;
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Ident: {
        if (peek(1).kind == Token::Kind::Punct && peek(1).text == "=>") {
          std::vector<std::string> params = {t.text};
          int line = t.line, col = t.col;
          advance();
          return parse_arrow_after_params(std::move(params), line, col);
        }
        Expr e;
        e.kind = Expr::Kind::Ident;
        e.name = t.text;
        e.line = t.line;
        e.col = t.col;
        advance();
        return e;
      }
      case Token::Kind::Number: {
        Expr e;
        e.kind = Expr::Kind::Number;
        e.name = t.text;
        e.line = t.line;
        e.col = t.col;
        advance();
        return e;
      }
      case Token::Kind::String: {
        Expr e;
        e.kind = Expr::Kind::String;
        e.name = t.value;
        e.line = t.line;
        e.col = t.col;
        advance();
        return e;
      }
      case Token::Kind::Template: {
        Expr e;
        e.kind = Expr::Kind::Template;
        e.name = t.text;
        e.line = t.line;
        e.col = t.col;
        advance();
        return e;
      }
      case Token::Kind::Keyword: {
        if (t.text == "true" || t.text == "false" || t.text == "null" ||
            t.text == "undefined" || t.text == "this") {
          Expr e;
          e.kind = Expr::Kind::Literal;
          e.name = t.text;
          e.line = t.line;
          e.col = t.col;
          advance();
          return e;
        }
        if (t.text == "function") {
          Expr e;
          e.kind = Expr::Kind::Function;
          e.line = t.line;
          e.col = t.col;
          advance();
          if (peek().kind == Token::Kind::Ident) {
            e.name = peek().text;
            advance();
          }
          e.params = parse_param_list();
          e.body = parse_braced_body();
          return e;
        }
        throw ParseError(t.line, "unexpected keyword '" + t.text + "'");
      }
      case Token::Kind::Punct: {
        if (t.text == "(") {
          if (paren_starts_arrow()) {
            int line = t.line, col = t.col;
            std::vector<std::string> params = parse_param_list();
            return parse_arrow_after_params(std::move(params), line, col);
          }
          advance();
          Expr inner = parse_sequence();
          expect_punct(")", "after parenthesized expression");
          return inner;
        }
        if (t.text == "[") {
          Expr e;
          e.kind = Expr::Kind::Array;
          e.line = t.line;
          e.col = t.col;
          advance();
          while (!at_punct("]")) {
            if (at_end()) throw ParseError(peek().line, "unterminated array");
            e.kids.push_back(parse_assign_or_spread());
            if (!eat_punct(",")) break;
          }
          expect_punct("]", "after array literal");
          return e;
        }
        if (t.text == "{") {
          return parse_object();
        }
        throw ParseError(t.line, "unexpected token '" + t.text + "'");
      }
      case Token::Kind::End:
        throw ParseError(t.line, "unexpected end of input");
    }
    throw ParseError(t.line, "unexpected token");
  }

  Expr parse_object() {
    Expr e;
    e.kind = Expr::Kind::Object;
    e.line = peek().line;
    e.col = peek().col;
    expect_punct("{", "before object literal");
    while (!at_punct("}")) {
      if (at_end()) throw ParseError(peek().line, "unterminated object");
      Expr prop;
      prop.kind = Expr::Kind::Property;
      prop.line = peek().line;
      prop.col = peek().col;
      if (at_punct("...")) {
        advance();
        prop.name = "...";
        prop.kids.push_back(parse_assign());
      } else {
        const Token& key = peek();
        if (key.kind == Token::Kind::Ident || key.kind == Token::Kind::Keyword) {
          prop.name = key.text;
          advance();
        } else if (key.kind == Token::Kind::String ||
                   key.kind == Token::Kind::Number) {
          prop.name = key.kind == Token::Kind::String ? key.value : key.text;
          advance();
        } else if (key.kind == Token::Kind::Punct && key.text == "[") {
          advance();
          prop.kids.push_back(parse_assign());
          expect_punct("]", "after computed key");
          prop.name = "[computed]";
        } else {
          throw ParseError(key.line, "expected property key");
        }
        if (eat_punct(":")) {
          prop.kids.push_back(parse_assign());
        } else if (at_punct("(")) {
          // method shorthand: name(params) { body }
          Expr fn;
          fn.kind = Expr::Kind::Function;
          fn.name = prop.name;
          fn.line = prop.line;
          fn.col = prop.col;
          fn.params = parse_param_list();
          fn.body = parse_braced_body();
          prop.kids.push_back(std::move(fn));
        }
        // bare key: shorthand property, no value expression
      }
      e.kids.push_back(std::move(prop));
      if (!eat_punct(",")) break;
    }
    expect_punct("}", "after object literal");
    return e;
  }
};

}  // namespace

Program parse_program(const SourceText& src) {
  Program prog;
  prog.line_count = src.line_count();
  prog.tokens = lex(src);
  Parser parser(prog.tokens);
  prog.stmts = parser.parse_all();
  return prog;
}

const Expr* chain_root(const Expr& expr) {
  const Expr* e = &expr;
  while (true) {
    switch (e->kind) {
      case Expr::Kind::Member:
      case Expr::Kind::Index:
      case Expr::Kind::Call:
      case Expr::Kind::New:
        e = &e->kids[0];
        break;
      default:
        return e->kind == Expr::Kind::Ident ? e : nullptr;
    }
  }
}

}  // namespace snipfix::minijs
