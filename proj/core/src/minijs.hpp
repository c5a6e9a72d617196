#pragma once

// Internal mini-js grammar: a JavaScript-like subset covering imports and
// require bindings, function declarations, var/let/const, assignments,
// calls, member access, if/while/for, blocks, arrays and object literals,
// plus arrow/function expressions whose bodies nest as child statements.
// Not supported: classes, destructuring, regex literals, async/await.

#include <optional>
#include <string>
#include <vector>

#include "snipfix/source_text.hpp"

namespace snipfix::minijs {

struct Token {
  enum class Kind { Ident, Keyword, Number, String, Template, Punct, End };
  Kind kind = Kind::End;
  std::string text;   // raw spelling (strings keep quotes)
  std::string value;  // string literal contents without quotes
  int line = 0;       // 1-based
  int col = 0;        // 1-based
};

std::vector<Token> lex(const SourceText& src);  // throws ParseError

struct Stmt;

struct Expr {
  enum class Kind {
    Ident,
    Number,
    String,
    Template,
    Literal,   // true / false / null / undefined / this
    Member,    // kids[0] = base, name = property
    Index,     // kids[0] = base, kids[1] = index
    Call,      // kids[0] = callee, kids[1..] = arguments
    New,       // kids[0] = constructed expression
    Assign,    // kids[0] = lhs, kids[1] = rhs, name = operator
    Binary,    // kids[0] = lhs, kids[1] = rhs, name = operator
    Unary,     // kids[0] = operand, name = operator
    Postfix,   // kids[0] = operand, name = operator
    Ternary,   // kids[0] = cond, kids[1] = then, kids[2] = else
    Object,    // kids = Property entries
    Property,  // name = key, kids[0] = value (absent for shorthand)
    Array,     // kids = elements
    Spread,    // kids[0] = expression
    Arrow,     // params + body statements
    Function,  // function expression: optional name, params + body
  };

  Kind kind = Kind::Ident;
  std::string name;
  std::vector<Expr> kids;
  std::vector<std::string> params;  // Arrow / Function
  std::vector<Stmt> body;           // Arrow / Function
  int line = 0;
  int col = 0;
};

struct Stmt {
  enum class Kind {
    Import,
    VarDecl,
    FuncDecl,
    If,
    While,
    For,
    Return,
    Expr,
    Block,
    Empty,
  };

  Kind kind = Kind::Expr;
  int start_line = 0;
  int end_line = 0;
  int tok_begin = 0;  // token indices into the lexed stream, inclusive
  int tok_end = 0;

  std::string name;    // FuncDecl name; Import default binding
  std::string module;  // Import module id; also set for require() bindings
  bool is_require = false;
  std::vector<std::string> params;  // FuncDecl

  // VarDecl declarators; inits[i] applies to decl_names[i] when set.
  std::vector<std::string> decl_names;
  std::vector<std::optional<Expr>> inits;

  std::vector<Expr> exprs;     // Expr/Return: value; If/While/For: headers
  std::vector<Stmt> children;  // bodies (then+else for If)
  int else_index = -1;         // If: children[else_index..] form the else arm
  bool synthetic = false;      // expression-bodied arrows get a wrapped child
};

struct Program {
  std::vector<Stmt> stmts;
  std::vector<Token> tokens;
  int line_count = 0;
};

Program parse_program(const SourceText& src);  // throws ParseError

/// Root identifier at the bottom of a Member/Call/Index chain, if any.
const Expr* chain_root(const Expr& expr);

}  // namespace snipfix::minijs
