#include "snipfix/syntax.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include "minijs.hpp"
#include "snipfix/errors.hpp"

namespace snipfix {

GrammarId grammar_from_name(const std::string& name) {
  if (name == "mini-js") return GrammarId::MiniJs;
  if (name == "braces") return GrammarId::Braces;
  throw std::invalid_argument("unknown grammar: " + name);
}

std::string grammar_name(GrammarId id) {
  return id == GrammarId::MiniJs ? "mini-js" : "braces";
}

SyntaxTree::SyntaxTree(SourceText source, GrammarId grammar,
                       std::vector<SyntaxNode> nodes, int depth)
    : source_(std::move(source)),
      grammar_(grammar),
      nodes_(std::move(nodes)),
      depth_(depth) {}

bool SyntaxTree::is_ancestor(NodeId ancestor, NodeId descendant) const {
  NodeId cur = node(descendant).parent;
  while (cur != -1) {
    if (cur == ancestor) return true;
    cur = node(cur).parent;
  }
  return false;
}

namespace {

// ---------------------------------------------------------------------------
// mini-js tree construction
// ---------------------------------------------------------------------------

struct MiniJsBuilder {
  const minijs::Program& prog;
  std::vector<SyntaxNode> nodes;
  int depth = 0;

  // first/last token index per 1-based line; -1 when the line has no tokens
  std::vector<int> first_tok;
  std::vector<int> last_tok;

  explicit MiniJsBuilder(const minijs::Program& p) : prog(p) {
    first_tok.assign(prog.line_count + 2, -1);
    last_tok.assign(prog.line_count + 2, -1);
    for (int i = 0; i < static_cast<int>(prog.tokens.size()); ++i) {
      const auto& t = prog.tokens[i];
      if (t.kind == minijs::Token::Kind::End) continue;
      if (first_tok[t.line] == -1) first_tok[t.line] = i;
      last_tok[t.line] = i;
      // A template literal may span lines; claim them all.
      if (t.kind == minijs::Token::Kind::Template) {
        int span = static_cast<int>(
            std::count(t.text.begin(), t.text.end(), '\n'));
        for (int l = t.line; l <= t.line + span && l <= prog.line_count; ++l) {
          if (first_tok[l] == -1) first_tok[l] = i;
          last_tok[l] = i;
        }
      }
    }
  }

  NodeKind kind_of(const minijs::Stmt& s) const {
    switch (s.kind) {
      case minijs::Stmt::Kind::Import:
        return NodeKind::Import;
      case minijs::Stmt::Kind::VarDecl:
        return s.is_require ? NodeKind::Import : NodeKind::Declaration;
      case minijs::Stmt::Kind::FuncDecl:
        return NodeKind::Declaration;
      default:
        return NodeKind::Statement;
    }
  }

  // Child statements in source order: direct children plus the bodies of
  // arrow/function expressions appearing in the statement's own expressions.
  std::vector<const minijs::Stmt*> child_stmts(const minijs::Stmt& s) const {
    std::vector<const minijs::Stmt*> out;
    for (const auto& c : s.children) {
      if (!c.synthetic) out.push_back(&c);
    }
    auto visit_body = [&](const std::vector<minijs::Stmt>& body) {
      for (const auto& b : body) {
        if (!b.synthetic) out.push_back(&b);
      }
    };
    for (const auto& e : s.exprs) collect_callback_bodies(e, visit_body);
    for (const auto& i : s.inits) {
      if (i) collect_callback_bodies(*i, visit_body);
    }
    // Synthetic wrappers still carry real nested statements.
    for (const auto& c : s.children) {
      if (c.synthetic) {
        for (const auto& e : c.exprs) collect_callback_bodies(e, visit_body);
      }
    }
    std::sort(out.begin(), out.end(),
              [](const minijs::Stmt* a, const minijs::Stmt* b) {
                return a->tok_begin < b->tok_begin;
              });
    return out;
  }

  template <typename Fn>
  void collect_callback_bodies(const minijs::Expr& e, Fn&& fn) const {
    using EK = minijs::Expr::Kind;
    if (e.kind == EK::Arrow || e.kind == EK::Function) {
      fn(e.body);
      // Nested callbacks inside this body belong to the body's statements,
      // which are visited when those statements are built.
      for (const auto& b : e.body) {
        if (b.synthetic) {
          for (const auto& be : b.exprs) collect_callback_bodies(be, fn);
        }
      }
      return;
    }
    for (const auto& k : e.kids) collect_callback_bodies(k, fn);
  }

  int build(const minijs::Stmt& s, int level, NodeId parent) {
    NodeId id = static_cast<NodeId>(nodes.size());
    nodes.push_back(SyntaxNode{});
    {
      SyntaxNode& n = nodes[id];
      n.id = id;
      n.kind = kind_of(s);
      n.level = level;
      n.start_line = s.start_line;
      n.end_line = s.end_line;
      n.parent = parent;
      n.line_exclusive = first_tok[s.start_line] >= s.tok_begin &&
                         last_tok[s.end_line] <= s.tok_end;
    }
    depth = std::max(depth, level);
    for (const minijs::Stmt* c : child_stmts(s)) {
      int cid = build(*c, level + 1, id);
      nodes[id].children.push_back(cid);
    }
    return id;
  }
};

SyntaxTree parse_minijs(const SourceText& source) {
  minijs::Program prog = minijs::parse_program(source);
  MiniJsBuilder builder(prog);

  builder.nodes.push_back(SyntaxNode{});
  SyntaxNode& root = builder.nodes[0];
  root.id = 0;
  root.kind = NodeKind::Other;
  root.level = 0;
  root.parent = -1;
  root.line_exclusive = true;
  if (source.line_count() > 0) {
    root.start_line = 1;
    root.end_line = source.line_count();
  }

  for (const auto& s : prog.stmts) {
    int cid = builder.build(s, 1, 0);
    builder.nodes[0].children.push_back(cid);
  }
  return SyntaxTree(source, GrammarId::MiniJs, std::move(builder.nodes),
                    builder.depth);
}

// ---------------------------------------------------------------------------
// braces fallback: hierarchical chunks from multi-line brace nesting
// ---------------------------------------------------------------------------

struct LineEvents {
  int cross_open = 0;   // braces opened here and closed on a later line
  int cross_close = 0;  // braces closed here that were opened earlier
  bool has_text = false;
};

// Scan raw lines, skipping string/template/comment contents. Unbalanced
// input degrades gracefully: stray closers are plain text, unclosed opens
// end at the last line.
std::vector<LineEvents> scan_braces(const SourceText& src) {
  std::vector<LineEvents> events(src.line_count() + 1);
  enum class Ctx { None, Single, Double, Backtick, Block };
  Ctx ctx = Ctx::None;
  std::vector<int> open_lines;
  for (int ln = 1; ln <= src.line_count(); ++ln) {
    const std::string& line = src.line(ln);
    for (size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (ctx == Ctx::Single || ctx == Ctx::Double || ctx == Ctx::Backtick) {
        if (c == '\\') {
          ++i;
        } else if ((ctx == Ctx::Single && c == '\'') ||
                   (ctx == Ctx::Double && c == '"') ||
                   (ctx == Ctx::Backtick && c == '`')) {
          ctx = Ctx::None;
        }
        continue;
      }
      if (ctx == Ctx::Block) {
        if (c == '*' && i + 1 < line.size() && line[i + 1] == '/') {
          ctx = Ctx::None;
          ++i;
        }
        continue;
      }
      if (c == ' ' || c == '\t') continue;
      if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') break;
      if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
        ctx = Ctx::Block;
        ++i;
        continue;
      }
      if (c == '\'') { ctx = Ctx::Single; events[ln].has_text = true; continue; }
      if (c == '"') { ctx = Ctx::Double; events[ln].has_text = true; continue; }
      if (c == '`') { ctx = Ctx::Backtick; events[ln].has_text = true; continue; }
      if (c == '{') {
        open_lines.push_back(ln);
        continue;
      }
      if (c == '}') {
        if (!open_lines.empty()) {
          int opened = open_lines.back();
          open_lines.pop_back();
          if (opened < ln) {
            ++events[opened].cross_open;
            ++events[ln].cross_close;
          }
          // Same-line pairs collapse into plain text.
          else events[ln].has_text = true;
        } else {
          events[ln].has_text = true;
        }
        continue;
      }
      events[ln].has_text = true;
    }
    // Strings left open at end of line keep their context (templates span
    // lines; broken quotes just swallow the rest, which is fine here).
    if (ctx == Ctx::Single || ctx == Ctx::Double) ctx = Ctx::None;
  }
  // Unclosed opens reach the end of the file.
  for (int opened : open_lines) {
    if (opened < src.line_count()) {
      ++events[opened].cross_open;
      ++events[src.line_count()].cross_close;
    }
  }
  return events;
}

SyntaxTree parse_braces(const SourceText& source) {
  std::vector<SyntaxNode> nodes;
  nodes.push_back(SyntaxNode{});
  nodes[0].id = 0;
  nodes[0].kind = NodeKind::Other;
  nodes[0].level = 0;
  nodes[0].parent = -1;
  nodes[0].line_exclusive = true;
  if (source.line_count() > 0) {
    nodes[0].start_line = 1;
    nodes[0].end_line = source.line_count();
  }

  auto events = scan_braces(source);
  int depth = 0;
  std::vector<NodeId> stack = {0};
  // boundary_shared[id]: node shares its start or end line with a neighbour
  std::vector<bool> boundary_shared;
  boundary_shared.push_back(false);

  auto add_node = [&](NodeId parent, int start) {
    NodeId id = static_cast<NodeId>(nodes.size());
    SyntaxNode n;
    n.id = id;
    n.kind = NodeKind::Other;
    n.level = nodes[parent].level + 1;
    n.start_line = start;
    n.end_line = start;
    n.parent = parent;
    nodes.push_back(n);
    boundary_shared.push_back(false);
    nodes[parent].children.push_back(id);
    depth = std::max(depth, n.level);
    return id;
  };

  for (int ln = 1; ln <= source.line_count(); ++ln) {
    const LineEvents& ev = events[ln];
    std::vector<NodeId> touched;
    for (int k = 0; k < ev.cross_close; ++k) {
      if (stack.size() > 1) {
        nodes[stack.back()].end_line = ln;
        touched.push_back(stack.back());
        stack.pop_back();
      }
    }
    for (int k = 0; k < ev.cross_open; ++k) {
      NodeId id = add_node(stack.back(), ln);
      touched.push_back(id);
      stack.push_back(id);
    }
    if (touched.empty()) {
      if (ev.has_text) add_node(stack.back(), ln);  // leaf line
    } else if (touched.size() > 1) {
      // A line closing one chunk and opening another is shared.
      for (NodeId id : touched) boundary_shared[id] = true;
    }
  }

  for (auto& n : nodes) {
    if (n.id == 0) continue;
    n.line_exclusive = !boundary_shared[n.id];
  }
  return SyntaxTree(source, GrammarId::Braces, std::move(nodes), depth);
}

}  // namespace

SyntaxTree parse(const SourceText& source, GrammarId grammar) {
  return grammar == GrammarId::MiniJs ? parse_minijs(source)
                                      : parse_braces(source);
}

bool parses(const SourceText& candidate, GrammarId grammar) {
  if (grammar == GrammarId::Braces) return true;
  try {
    parse(candidate, grammar);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

std::vector<NodeId> get_nodes(const SyntaxTree& tree, int level) {
  std::vector<NodeId> out;
  for (const auto& n : tree.nodes()) {
    if (n.level != level) continue;
    if (n.kind == NodeKind::Expression) continue;
    if (!n.line_exclusive) continue;
    if (n.start_line == 0) continue;  // empty root
    out.push_back(n.id);
  }
  std::sort(out.begin(), out.end(), [&](NodeId a, NodeId b) {
    const auto& na = tree.node(a);
    const auto& nb = tree.node(b);
    return na.start_line != nb.start_line ? na.start_line < nb.start_line
                                          : a < b;
  });
  return out;
}

RemovalResult remove_nodes_from_code(const std::vector<NodeId>& victims,
                                     const SourceText& code,
                                     const SyntaxTree& tree,
                                     const LineMapping& mapping) {
  std::vector<bool> drop(code.line_count() + 1, false);
  for (NodeId id : victims) {
    if (id < 0 || id >= tree.node_count()) {
      throw std::invalid_argument("remove_nodes_from_code: bad node id");
    }
    const auto& n = tree.node(id);
    for (int l = n.start_line; l <= n.end_line && l >= 1; ++l) {
      if (l <= code.line_count()) drop[l] = true;
    }
  }

  std::vector<int> kept;
  std::vector<std::pair<int, int>> pairs;
  for (int l = 1; l <= code.line_count(); ++l) {
    if (drop[l]) continue;
    kept.push_back(l);
    auto orig = mapping.original_of(l);
    if (!orig) {
      throw std::invalid_argument(
          "remove_nodes_from_code: mapping does not cover line " +
          std::to_string(l));
    }
    pairs.emplace_back(static_cast<int>(kept.size()), *orig);
  }

  RemovalResult result;
  result.code = code.subset(kept);
  result.mapping = LineMapping(std::move(pairs));
  try {
    result.tree = parse(result.code, tree.grammar());
  } catch (const ParseError&) {
    result.tree = std::nullopt;
  }
  return result;
}

}  // namespace snipfix
