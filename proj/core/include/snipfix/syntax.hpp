#pragma once

#include <optional>
#include <string>
#include <vector>

#include "snipfix/source_text.hpp"

namespace snipfix {

enum class GrammarId { MiniJs, Braces };

GrammarId grammar_from_name(const std::string& name);  // "mini-js" | "braces"
std::string grammar_name(GrammarId id);

enum class NodeKind { Statement, Declaration, Import, Expression, Other };

using NodeId = int;

/// A line-spanned node. Spans are 1-based and inclusive; the root of an
/// empty file has span (0, 0).
struct SyntaxNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Other;
  int level = 0;
  int start_line = 0;
  int end_line = 0;
  NodeId parent = -1;
  std::vector<NodeId> children;

  // True when every token on the node's lines belongs to the node's own
  // subtree, i.e. deleting the span removes the node and nothing else.
  bool line_exclusive = false;
};

class SyntaxTree {
 public:
  SyntaxTree() = default;
  SyntaxTree(SourceText source, GrammarId grammar,
             std::vector<SyntaxNode> nodes, int depth);

  const SyntaxNode& root() const { return nodes_.front(); }
  const SyntaxNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<SyntaxNode>& nodes() const { return nodes_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const SourceText& source() const { return source_; }
  GrammarId grammar() const { return grammar_; }
  int depth() const { return depth_; }

  bool is_ancestor(NodeId ancestor, NodeId descendant) const;

 private:
  SourceText source_;
  GrammarId grammar_ = GrammarId::MiniJs;
  std::vector<SyntaxNode> nodes_;  // preorder; id == position
  int depth_ = 0;
};

/// Parse source into a tree of line-spanned nodes. The mini-js grammar
/// throws ParseError on malformed input; the braces grammar never fails.
SyntaxTree parse(const SourceText& source, GrammarId grammar);

/// True iff parse() succeeds.
bool parses(const SourceText& candidate, GrammarId grammar);

/// Nodes at exactly `level` that are deletable: statement-like kinds
/// (never Expression) whose spans cover only whole lines owned by the
/// node's own subtree. Returns an empty list past the tree depth.
std::vector<NodeId> get_nodes(const SyntaxTree& tree, int level);

struct RemovalResult {
  SourceText code;
  std::optional<SyntaxTree> tree;  // re-parsed; absent if the result no
                                   // longer parses under the grammar
  LineMapping mapping;             // new reduced line -> original file line
};

/// Drop every line spanned by a victim node, renumber, and compose the line
/// mapping. Inputs are not modified.
RemovalResult remove_nodes_from_code(const std::vector<NodeId>& victims,
                                     const SourceText& code,
                                     const SyntaxTree& tree,
                                     const LineMapping& mapping);

}  // namespace snipfix
