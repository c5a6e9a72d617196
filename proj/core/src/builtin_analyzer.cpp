#include "builtin_analyzer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "minijs.hpp"
#include "snipfix/errors.hpp"

namespace snipfix {

namespace {

using minijs::Expr;
using minijs::Program;
using minijs::Stmt;
using EK = Expr::Kind;
using SK = Stmt::Kind;

// ---------------------------------------------------------------------------
// shared walkers
// ---------------------------------------------------------------------------

// Bodies of arrow/function expressions are owned by walk_stmts; visiting
// them here as well would double-count their expressions.
void walk_exprs(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& k : e.kids) walk_exprs(k, fn);
}

void walk_stmts(const std::vector<Stmt>& stmts,
                const std::function<void(const Stmt&)>& fn) {
  for (const auto& s : stmts) {
    fn(s);
    walk_stmts(s.children, fn);
    std::function<void(const Expr&)> dive = [&](const Expr& e) {
      if (e.kind == EK::Arrow || e.kind == EK::Function) {
        walk_stmts(e.body, fn);
      }
    };
    for (const auto& e : s.exprs) walk_exprs(e, dive);
    for (const auto& i : s.inits) {
      if (i) walk_exprs(*i, dive);
    }
  }
}

void walk_all_exprs(const std::vector<Stmt>& stmts,
                    const std::function<void(const Expr&)>& fn) {
  walk_stmts(stmts, [&](const Stmt& s) {
    for (const auto& e : s.exprs) walk_exprs(e, fn);
    for (const auto& i : s.inits) {
      if (i) walk_exprs(*i, fn);
    }
  });
}

bool subtree_has_concat(const Expr& e) {
  if (e.kind == EK::Binary && e.name == "+") return true;
  for (const auto& k : e.kids) {
    if (subtree_has_concat(k)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// simple rules
// ---------------------------------------------------------------------------

void check_duplicate_keys(const Program& prog, std::vector<Report>& out) {
  walk_all_exprs(prog.stmts, [&](const Expr& e) {
    if (e.kind != EK::Object) return;
    std::set<std::string> seen;
    for (const auto& prop : e.kids) {
      if (prop.kind != EK::Property) continue;
      if (prop.name == "..." || prop.name == "[computed]") continue;
      if (!seen.insert(prop.name).second) {
        out.push_back(Report{
            "DuplicateKey", RuleCategory::AST,
            "Object literal declares key '" + prop.name + "' more than once",
            prop.line, std::nullopt});
      }
    }
  });
}

// One scope = one function body (or the top level); nested functions are
// separate scopes.
struct ScopeBody {
  const std::vector<Stmt>* stmts;
};

void for_each_scope(const std::vector<Stmt>& top,
                    const std::function<void(const std::vector<Stmt>&)>& fn) {
  fn(top);
  std::function<void(const std::vector<Stmt>&)> rec =
      [&](const std::vector<Stmt>& stmts) {
        for (const auto& s : stmts) {
          if (s.kind == SK::FuncDecl) {
            fn(s.children);
            rec(s.children);
            continue;
          }
          rec(s.children);
          std::function<void(const Expr&)> dive = [&](const Expr& e) {
            if (e.kind == EK::Arrow || e.kind == EK::Function) {
              fn(e.body);
              rec(e.body);
            }
          };
          for (const auto& e : s.exprs) walk_exprs(e, dive);
          for (const auto& i : s.inits) {
            if (i) walk_exprs(*i, dive);
          }
        }
      };
  rec(top);
}

// Scan one scope without descending into nested function bodies.
void scan_scope_exprs(const std::vector<Stmt>& stmts,
                      const std::function<void(const Expr&)>& fn) {
  std::function<void(const Expr&)> shallow = [&](const Expr& e) {
    fn(e);
    if (e.kind == EK::Arrow || e.kind == EK::Function) return;
    for (const auto& k : e.kids) shallow(k);
  };
  std::function<void(const std::vector<Stmt>&)> rec =
      [&](const std::vector<Stmt>& body) {
        for (const auto& s : body) {
          if (s.kind == SK::FuncDecl) continue;
          for (const auto& e : s.exprs) shallow(e);
          for (const auto& i : s.inits) {
            if (i) shallow(*i);
          }
          rec(s.children);
        }
      };
  rec(stmts);
}

void check_open_not_closed(const Program& prog, std::vector<Report>& out) {
  for_each_scope(prog.stmts, [&](const std::vector<Stmt>& scope) {
    std::vector<int> opens;
    bool has_close = false;
    scan_scope_exprs(scope, [&](const Expr& e) {
      if (e.kind != EK::Call) return;
      const Expr& callee = e.kids[0];
      if (callee.kind == EK::Ident && callee.name == "open") {
        opens.push_back(e.line);
      }
      if ((callee.kind == EK::Ident && callee.name == "close") ||
          (callee.kind == EK::Member && callee.name == "close")) {
        has_close = true;
      }
    });
    if (has_close) return;
    for (int line : opens) {
      out.push_back(Report{
          "OpenNotClosed", RuleCategory::Local,
          "Resource opened here is never closed in the enclosing function",
          line, std::nullopt});
    }
  });
}

void check_arity_mismatch(const Program& prog, std::vector<Report>& out) {
  std::map<std::string, size_t> declared;
  walk_stmts(prog.stmts, [&](const Stmt& s) {
    if (s.kind == SK::FuncDecl && !declared.count(s.name)) {
      declared[s.name] = s.params.size();
    }
  });
  walk_all_exprs(prog.stmts, [&](const Expr& e) {
    if (e.kind != EK::Call) return;
    const Expr& callee = e.kids[0];
    if (callee.kind != EK::Ident) return;
    auto it = declared.find(callee.name);
    if (it == declared.end()) return;
    size_t argc = e.kids.size() - 1;
    if (argc != it->second) {
      std::ostringstream msg;
      msg << "Function '" << callee.name << "' takes " << it->second
          << " argument(s) but is called with " << argc;
      out.push_back(Report{"ArityMismatch", RuleCategory::FileWide, msg.str(),
                           e.line, std::nullopt});
    }
  });
}

void check_banned_calls(const Program& prog,
                        const std::map<std::string, std::string>& imports,
                        std::vector<Report>& out) {
  walk_all_exprs(prog.stmts, [&](const Expr& e) {
    if (e.kind != EK::Call) return;
    const Expr& callee = e.kids[0];
    if (callee.kind == EK::Ident && callee.name == "eval") {
      out.push_back(Report{"BannedCall", RuleCategory::SecurityLocal,
                           "Call to banned API 'eval'", e.line, std::nullopt});
      return;
    }
    if (callee.kind == EK::Member && callee.name == "exec") {
      const Expr* root = minijs::chain_root(callee);
      bool is_cp = false;
      if (root) {
        auto it = imports.find(root->name);
        is_cp = (it != imports.end() && it->second == "child_process") ||
                root->name == "child_process";
      }
      if (!is_cp) return;
      for (size_t i = 1; i < e.kids.size(); ++i) {
        if (subtree_has_concat(e.kids[i])) {
          out.push_back(Report{
              "BannedCall", RuleCategory::SecurityLocal,
              "String concatenation passed to child_process.exec", e.line,
              std::nullopt});
          return;
        }
      }
    }
  });
}

// ---------------------------------------------------------------------------
// PT: interprocedural request-to-sink taint with provenance tracking
// ---------------------------------------------------------------------------

struct Taint {
  bool tainted = false;
  std::set<int> prov;

  static Taint clean() { return Taint{}; }
  static Taint merge(const Taint& a, const Taint& b) {
    if (!a.tainted) return b;
    if (!b.tainted) return a;
    Taint t{true, a.prov};
    t.prov.insert(b.prov.begin(), b.prov.end());
    return t;
  }
  Taint with(int line) const {
    Taint t = *this;
    t.prov.insert(line);
    return t;
  }
};

class TaintEngine {
 public:
  explicit TaintEngine(const Program& prog) : prog_(prog) {
    collect_bindings();
  }

  std::vector<Report> run() {
    Frame top;
    eval_body(prog_.stmts, top);
    walk_stmts(prog_.stmts, [&](const Stmt& s) {
      if (s.kind != SK::FuncDecl) return;
      Frame frame;
      frame.context_prov.insert(s.start_line);
      active_.clear();
      active_.insert(&s);
      eval_body(s.children, frame);
      active_.clear();
    });
    return std::move(reports_);
  }

 private:
  struct Frame {
    std::map<std::string, Taint> vars;
    std::set<std::string> source_roots;      // request-like parameters
    std::set<std::string> response_objects;  // response-like parameters
    std::set<int> context_prov;  // decl / call / registration lines
  };

  struct Binding {
    std::string module;
    int import_line = 0;  // line of the import that anchors this binding
  };

  const Program& prog_;
  std::map<std::string, Binding> bindings_;  // imports and import-derived vars
  std::map<std::string, std::pair<const Stmt*, int>> funcs_;  // name -> decl
  std::set<const Stmt*> active_;                     // recursion guard
  std::set<std::pair<std::string, int>> seen_;       // (rule, line) dedupe
  std::vector<Report> reports_;
  int depth_ = 0;

  static constexpr int kMaxCallDepth = 16;

  void collect_bindings() {
    walk_stmts(prog_.stmts, [&](const Stmt& s) {
      if ((s.kind == SK::Import || s.is_require) && !s.name.empty()) {
        bindings_.emplace(s.name, Binding{s.module, s.start_line});
      }
      if (s.kind == SK::FuncDecl && !funcs_.count(s.name)) {
        funcs_[s.name] = {&s, s.start_line};
      }
    });
    // Variables initialized from calls rooted at an import keep the anchor,
    // e.g. `const app = express();` or `const pool = mysql.createPool(c)`.
    walk_stmts(prog_.stmts, [&](const Stmt& s) {
      if (s.kind != SK::VarDecl || s.is_require) return;
      for (size_t i = 0; i < s.decl_names.size(); ++i) {
        if (!s.inits[i]) continue;
        const Expr& init = *s.inits[i];
        if (init.kind != EK::Call && init.kind != EK::New) continue;
        const Expr* root = minijs::chain_root(init);
        if (!root) continue;
        auto it = bindings_.find(root->name);
        if (it != bindings_.end()) {
          bindings_.emplace(s.decl_names[i], it->second);
        }
      }
    });
  }

  // Module behind a chain-root identifier, with the anchor's import line.
  std::optional<Binding> module_of(const std::string& name) const {
    auto it = bindings_.find(name);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
  }

  void report_at(int line, const Taint& taint) {
    if (!seen_.insert({"PT", line}).second) return;
    Report r;
    r.rule = "PT";
    r.category = RuleCategory::SecurityFlow;
    r.message =
        "Unsanitized data from an incoming request reaches a sensitive sink";
    r.line = line;
    std::set<int> prov = taint.prov;
    prov.insert(line);
    r.provenance_lines = std::move(prov);
    reports_.push_back(std::move(r));
  }

  bool is_source_root(const Expr& root, const Frame& f) const {
    if (f.vars.count(root.name)) return false;  // reassigned locally
    return f.source_roots.count(root.name) > 0 || root.name == "req" ||
           root.name == "request";
  }

  void eval_body(const std::vector<Stmt>& stmts, Frame& f) {
    for (const auto& s : stmts) eval_stmt(s, f);
  }

  void eval_stmt(const Stmt& s, Frame& f) {
    switch (s.kind) {
      case SK::Import:
        return;
      case SK::FuncDecl:
        return;  // analyzed as its own entry point and at call sites
      case SK::VarDecl: {
        for (size_t i = 0; i < s.decl_names.size(); ++i) {
          if (!s.inits[i]) continue;
          Taint t = eval_expr(*s.inits[i], f);
          if (t.tainted) {
            f.vars[s.decl_names[i]] = t.with(s.inits[i]->line);
          } else {
            f.vars[s.decl_names[i]] = Taint::clean();
          }
        }
        return;
      }
      case SK::Return:
      case SK::Expr: {
        for (const auto& e : s.exprs) {
          Taint t = eval_expr(e, f);
          if (s.kind == SK::Return) {
            return_taint_ = Taint::merge(return_taint_, t);
          }
        }
        return;
      }
      case SK::If:
      case SK::While:
      case SK::For:
      case SK::Block: {
        for (const auto& e : s.exprs) eval_expr(e, f);
        eval_body(s.children, f);
        return;
      }
      case SK::Empty:
        return;
    }
  }

  Taint return_taint_;

  Taint eval_callback(const Expr& cb, Frame& outer, bool mark,
                      const std::set<int>& anchor) {
    Frame frame;
    frame.vars = outer.vars;  // close over the current environment
    frame.source_roots = outer.source_roots;
    frame.response_objects = outer.response_objects;
    frame.context_prov = outer.context_prov;
    frame.context_prov.insert(cb.line);
    if (mark && !cb.params.empty()) {
      frame.source_roots.insert(cb.params[0]);
      if (cb.params.size() > 1) frame.response_objects.insert(cb.params[1]);
      frame.context_prov.insert(anchor.begin(), anchor.end());
    }
    eval_body(cb.body, frame);
    return Taint::clean();  // the closure value itself carries no taint
  }

  Taint eval_call(const Expr& e, Frame& f) {
    const Expr& callee = e.kids[0];

    // Sanitizer: path.basename(...) returns clean data.
    if (callee.kind == EK::Member && callee.name == "basename") {
      const Expr* root = minijs::chain_root(callee);
      if (root) {
        auto mod = module_of(root->name);
        if (mod && mod->module == "path") {
          for (size_t i = 1; i < e.kids.size(); ++i) eval_expr(e.kids[i], f);
          return Taint::clean();
        }
      }
    }

    // Express-style handler registration marks (request, response) params.
    bool marks_callbacks = false;
    std::set<int> anchor;
    if (const Expr* root = minijs::chain_root(callee)) {
      auto mod = module_of(root->name);
      if (mod && mod->module == "express") {
        marks_callbacks = true;
        if (mod->import_line > 0) anchor.insert(mod->import_line);
      }
    }

    // Arguments first: taints, nested calls and callback bodies.
    std::vector<Taint> args;
    for (size_t i = 1; i < e.kids.size(); ++i) {
      const Expr& a = e.kids[i];
      if (a.kind == EK::Arrow || a.kind == EK::Function) {
        args.push_back(eval_callback(a, f, marks_callbacks, anchor));
      } else {
        args.push_back(eval_expr(a, f));
      }
    }
    Taint arg_taint;
    for (const auto& a : args) arg_taint = Taint::merge(arg_taint, a);

    // Sinks.
    if (callee.kind == EK::Member) {
      const Expr* root = minijs::chain_root(callee);
      // fs.* with tainted data
      if (root) {
        auto mod = module_of(root->name);
        if (mod && mod->module == "fs" && arg_taint.tainted) {
          Taint t = arg_taint;
          if (mod->import_line > 0) t.prov.insert(mod->import_line);
          t.prov.insert(f.context_prov.begin(), f.context_prov.end());
          report_at(e.line, t);
        }
      }
      // connection.query(sql, ...) unless parameterized with an array
      if (callee.name == "query" && callee.kids[0].kind == EK::Ident &&
          callee.kids[0].name == "connection" && !args.empty() &&
          args[0].tainted) {
        bool parameterized =
            e.kids.size() >= 3 && e.kids[2].kind == EK::Array;
        if (!parameterized) {
          Taint t = args[0];
          t.prov.insert(f.context_prov.begin(), f.context_prov.end());
          report_at(e.line, t);
        }
      }
      // response.sendFile(tainted) on a marked response object
      if (callee.name == "sendFile" && callee.kids[0].kind == EK::Ident &&
          f.response_objects.count(callee.kids[0].name) && arg_taint.tainted) {
        Taint t = arg_taint;
        t.prov.insert(f.context_prov.begin(), f.context_prov.end());
        report_at(e.line, t);
      }
    }

    // Interprocedural step into declared functions.
    if (callee.kind == EK::Ident) {
      auto it = funcs_.find(callee.name);
      if (it != funcs_.end() && !active_.count(it->second.first) &&
          depth_ < kMaxCallDepth) {
        const Stmt* decl = it->second.first;
        Frame callee_frame;
        callee_frame.context_prov = f.context_prov;
        callee_frame.context_prov.insert(decl->start_line);
        bool any_tainted = false;
        for (size_t i = 0; i < decl->params.size() && i < args.size(); ++i) {
          if (args[i].tainted) {
            Taint t = args[i].with(e.line);
            callee_frame.vars[decl->params[i]] = t;
            any_tainted = true;
          }
        }
        if (any_tainted) callee_frame.context_prov.insert(e.line);
        active_.insert(decl);
        ++depth_;
        Taint saved_return = std::exchange(return_taint_, Taint::clean());
        eval_body(decl->children, callee_frame);
        Taint result = std::exchange(return_taint_, saved_return);
        --depth_;
        active_.erase(decl);
        return result;
      }
    }

    // Calls rooted at an imported module propagate argument taint to the
    // result (e.g. path.join); unknown callees return clean data.
    if (const Expr* root = minijs::chain_root(callee)) {
      auto mod = module_of(root->name);
      if (mod && arg_taint.tainted) {
        Taint t = arg_taint;
        if (mod->import_line > 0) t.prov.insert(mod->import_line);
        return t;
      }
    }
    return Taint::clean();
  }

  Taint eval_expr(const Expr& e, Frame& f) {
    switch (e.kind) {
      case EK::Ident: {
        auto it = f.vars.find(e.name);
        if (it != f.vars.end()) return it->second;
        if (f.source_roots.count(e.name)) {
          Taint t{true, {e.line}};
          t.prov.insert(f.context_prov.begin(), f.context_prov.end());
          return t;
        }
        return Taint::clean();
      }
      case EK::Member:
      case EK::Index: {
        const Expr* root = minijs::chain_root(e);
        if (root && is_source_root(*root, f)) {
          Taint t{true, {e.line}};
          t.prov.insert(f.context_prov.begin(), f.context_prov.end());
          return t;
        }
        Taint t;
        for (const auto& k : e.kids) t = Taint::merge(t, eval_expr(k, f));
        return t;
      }
      case EK::Call:
      case EK::New:
        return eval_call(e, f);
      case EK::Assign: {
        Taint rhs = eval_expr(e.kids[1], f);
        const Expr& lhs = e.kids[0];
        if (lhs.kind == EK::Ident) {
          f.vars[lhs.name] = rhs.tainted ? rhs.with(e.line) : Taint::clean();
          return f.vars[lhs.name];
        }
        eval_expr(lhs, f);
        return rhs;
      }
      case EK::Arrow:
      case EK::Function:
        return eval_callback(e, f, false, {});
      case EK::Binary:
      case EK::Unary:
      case EK::Postfix:
      case EK::Ternary:
      case EK::Spread:
      case EK::Array: {
        Taint t;
        for (const auto& k : e.kids) t = Taint::merge(t, eval_expr(k, f));
        return t;
      }
      case EK::Object: {
        Taint t;
        for (const auto& prop : e.kids) {
          for (const auto& v : prop.kids) t = Taint::merge(t, eval_expr(v, f));
        }
        return t;
      }
      case EK::Property: {
        Taint t;
        for (const auto& k : e.kids) t = Taint::merge(t, eval_expr(k, f));
        return t;
      }
      case EK::Number:
      case EK::String:
      case EK::Template:
      case EK::Literal:
        return Taint::clean();
    }
    return Taint::clean();
  }
};

}  // namespace

// ---------------------------------------------------------------------------

BuiltinAnalyzer::BuiltinAnalyzer(const std::string& ruleset) {
  if (ruleset == "all" || ruleset.empty()) {
    for (const auto& r : all_rules()) rules_.insert(r);
    return;
  }
  std::stringstream ss(ruleset);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (std::find(all_rules().begin(), all_rules().end(), item) ==
        all_rules().end()) {
      throw std::invalid_argument("unknown builtin rule: " + item);
    }
    rules_.insert(item);
  }
  if (rules_.empty()) {
    throw std::invalid_argument("empty builtin ruleset");
  }
}

const std::vector<std::string>& BuiltinAnalyzer::all_rules() {
  static const std::vector<std::string> rules = {
      "DuplicateKey", "OpenNotClosed", "ArityMismatch", "BannedCall", "PT",
  };
  return rules;
}

std::string BuiltinAnalyzer::rule_description(const std::string& rule) {
  if (rule == "DuplicateKey") return "Duplicate key in object literal";
  if (rule == "OpenNotClosed") return "Resource is opened but never closed";
  if (rule == "ArityMismatch")
    return "Call arity differs from the function declaration";
  if (rule == "BannedCall") return "Use of a banned or unsafe API";
  if (rule == "PT") return "Path traversal via unsanitized request data";
  return "Unknown rule";
}

bool BuiltinAnalyzer::enabled(const std::string& rule) const {
  return rules_.count(rule) > 0;
}

std::vector<Report> BuiltinAnalyzer::run(const SourceText& code) {
  Program prog;
  try {
    prog = minijs::parse_program(code);
  } catch (const ParseError& err) {
    Report marker;
    marker.rule = kParseMarkerRule;
    marker.category = RuleCategory::AST;
    marker.message = err.message();
    marker.line = std::max(1, std::min(err.line(), std::max(1, code.line_count())));
    return {marker};
  }

  std::vector<Report> out;
  if (enabled("DuplicateKey")) check_duplicate_keys(prog, out);
  if (enabled("OpenNotClosed")) check_open_not_closed(prog, out);
  if (enabled("ArityMismatch")) check_arity_mismatch(prog, out);
  if (enabled("BannedCall")) {
    std::map<std::string, std::string> imports;
    walk_stmts(prog.stmts, [&](const Stmt& s) {
      if ((s.kind == SK::Import || s.is_require) && !s.name.empty()) {
        imports.emplace(s.name, s.module);
      }
    });
    check_banned_calls(prog, imports, out);
  }
  if (enabled("PT")) {
    TaintEngine engine(prog);
    auto pt = engine.run();
    out.insert(out.end(), pt.begin(), pt.end());
  }

  std::sort(out.begin(), out.end(), [](const Report& a, const Report& b) {
    return a.line != b.line ? a.line < b.line : a.rule < b.rule;
  });
  return out;
}

}  // namespace snipfix
