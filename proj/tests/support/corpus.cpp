#include "corpus.hpp"

#include <algorithm>
#include <sstream>

namespace snipfix::testing {

namespace {

std::vector<std::string> filler_unit(Rng& rng, int index, int statements) {
  std::vector<std::string> out;
  switch (rng.below(3)) {
    case 0: {
      out.push_back("function filler" + std::to_string(index) + "() {");
      for (int s = 0; s < statements; ++s) {
        std::string var = "a" + std::to_string(index) + "_" + std::to_string(s);
        if (rng.chance(50)) {
          out.push_back("  var " + var + " = " + std::to_string(rng.below(100)) + ";");
        } else {
          out.push_back("  log" + std::to_string(index) + "(" +
                        std::to_string(rng.below(10)) + ");");
        }
      }
      out.push_back("}");
      break;
    }
    case 1: {
      out.push_back("const cfg" + std::to_string(index) + " = {");
      out.push_back("  port" + std::to_string(index) + ": " +
                    std::to_string(1000 + rng.below(9000)) + ",");
      out.push_back("  host" + std::to_string(index) + ": 'h" +
                    std::to_string(index) + "'");
      out.push_back("};");
      break;
    }
    default: {
      out.push_back("function tick" + std::to_string(index) + "(n) {");
      out.push_back("  if (n) {");
      out.push_back("    note" + std::to_string(index) + "(n);");
      out.push_back("  }");
      out.push_back("}");
      break;
    }
  }
  return out;
}

}  // namespace

TaintFixture make_taint_fixture(uint64_t seed,
                                const TaintFixtureOptions& opts) {
  Rng rng(seed);
  TaintFixture out;
  out.direct = !opts.through_helper;

  std::vector<std::string> lines;
  std::set<int>& essential = out.essential_lines;

  lines.push_back("const fs = require('fs');");
  essential.insert(1);
  lines.push_back("const path = require('path');");
  essential.insert(2);

  int index = 0;
  auto add_filler = [&](int count) {
    for (int i = 0; i < count; ++i) {
      for (auto& l : filler_unit(rng, index++, opts.filler_statements)) {
        lines.push_back(std::move(l));
      }
    }
  };

  int before = opts.filler_functions / 2;
  add_filler(before);

  std::string suffix = std::to_string(rng.below(1000));
  if (opts.through_helper) {
    int helper_start = static_cast<int>(lines.size()) + 1;
    lines.push_back("function save" + suffix + "(name) {");
    lines.push_back("  var dest = path.join('www', name);");
    if (opts.sanitized) {
      lines.push_back("  dest = path.basename(dest);");
    }
    lines.push_back("  fs.createWriteStream(dest);");
    lines.push_back("}");
    int sink = helper_start + (opts.sanitized ? 3 : 2);
    out.sink_line = sink;
    for (int l = helper_start; l <= helper_start + (opts.sanitized ? 4 : 3); ++l) {
      essential.insert(l);
    }
    add_filler(opts.filler_functions - before);
    int handler_start = static_cast<int>(lines.size()) + 1;
    lines.push_back("function handler" + suffix + "(request, reply) {");
    lines.push_back("  save" + suffix + "(request.payload.file);");
    lines.push_back("}");
    essential.insert(handler_start);
    essential.insert(handler_start + 1);
    essential.insert(handler_start + 2);
  } else {
    int handler_start = static_cast<int>(lines.size()) + 1;
    lines.push_back("function handler" + suffix + "(req, res) {");
    lines.push_back("  var target = path.join('www', req.body.name);");
    if (opts.sanitized) {
      lines.push_back("  target = path.basename(target);");
    }
    lines.push_back("  fs.createWriteStream(target);");
    lines.push_back("}");
    out.sink_line = handler_start + (opts.sanitized ? 3 : 2);
    for (int l = handler_start;
         l <= handler_start + (opts.sanitized ? 4 : 3); ++l) {
      essential.insert(l);
    }
    add_filler(opts.filler_functions - before);
  }

  out.code = SourceText::from_lines(std::move(lines));
  if (opts.sanitized) {
    out.sink_line = 0;
    out.essential_lines.clear();
  }
  return out;
}

TaintFixture make_padded_taint_fixture(uint64_t seed, int filler_percent) {
  TaintFixtureOptions opts;
  opts.through_helper = seed % 2 == 0;
  opts.filler_functions = 2;
  opts.filler_statements = 3;
  TaintFixture fixture = make_taint_fixture(seed, opts);
  int essential = static_cast<int>(fixture.essential_lines.size()) + 2;
  // grow filler until the requested share of lines is irrelevant
  while (true) {
    int total = fixture.code.line_count();
    int filler = total - essential;
    if (filler * 100 >= filler_percent * total) break;
    opts.filler_functions += 2;
    fixture = make_taint_fixture(seed, opts);
  }
  return fixture;
}

std::vector<int> string_taint_oracle(const SourceText& code) {
  const auto& lines = code.lines();
  bool has_fs = false, has_path = false;
  for (const auto& l : lines) {
    if (l.find("= require('fs')") != std::string::npos) has_fs = true;
    if (l.find("= require('path')") != std::string::npos) has_path = true;
  }

  auto contains_word = [](const std::string& hay, const std::string& word) {
    size_t pos = 0;
    while ((pos = hay.find(word, pos)) != std::string::npos) {
      bool left_ok = pos == 0 || !(isalnum(hay[pos - 1]) || hay[pos - 1] == '_');
      size_t end = pos + word.size();
      bool right_ok =
          end >= hay.size() || !(isalnum(hay[end]) || hay[end] == '_');
      if (left_ok && right_ok) return true;
      ++pos;
    }
    return false;
  };

  std::vector<int> reports;
  std::set<std::string> tainted;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.rfind("function ", 0) == 0) tainted.clear();  // new scope

    auto rhs_is_tainted = [&](const std::string& rhs) {
      if (rhs.find("path.basename(") != std::string::npos) return false;
      bool source = rhs.find("req.") != std::string::npos ||
                    rhs.find("request.") != std::string::npos;
      bool via_var = false;
      for (const auto& v : tainted) {
        if (contains_word(rhs, v)) via_var = true;
      }
      if (rhs.find("path.join(") != std::string::npos && !has_path) {
        return false;  // propagation needs the path import
      }
      return source || via_var;
    };

    size_t eq = line.find('=');
    if (eq != std::string::npos && line.find("==") == std::string::npos) {
      std::string lhs = line.substr(0, eq);
      std::string rhs = line.substr(eq + 1);
      // normalize "  var target " / "  target "
      std::string name;
      std::stringstream ss(lhs);
      std::string tok;
      while (ss >> tok) name = tok;
      if (!name.empty() && (isalpha(name[0]) || name[0] == '_')) {
        if (rhs_is_tainted(rhs)) {
          tainted.insert(name);
        } else {
          tainted.erase(name);
        }
      }
    }

    size_t fs_call = line.find("fs.");
    if (fs_call != std::string::npos && has_fs) {
      size_t open = line.find('(', fs_call);
      if (open != std::string::npos) {
        std::string args = line.substr(open + 1);
        bool hot = args.find("req.") != std::string::npos ||
                   args.find("request.") != std::string::npos;
        for (const auto& v : tainted) {
          if (contains_word(args, v)) hot = true;
        }
        if (hot) reports.push_back(static_cast<int>(i) + 1);
      }
    }
  }
  return reports;
}

CategoryFixture make_category_fixture(RuleCategory category, uint64_t seed) {
  Rng rng(seed);
  CategoryFixture out;
  out.category = category;
  std::vector<std::string> lines;
  int index = 100;
  auto pad = [&](int units) {
    for (int i = 0; i < units; ++i) {
      for (auto& l : filler_unit(rng, index++, 1)) lines.push_back(std::move(l));
    }
  };

  pad(1 + rng.below(2));
  int anchor = static_cast<int>(lines.size());
  switch (category) {
    case RuleCategory::AST: {
      lines.push_back("const options = {");
      lines.push_back("  retries: 3,");
      lines.push_back("  backoff: 50,");
      lines.push_back("  retries: 9");
      lines.push_back("};");
      out.rule = "DuplicateKey";
      out.line = anchor + 4;
      break;
    }
    case RuleCategory::Local: {
      lines.push_back("function readConfig() {");
      lines.push_back("  var handle = open('config.txt');");
      lines.push_back("  parse(handle);");
      lines.push_back("}");
      out.rule = "OpenNotClosed";
      out.line = anchor + 2;
      break;
    }
    case RuleCategory::FileWide: {
      lines.push_back("function renderPage(title, body) {");
      lines.push_back("  paint(title, body);");
      lines.push_back("}");
      lines.push_back("renderPage('home');");
      out.rule = "ArityMismatch";
      out.line = anchor + 4;
      break;
    }
    case RuleCategory::SecurityLocal: {
      lines.push_back("function runSnippet(code) {");
      lines.push_back("  eval(code);");
      lines.push_back("}");
      lines.push_back("runSnippet('1');");
      out.rule = "BannedCall";
      out.line = anchor + 2;
      break;
    }
    case RuleCategory::SecurityFlow: {
      lines.push_back("const fs = require('fs');");
      lines.push_back("function handler(req, res) {");
      lines.push_back("  fs.createWriteStream(req.query.path);");
      lines.push_back("}");
      out.rule = "PT";
      out.line = anchor + 3;
      break;
    }
  }
  pad(1 + rng.below(2));
  out.code = SourceText::from_lines(std::move(lines));
  return out;
}

SourceText random_text_file(uint64_t seed, int min_lines, int max_lines) {
  Rng rng(seed);
  int n = min_lines + rng.below(std::max(1, max_lines - min_lines + 1));
  std::vector<std::string> lines;
  lines.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    switch (rng.below(5)) {
      case 0: lines.push_back(""); break;
      case 1: lines.push_back("alpha " + std::to_string(rng.below(8))); break;
      case 2: lines.push_back("beta " + std::to_string(rng.below(8))); break;
      case 3: lines.push_back("line " + std::to_string(i)); break;
      default: lines.push_back("gamma"); break;
    }
  }
  return SourceText::from_lines(std::move(lines));
}

SourceText random_brace_file(uint64_t seed, int lines) {
  Rng rng(seed);
  std::vector<std::string> out;
  int depth = 0;
  int counter = 0;
  while (static_cast<int>(out.size()) < lines) {
    int remaining = lines - static_cast<int>(out.size());
    if (depth > 0 && remaining <= depth) {
      out.push_back(std::string(static_cast<size_t>(depth - 1) * 2, ' ') + "}");
      --depth;
      continue;
    }
    int roll = rng.below(100);
    std::string indent(static_cast<size_t>(depth) * 2, ' ');
    if (roll < 25 && depth < 6 && remaining > depth + 2) {
      out.push_back(indent + "group" + std::to_string(counter++) + " {");
      ++depth;
    } else if (roll < 40 && depth > 0) {
      out.push_back(indent.substr(2) + "}");
      --depth;
    } else if (roll < 50) {
      out.push_back("");
    } else {
      out.push_back(indent + "item" + std::to_string(counter++));
    }
  }
  while (depth > 0) {
    out.push_back(std::string(static_cast<size_t>(depth - 1) * 2, ' ') + "}");
    --depth;
  }
  return SourceText::from_lines(std::move(out));
}

int brace_node_count_oracle(const SourceText& code) {
  int count = 1;  // root
  std::vector<int> stack;
  for (int ln = 1; ln <= code.line_count(); ++ln) {
    const std::string& line = code.line(ln);
    bool text = false;
    int opens = 0, closes = 0;
    for (char c : line) {
      if (c == '{') ++opens;
      else if (c == '}') ++closes;
      else if (c != ' ' && c != '\t') text = true;
    }
    // pairs that open and close on the same line collapse to plain text
    int inline_pairs = std::min(opens, closes);
    opens -= inline_pairs;
    closes -= inline_pairs;
    if (inline_pairs > 0) text = true;
    bool event = false;
    for (int i = 0; i < closes; ++i) {
      if (!stack.empty()) {
        stack.pop_back();
        ++count;  // a multi-line chunk just closed
        event = true;
      } else {
        text = true;  // stray closer is plain text
      }
    }
    for (int i = 0; i < opens; ++i) {
      stack.push_back(ln);
      event = true;
    }
    if (!event && text) ++count;  // leaf line
  }
  count += static_cast<int>(stack.size());  // unclosed opens end at EOF
  return count;
}

SourceText apply_random_edits(const SourceText& base, uint64_t seed,
                              int max_edits) {
  Rng rng(seed);
  std::vector<std::string> lines = base.lines();
  int edits = 1 + rng.below(std::max(1, max_edits));
  for (int e = 0; e < edits; ++e) {
    int op = rng.below(3);
    if (lines.empty()) op = 0;
    switch (op) {
      case 0: {
        int pos = rng.below(static_cast<int>(lines.size()) + 1);
        lines.insert(lines.begin() + pos, "edit " + std::to_string(rng.below(100)));
        break;
      }
      case 1: {
        int pos = rng.below(static_cast<int>(lines.size()));
        lines.erase(lines.begin() + pos);
        break;
      }
      default: {
        int pos = rng.below(static_cast<int>(lines.size()));
        lines[static_cast<size_t>(pos)] = "patch " + std::to_string(rng.below(100));
        break;
      }
    }
  }
  return SourceText::from_lines(std::move(lines));
}

SourceText random_minijs_file(uint64_t seed, int statements) {
  Rng rng(seed);
  std::vector<std::string> lines;
  for (int i = 0; i < statements; ++i) {
    switch (rng.below(4)) {
      case 0:
        lines.push_back("var v" + std::to_string(i) + " = " +
                        std::to_string(rng.below(50)) + ";");
        break;
      case 1:
        lines.push_back("use" + std::to_string(i) + "(v" +
                        std::to_string(rng.below(std::max(1, i))) + ");");
        break;
      case 2:
        lines.push_back("function g" + std::to_string(i) + "(x) {");
        lines.push_back("  return x + " + std::to_string(rng.below(9)) + ";");
        lines.push_back("}");
        break;
      default:
        lines.push_back("if (v" + std::to_string(rng.below(std::max(1, i))) +
                        ") {");
        lines.push_back("  mark" + std::to_string(i) + "();");
        lines.push_back("}");
        break;
    }
  }
  if (lines.empty()) lines.push_back("var v0 = 1;");
  return SourceText::from_lines(std::move(lines));
}

}  // namespace snipfix::testing
