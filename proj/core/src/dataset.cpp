#include "snipfix/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "snipfix/errors.hpp"

namespace snipfix {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

std::string flavor_name(Flavor f) {
  switch (f) {
    case Flavor::FullOriginal: return "FullOriginal";
    case Flavor::CodeReduced: return "CodeReduced";
    case Flavor::Window3: return "Window3";
    case Flavor::LongContext: return "LongContext";
  }
  return "FullOriginal";
}

Flavor flavor_from_name(const std::string& name) {
  if (name == "FullOriginal") return Flavor::FullOriginal;
  if (name == "CodeReduced") return Flavor::CodeReduced;
  if (name == "Window3") return Flavor::Window3;
  if (name == "LongContext") return Flavor::LongContext;
  throw std::invalid_argument("unknown flavor: " + name);
}

std::string split_name(Split s) { return s == Split::Train ? "train" : "test"; }

std::string license_class_name(LicenseClass c) {
  return c == LicenseClass::Permissive ? "permissive" : "restrictive";
}

LicenseClass license_class_from_name(const std::string& name) {
  if (name == "permissive") return LicenseClass::Permissive;
  if (name == "restrictive") return LicenseClass::Restrictive;
  throw std::invalid_argument("unknown license class: " + name);
}

std::string reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::PostUnparseable: return "post_unparseable";
    case RejectReason::ReportSurvives: return "report_survives";
    case RejectReason::NoOverlappingHunks: return "no_overlapping_hunks";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// mining
// ---------------------------------------------------------------------------

std::vector<Candidate> mine_candidates(const SourceText& pre,
                                       const SourceText& post,
                                       Analyzer& analyzer) {
  auto pre_reports = analyzer.analyze(pre);
  auto post_reports = analyzer.analyze(post);
  LineDiff diff = diff_lines(pre, post);

  std::vector<Candidate> out;
  for (const Report& r : pre_reports) {
    if (r.rule == kParseMarkerRule) continue;
    TrackedLine tracked = track_line(diff, r.line);
    Candidate cand;
    cand.report = r;
    cand.evidence.tracking = tracked.kind;
    switch (tracked.kind) {
      case TrackKind::Matched: {
        cand.evidence.post_line = tracked.line;
        bool still_there = std::any_of(
            post_reports.begin(), post_reports.end(), [&](const Report& pr) {
              return pr.rule == r.rule && pr.line == tracked.line;
            });
        if (still_there) continue;
        break;
      }
      case TrackKind::Deleted:
        break;  // the location itself is gone
      case TrackKind::Replaced: {
        cand.evidence.post_first = tracked.range_first;
        cand.evidence.post_last = tracked.range_last;
        cand.evidence.ambiguous = true;
        bool still_there = std::any_of(
            post_reports.begin(), post_reports.end(), [&](const Report& pr) {
              return pr.rule == r.rule && pr.line >= tracked.range_first &&
                     pr.line <= tracked.range_last;
            });
        if (still_there) continue;
        break;
      }
    }
    out.push_back(std::move(cand));
  }
  return out;
}

// ---------------------------------------------------------------------------
// reduced pair
// ---------------------------------------------------------------------------

namespace {

// Apply `kept` hunks of the pre->post diff to `pre`. Emits the edited full
// file plus, per output line, the pre line it came from (0 for hunk lines).
struct AppliedEdit {
  SourceText text;
  std::vector<int> origin;  // 1-based pre line per output line, 0 = new
};

AppliedEdit apply_hunks(const SourceText& pre, const SourceText& post,
                        const std::vector<DiffHunk>& kept) {
  std::vector<std::string> lines;
  std::vector<int> origin;
  int next_pre = 1;
  auto copy_until = [&](int until_exclusive) {
    while (next_pre < until_exclusive) {
      lines.push_back(pre.line(next_pre));
      origin.push_back(next_pre);
      ++next_pre;
    }
  };
  for (const auto& h : kept) {
    copy_until(h.a_first);
    if (!h.a_empty()) next_pre = h.a_last + 1;  // drop replaced lines
    for (int b = h.b_first; b <= h.b_last; ++b) {
      lines.push_back(post.line(b));
      origin.push_back(0);
    }
  }
  copy_until(pre.line_count() + 1);
  AppliedEdit out;
  out.text = SourceText::from_lines(std::move(lines), pre.line_ending(),
                                    pre.trailing_newline());
  out.origin = std::move(origin);
  return out;
}

bool is_relevant_hunk(const DiffHunk& h, const LineMapping& mapping,
                      int pre_len) {
  auto mapped_or_adjacent = [&](int line) {
    return mapping.contains_original(line) ||
           (line - 1 >= 1 && mapping.contains_original(line - 1)) ||
           (line + 1 <= pre_len && mapping.contains_original(line + 1));
  };
  if (h.a_empty()) {
    // insertion between a_first-1 and a_first
    int before = h.a_first - 1;
    int after = h.a_first;
    return (before >= 1 && mapping.contains_original(before)) ||
           (after <= pre_len && mapping.contains_original(after));
  }
  for (int a = h.a_first; a <= h.a_last; ++a) {
    if (!mapped_or_adjacent(a)) return false;
  }
  return true;
}

}  // namespace

BuildPairResult build_reduced_pair(const SourceText& pre,
                                   const SourceText& post,
                                   const Report& target, Analyzer& analyzer,
                                   const ReductionConfig& cfg) {
  BuildPairResult result;

  ReductionOutcome reduction = code_reduce(pre, target, analyzer, cfg);
  const LineMapping& mapping = reduction.mapping;

  LineDiff diff = diff_lines(pre, post);
  std::vector<DiffHunk> kept;
  for (const auto& h : diff.hunks) {
    if (is_relevant_hunk(h, mapping, pre.line_count())) kept.push_back(h);
  }
  if (kept.empty()) {
    result.reject = RejectReason::NoOverlappingHunks;
    return result;
  }

  AppliedEdit edited = apply_hunks(pre, post, kept);

  // Project: keep edit lines that came from mapped pre lines plus every
  // hunk-borne line; the rest belongs to code the reduction dropped.
  std::vector<std::string> reduced_post_lines;
  std::vector<std::pair<int, int>> post_pairs;  // c' line -> pre line
  for (size_t i = 0; i < edited.origin.size(); ++i) {
    int origin = edited.origin[i];
    if (origin == 0) {
      reduced_post_lines.push_back(edited.text.line(static_cast<int>(i) + 1));
    } else if (mapping.contains_original(origin)) {
      reduced_post_lines.push_back(pre.line(origin));
      post_pairs.emplace_back(static_cast<int>(reduced_post_lines.size()),
                              origin);
    }
  }
  SourceText reduced_post = SourceText::from_lines(
      std::move(reduced_post_lines), pre.line_ending(), pre.trailing_newline());
  LineMapping post_mapping(std::move(post_pairs));

  if (!parses(reduced_post, analyzer.grammar())) {
    result.reject = RejectReason::PostUnparseable;
    return result;
  }
  if (report_exists(analyzer, reduced_post, target, post_mapping)) {
    result.reject = RejectReason::ReportSurvives;
    return result;
  }

  ReducedPair pair;
  pair.reduced_pre = reduction.reduced;
  pair.reduced_post = std::move(reduced_post);
  pair.mapping = mapping;
  pair.relevant_post = std::move(edited.text);
  pair.kept_hunks = std::move(kept);
  pair.reduction = std::move(reduction);
  result.pair = std::move(pair);
  return result;
}

// ---------------------------------------------------------------------------
// windows
// ---------------------------------------------------------------------------

WindowResult extract_window(const SourceText& code, int line, int radius) {
  if (line < 1 || line > code.line_count()) {
    throw std::invalid_argument("window line out of range");
  }
  if (radius < 1) {
    throw std::invalid_argument("window radius must be positive");
  }
  int first = std::max(1, line - radius);
  int last = std::min(code.line_count(), line + radius);
  std::vector<int> keep;
  std::vector<std::pair<int, int>> pairs;
  for (int l = first; l <= last; ++l) {
    keep.push_back(l);
    pairs.emplace_back(l - first + 1, l);
  }
  WindowResult out;
  out.window = code.subset(keep);
  out.mapping = LineMapping(std::move(pairs));
  return out;
}

// ---------------------------------------------------------------------------
// flavor pipeline
// ---------------------------------------------------------------------------

namespace {

// Best-effort landing position of a pre line on the post side.
int tracked_position_hint(const LineDiff& diff, int line) {
  TrackedLine t = track_line(diff, line);
  switch (t.kind) {
    case TrackKind::Matched: return t.line;
    case TrackKind::Replaced: return t.range_first;
    case TrackKind::Deleted: {
      int best = 0;
      for (const auto& [a, b] : diff.matches) {
        if (a < line) best = b;
      }
      return best + 1;
    }
  }
  return 1;
}

}  // namespace

FlavorOutcome build_flavors(const PairRecord& record, Analyzer& analyzer,
                            const FlavorOptions& options) {
  FlavorOutcome out;
  std::vector<Candidate> candidates;
  try {
    candidates = mine_candidates(record.pre, record.post, analyzer);
  } catch (const std::exception& e) {
    out.skipped.push_back({record.id, std::string("mining failed: ") + e.what()});
    return out;
  }
  if (candidates.empty()) {
    out.skipped.push_back({record.id, "no fix candidates"});
    return out;
  }

  for (const Candidate& cand : candidates) {
    const Report& target = cand.report;
    std::string sample_id = record.id + "-" + target.rule + "-L" +
                            std::to_string(target.line);

    BuildPairResult built;
    try {
      built = build_reduced_pair(record.pre, record.post, target, analyzer,
                                 options.reduction);
    } catch (const std::exception& e) {
      out.skipped.push_back({sample_id, e.what()});
      continue;
    }
    if (!built.pair) {
      out.skipped.push_back({sample_id, reject_reason_name(*built.reject)});
      continue;
    }
    const ReducedPair& pair = *built.pair;

    FixSample base;
    base.id = sample_id;
    base.repo = record.repo;
    base.license_class = record.license_class;
    base.split = split_for(record.license_class);
    base.rule = target.rule;
    base.category = target.category;
    base.message = target.message;

    if (options.flavors.count(Flavor::FullOriginal)) {
      FixSample s = base;
      s.flavor = Flavor::FullOriginal;
      s.line = target.line;
      s.pre = record.pre;
      s.post = pair.relevant_post;
      out.samples.push_back(std::move(s));
    }
    if (options.flavors.count(Flavor::CodeReduced)) {
      auto reduced_line = pair.mapping.reduced_of(target.line);
      if (!reduced_line) {
        out.skipped.push_back({sample_id, "report line missing from reduction"});
      } else {
        FixSample s = base;
        s.flavor = Flavor::CodeReduced;
        s.line = *reduced_line;
        s.pre = pair.reduced_pre;
        s.post = pair.reduced_post;
        s.mapping = pair.mapping;
        out.samples.push_back(std::move(s));
      }
    }
    LineDiff relevant_diff = diff_lines(record.pre, pair.relevant_post);
    auto window_flavor = [&](Flavor flavor, int radius) {
      WindowResult pre_w = extract_window(record.pre, target.line, radius);
      int post_anchor = std::clamp(
          tracked_position_hint(relevant_diff, target.line), 1,
          std::max(1, pair.relevant_post.line_count()));
      WindowResult post_w =
          extract_window(pair.relevant_post, post_anchor, radius);
      FixSample s = base;
      s.flavor = flavor;
      s.line = *pre_w.mapping.reduced_of(target.line);
      s.pre = std::move(pre_w.window);
      s.post = std::move(post_w.window);
      out.samples.push_back(std::move(s));
    };
    if (options.flavors.count(Flavor::Window3)) {
      window_flavor(Flavor::Window3, options.window_radius);
    }
    if (options.flavors.count(Flavor::LongContext)) {
      window_flavor(Flavor::LongContext, options.long_context_radius);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

namespace {

void validate_sample(const FixSample& s, int line_no) {
  if (s.id.empty()) throw SchemaError(line_no, "id must not be empty");
  if (s.line < 1) throw SchemaError(line_no, "line must be >= 1");
  bool test_split = s.split == Split::Test;
  bool restrictive = s.license_class == LicenseClass::Restrictive;
  if (test_split != restrictive) {
    throw SchemaError(line_no,
                      "split/license mismatch: test <=> restrictive");
  }
  if (s.flavor == Flavor::CodeReduced) {
    if (!s.mapping) {
      throw SchemaError(line_no, "CodeReduced sample needs a mapping");
    }
  } else if (s.mapping) {
    throw SchemaError(line_no, "mapping is only valid for CodeReduced");
  }
}

void check_split_purity(const std::vector<FixSample>& samples) {
  std::map<std::string, Split> seen;
  for (const auto& s : samples) {
    auto it = seen.find(s.repo);
    if (it == seen.end()) {
      seen.emplace(s.repo, s.split);
    } else if (it->second != s.split) {
      throw std::invalid_argument("repository " + s.repo +
                                  " appears in both train and test");
    }
  }
}

}  // namespace

std::string export_jsonl_string(const std::vector<FixSample>& samples,
                                Analyzer* revalidate) {
  check_split_purity(samples);
  std::string out;
  int line_no = 0;
  for (const auto& s : samples) {
    ++line_no;
    validate_sample(s, line_no);
    if (revalidate && s.flavor == Flavor::CodeReduced) {
      Report target;
      target.rule = s.rule;
      target.category = s.category;
      target.message = s.message;
      target.line = s.line;
      if (!parses(s.pre, revalidate->grammar()) ||
          !report_exists(*revalidate, s.pre, target,
                         LineMapping::identity(s.pre.line_count()))) {
        throw std::invalid_argument("sample " + s.id +
                                    ": reduced pre lost its report");
      }
      auto original_line = s.mapping->original_of(s.line);
      if (!original_line) {
        throw std::invalid_argument("sample " + s.id +
                                    ": report line is not mapped");
      }
      Report original_target = target;
      original_target.line = *original_line;
      // post lines -> original lines, via the unchanged lines of c -> c'
      std::vector<std::pair<int, int>> post_pairs;
      for (const auto& [a, b] : diff_lines(s.pre, s.post).matches) {
        auto orig = s.mapping->original_of(a);
        if (orig) post_pairs.emplace_back(b, *orig);
      }
      LineMapping post_mapping(std::move(post_pairs));
      if (!parses(s.post, revalidate->grammar()) ||
          report_exists(*revalidate, s.post, original_target, post_mapping)) {
        throw std::invalid_argument("sample " + s.id +
                                    ": reduced post still raises the report");
      }
    }

    ordered_json j;
    j["id"] = s.id;
    j["repo"] = s.repo;
    j["license_class"] = license_class_name(s.license_class);
    j["split"] = split_name(s.split);
    j["rule"] = s.rule;
    j["category"] = category_name(s.category);
    j["message"] = s.message;
    j["line"] = s.line;
    j["flavor"] = flavor_name(s.flavor);
    j["pre"] = s.pre.to_bytes();
    j["post"] = s.post.to_bytes();
    if (s.mapping) {
      ordered_json pairs = ordered_json::array();
      for (const auto& [r, o] : s.mapping->pairs()) {
        pairs.push_back(ordered_json::array({r, o}));
      }
      j["mapping"] = std::move(pairs);
    } else {
      j["mapping"] = nullptr;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

void export_jsonl(const std::vector<FixSample>& samples,
                  const std::string& path, Analyzer* revalidate) {
  std::string payload = export_jsonl_string(samples, revalidate);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << payload;
}

std::vector<FixSample> import_jsonl_string(const std::string& payload) {
  std::vector<FixSample> samples;
  std::istringstream stream(payload);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
    }
    FixSample s;
    try {
      s.id = j.at("id").get<std::string>();
      s.repo = j.at("repo").get<std::string>();
      s.license_class =
          license_class_from_name(j.at("license_class").get<std::string>());
      std::string split = j.at("split").get<std::string>();
      if (split != "train" && split != "test") {
        throw std::invalid_argument("unknown split: " + split);
      }
      s.split = split == "train" ? Split::Train : Split::Test;
      s.rule = j.at("rule").get<std::string>();
      s.category = category_from_name(j.at("category").get<std::string>());
      s.message = j.at("message").get<std::string>();
      s.line = j.at("line").get<int>();
      s.flavor = flavor_from_name(j.at("flavor").get<std::string>());
      s.pre = SourceText::from_bytes(j.at("pre").get<std::string>());
      s.post = SourceText::from_bytes(j.at("post").get<std::string>());
      if (!j.at("mapping").is_null()) {
        std::vector<std::pair<int, int>> pairs;
        for (const auto& entry : j.at("mapping")) {
          if (!entry.is_array() || entry.size() != 2) {
            throw std::invalid_argument("mapping entries must be [r, o]");
          }
          pairs.emplace_back(entry[0].get<int>(), entry[1].get<int>());
        }
        s.mapping = LineMapping(std::move(pairs));
      }
    } catch (const json::exception& e) {
      throw SchemaError(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(line_no, e.what());
    }
    validate_sample(s, line_no);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<FixSample> import_jsonl(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return import_jsonl_string(buffer.str());
}

std::vector<PairRecord> import_pairs_jsonl(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open: " + path);
  std::vector<PairRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
    }
    PairRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.repo = j.at("repo").get<std::string>();
      r.license_class =
          license_class_from_name(j.at("license_class").get<std::string>());
      if (j.contains("pre")) {
        r.pre = SourceText::from_bytes(j.at("pre").get<std::string>());
      } else {
        std::ifstream pre_file(j.at("pre_path").get<std::string>(),
                               std::ios::binary);
        if (!pre_file) throw std::invalid_argument("cannot open pre_path");
        std::stringstream buf;
        buf << pre_file.rdbuf();
        r.pre = SourceText::from_bytes(buf.str());
      }
      if (j.contains("post")) {
        r.post = SourceText::from_bytes(j.at("post").get<std::string>());
      } else {
        std::ifstream post_file(j.at("post_path").get<std::string>(),
                                std::ios::binary);
        if (!post_file) throw std::invalid_argument("cannot open post_path");
        std::stringstream buf;
        buf << post_file.rdbuf();
        r.post = SourceText::from_bytes(buf.str());
      }
    } catch (const json::exception& e) {
      throw SchemaError(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(line_no, e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace snipfix
