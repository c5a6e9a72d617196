#include "snipfix/external_analyzer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "snipfix/errors.hpp"

namespace snipfix {

using json = nlohmann::json;

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> parts;
  std::stringstream ss(command);
  std::string part;
  while (ss >> part) parts.push_back(part);
  return parts;
}

struct ExternalAnalyzer::Child {
  pid_t pid = -1;
  int to_child = -1;    // write end
  int from_child = -1;  // read end
  std::string buffer;   // partial line accumulator

  ~Child() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    if (pid > 0) {
      ::kill(pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
    }
  }
};

ExternalAnalyzer::ExternalAnalyzer(AnalyzerHandle handle)
    : handle_(std::move(handle)) {
  if (handle_.command.empty()) {
    throw std::invalid_argument("external analyzer needs a command");
  }
}

ExternalAnalyzer::~ExternalAnalyzer() = default;

void ExternalAnalyzer::ensure_child() {
  // A dead child turns writes into EPIPE instead of a fatal signal.
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  if (child_ && child_->pid > 0) return;

  auto parts = split_command(handle_.command);
  std::vector<char*> argv;
  argv.reserve(parts.size() + 1);
  for (auto& p : parts) argv.push_back(p.data());
  argv.push_back(nullptr);

  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw ExternalAnalyzerError("failed to create pipes");
  }

  pid_t pid = ::fork();
  if (pid < 0) {
    throw ExternalAnalyzerError("fork failed");
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execvp(argv[0], argv.data());
    _exit(127);
  }

  child_ = std::make_unique<Child>();
  child_->pid = pid;
  child_->to_child = in_pipe[1];
  child_->from_child = out_pipe[0];
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(child_->from_child, F_SETFL, O_NONBLOCK);
}

void ExternalAnalyzer::kill_child() { child_.reset(); }

// Send one request line and read one response line, honoring the timeout.
std::string ExternalAnalyzer::roundtrip(const std::string& request_line) {
  ensure_child();

  std::string payload = request_line + "\n";
  size_t written = 0;
  while (written < payload.size()) {
    ssize_t n = ::write(child_->to_child, payload.data() + written,
                        payload.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ExternalAnalyzerError("write to analyzer failed: " +
                                  std::string(std::strerror(errno)));
    }
    written += static_cast<size_t>(n);
  }

  auto deadline = std::chrono::steady_clock::now() + handle_.timeout;
  while (true) {
    size_t nl = child_->buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = child_->buffer.substr(0, nl);
      child_->buffer.erase(0, nl + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      throw ExternalAnalyzerError("analyzer response timed out");
    }
    struct pollfd pfd = {child_->from_child, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ExternalAnalyzerError("poll on analyzer failed");
    }
    if (rc == 0) {
      throw ExternalAnalyzerError("analyzer response timed out");
    }
    char chunk[4096];
    ssize_t n = ::read(child_->from_child, chunk, sizeof(chunk));
    if (n == 0) {
      throw ExternalAnalyzerError("analyzer closed its output");
    }
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      throw ExternalAnalyzerError("read from analyzer failed");
    }
    child_->buffer.append(chunk, static_cast<size_t>(n));
  }
}

bool ExternalAnalyzer::ping() {
  json req = {{"v", 1}, {"op", "ping"}};
  std::string line = roundtrip(req.dump());
  try {
    json resp = json::parse(line);
    return resp.value("v", 0) == 1 && resp.value("pong", false);
  } catch (const json::exception&) {
    throw ExternalAnalyzerError("malformed ping response: " + line);
  }
}

namespace {

std::vector<Report> parse_reports(const std::string& line) {
  json resp;
  try {
    resp = json::parse(line);
  } catch (const json::exception&) {
    throw ExternalAnalyzerError("malformed analyzer response: " + line);
  }
  if (resp.value("v", 0) != 1 || !resp.contains("reports") ||
      !resp["reports"].is_array()) {
    throw ExternalAnalyzerError("analyzer response missing reports: " + line);
  }
  std::vector<Report> out;
  for (const auto& item : resp["reports"]) {
    if (!item.is_object() || !item.contains("rule") ||
        !item.contains("category") || !item.contains("message") ||
        !item.contains("line") || !item["line"].is_number_integer()) {
      throw ExternalAnalyzerError("malformed report entry: " + item.dump());
    }
    Report r;
    r.rule = item["rule"].get<std::string>();
    try {
      r.category = category_from_name(item["category"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ExternalAnalyzerError(e.what());
    }
    r.message = item["message"].get<std::string>();
    r.line = item["line"].get<int>();
    if (item.contains("provenance_lines")) {
      if (!item["provenance_lines"].is_array()) {
        throw ExternalAnalyzerError("provenance_lines must be an array");
      }
      std::set<int> prov;
      for (const auto& v : item["provenance_lines"]) {
        if (!v.is_number_integer()) {
          throw ExternalAnalyzerError("provenance_lines must hold integers");
        }
        prov.insert(v.get<int>());
      }
      r.provenance_lines = std::move(prov);
    }
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const Report& a, const Report& b) {
    return a.line != b.line ? a.line < b.line : a.rule < b.rule;
  });
  return out;
}

}  // namespace

std::vector<Report> ExternalAnalyzer::run(const SourceText& code) {
  json req = {{"v", 1}, {"op", "analyze"}, {"code", code.to_bytes()}};
  const std::string request_line = req.dump();

  while (true) {
    try {
      return parse_reports(roundtrip(request_line));
    } catch (const ExternalAnalyzerError&) {
      kill_child();
      if (restarts_used_ >= handle_.max_restarts) throw;
      ++restarts_used_;
    }
  }
}

}  // namespace snipfix
