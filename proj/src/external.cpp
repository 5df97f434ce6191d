#include "hyperbmc/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyperbmc/diag.hpp"

namespace hyperbmc {

namespace {

struct RunResult {
  bool spawned = false;
  bool timed_out = false;
  int exit_code = -1;
  std::string output;
  std::string error;
};

RunResult run_with_timeout(const std::string& shell_command, std::chrono::seconds timeout) {
  RunResult r;
  int pipefd[2];
  if (pipe(pipefd) != 0) {
    r.error = "pipe() failed";
    return r;
  }
  pid_t pid = fork();
  if (pid < 0) {
    close(pipefd[0]);
    close(pipefd[1]);
    r.error = "fork() failed";
    return r;
  }
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    dup2(pipefd[1], STDERR_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    execl("/bin/sh", "sh", "-c", shell_command.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(pipefd[1]);
  r.spawned = true;

  auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  bool open = true;
  while (open) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      kill(pid, SIGKILL);
      r.timed_out = true;
      break;
    }
    struct pollfd pfd{pipefd[0], POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (pr > 0) {
      ssize_t n = read(pipefd[0], buf, sizeof buf);
      if (n > 0)
        r.output.append(buf, static_cast<size_t>(n));
      else
        open = false;
    }
  }
  close(pipefd[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

}  // namespace

ExternalOutcome solve_external(const QbfInstance& q, const std::string& command,
                               ExternalFormat format, std::chrono::seconds timeout) {
  auto start = std::chrono::steady_clock::now();
  ExternalOutcome out;
  out.kind = ExternalOutcome::Kind::Unparseable;

  std::string text = format == ExternalFormat::Qcir ? to_qcir(q) : to_qdimacs(q);
  const char* ext = format == ExternalFormat::Qcir ? ".qcir" : ".qdimacs";

  // Unique temp file per call; concurrent calls never share a path.
  std::string path;
  {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "hyperbmc_query_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    int fd = mkstemp(buf.data());
    if (fd < 0) {
      out.kind = ExternalOutcome::Kind::SpawnFailure;
      out.detail = "cannot create temp file";
      return out;
    }
    close(fd);
    path = std::string(buf.data()) + ext;
    std::filesystem::rename(buf.data(), path);
    std::ofstream f(path);
    f << text;
  }

  RunResult r = run_with_timeout(command + " '" + path + "'", timeout);
  std::filesystem::remove(path);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!r.spawned) {
    out.kind = ExternalOutcome::Kind::SpawnFailure;
    out.detail = r.error;
    return out;
  }
  if (r.timed_out) {
    out.kind = ExternalOutcome::Kind::Timeout;
    out.detail = "solver exceeded " + std::to_string(timeout.count()) + "s";
    return out;
  }
  if (r.exit_code == 127) {
    out.kind = ExternalOutcome::Kind::SpawnFailure;
    out.detail = "command not found: " + command;
    return out;
  }

  std::optional<bool> sat;
  if (r.exit_code == 10) sat = true;
  if (r.exit_code == 20) sat = false;

  std::vector<long> cert_lits;
  std::istringstream lines(r.output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("s cnf 1", 0) == 0 || line.rfind("r SAT", 0) == 0) sat = true;
    if (line.rfind("s cnf 0", 0) == 0 || line.rfind("r UNSAT", 0) == 0) sat = false;
    if (!line.empty() && (line[0] == 'V' || line[0] == 'v')) {
      std::istringstream ls(line.substr(1));
      long lit;
      while (ls >> lit)
        if (lit != 0) cert_lits.push_back(lit);
    }
  }

  if (!sat) {
    out.kind = ExternalOutcome::Kind::Unparseable;
    out.detail = "no recognizable verdict in solver output (exit code " +
                 std::to_string(r.exit_code) + ")";
    return out;
  }
  out.kind = *sat ? ExternalOutcome::Kind::Sat : ExternalOutcome::Kind::Unsat;

  // Keep only literals for atoms of the leading block run of the matching
  // quantifier kind; auxiliary Tseitin variables fall outside every block.
  if (!cert_lits.empty() && !q.blocks.empty()) {
    QuantKind lead = q.blocks[0].quant;
    bool want = (*sat && lead == QuantKind::Exists) || (!*sat && lead == QuantKind::Forall);
    if (want) {
      int run = q.leading_run_length();
      int last = q.blocks[run - 1].first_atom + q.blocks[run - 1].num_atoms;
      std::vector<std::pair<int, bool>> asg;
      for (long lit : cert_lits) {
        long v = lit < 0 ? -lit : lit;
        if (v >= 1 && v <= last) asg.emplace_back(static_cast<int>(v - 1), lit > 0);
      }
      std::sort(asg.begin(), asg.end());
      if (!asg.empty()) out.outer_assignment = std::move(asg);
    }
  }
  return out;
}

}  // namespace hyperbmc
