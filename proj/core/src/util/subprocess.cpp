#include "iacforge/util/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace iacforge::util {

namespace {

struct Pipe {
  int rd = -1;
  int wr = -1;
  Pipe() {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe() failed");
    rd = fds[0];
    wr = fds[1];
  }
  ~Pipe() {
    if (rd >= 0) close(rd);
    if (wr >= 0) close(wr);
  }
  void close_rd() {
    if (rd >= 0) close(rd);
    rd = -1;
  }
  void close_wr() {
    if (wr >= 0) close(wr);
    wr = -1;
  }
};

void set_nonblocking(int fd) {
  int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

// Drains one fd into sink; returns false once EOF is seen.
bool drain(int fd, std::string& sink) {
  char buf[4096];
  for (;;) {
    ssize_t n = read(fd, buf, sizeof buf);
    if (n > 0) {
      sink.append(buf, static_cast<size_t>(n));
      continue;
    }
    if (n == 0) return false;
    if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
    if (errno == EINTR) continue;
    return false;
  }
}

}  // namespace

RunResult run_command(const std::vector<std::string>& argv, const RunOptions& opts) {
  if (argv.empty()) throw std::runtime_error("run_command: empty argv");

  Pipe in, out, err;

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  std::vector<std::string> env_storage;
  std::vector<char*> cenv;
  for (char** e = environ; *e; ++e) cenv.push_back(*e);
  for (const auto& [k, v] : opts.extra_env) {
    env_storage.push_back(k + "=" + v);
  }
  for (auto& s : env_storage) cenv.push_back(s.data());
  cenv.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork() failed");

  if (pid == 0) {
    // Child. Own process group so a timeout can kill the whole tree.
    setpgid(0, 0);
    dup2(in.rd, STDIN_FILENO);
    dup2(out.wr, STDOUT_FILENO);
    dup2(err.wr, STDERR_FILENO);
    in.close_rd();
    in.close_wr();
    out.close_rd();
    out.close_wr();
    err.close_rd();
    err.close_wr();
    if (opts.workdir && chdir(opts.workdir->c_str()) != 0) _exit(126);
    execvpe(cargv[0], cargv.data(), cenv.data());
    _exit(127);
  }

  in.close_rd();
  out.close_wr();
  err.close_wr();

  // Feed stdin up front; payloads here are small (config files, prompts).
  if (!opts.stdin_data.empty()) {
    size_t off = 0;
    while (off < opts.stdin_data.size()) {
      ssize_t n = write(in.wr, opts.stdin_data.data() + off, opts.stdin_data.size() - off);
      if (n <= 0) break;
      off += static_cast<size_t>(n);
    }
  }
  in.close_wr();

  set_nonblocking(out.rd);
  set_nonblocking(err.rd);

  RunResult result;
  auto deadline = std::chrono::steady_clock::now() + opts.timeout;
  bool limited = opts.timeout.count() > 0;
  bool out_open = true, err_open = true;

  while (out_open || err_open) {
    struct pollfd fds[2];
    nfds_t nfds = 0;
    int out_idx = -1, err_idx = -1;
    if (out_open) {
      out_idx = static_cast<int>(nfds);
      fds[nfds++] = {out.rd, POLLIN, 0};
    }
    if (err_open) {
      err_idx = static_cast<int>(nfds);
      fds[nfds++] = {err.rd, POLLIN, 0};
    }

    int wait_ms = 200;
    if (limited) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                      deadline - std::chrono::steady_clock::now())
                      .count();
      if (left <= 0) {
        result.timed_out = true;
        break;
      }
      wait_ms = static_cast<int>(std::min<long long>(left, 200));
    }

    int rc = poll(fds, nfds, wait_ms);
    if (rc < 0 && errno != EINTR) break;
    if (rc > 0) {
      if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP)))
        out_open = drain(out.rd, result.out);
      if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP)))
        err_open = drain(err.rd, result.err);
    }
  }

  if (result.timed_out) {
    kill(-pid, SIGKILL);
  }

  int status = 0;
  if (waitpid(pid, &status, 0) < 0) {
    result.exit_code = -1;
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }

  // Pick up whatever arrived between the last poll and process exit.
  if (!result.timed_out) {
    drain(out.rd, result.out);
    drain(err.rd, result.err);
  }

  if (!result.timed_out && result.exit_code == 127 && result.out.empty() && result.err.empty()) {
    throw std::runtime_error("run_command: cannot execute '" + argv[0] + "'");
  }
  return result;
}

bool is_executable_file(const std::string& path) {
  struct stat st{};
  if (stat(path.c_str(), &st) != 0) return false;
  if (!S_ISREG(st.st_mode)) return false;
  return access(path.c_str(), X_OK) == 0;
}

std::optional<std::string> resolve_binary(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    if (is_executable_file(name)) return name;
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::string candidate = dir + "/" + name;
    if (is_executable_file(candidate)) return candidate;
  }
  return std::nullopt;
}

}  // namespace iacforge::util
