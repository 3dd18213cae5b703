#include "hei/external_objective.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "hei/errors.hpp"
#include "hei/trace_io.hpp"

namespace hei {

namespace {

void ignore_sigpipe() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

[[noreturn]] void fail(const std::string& what) { throw ObjectiveError(what); }

}  // namespace

ExternalProcess::ExternalProcess(std::string command, double timeout_seconds)
    : command_(std::move(command)), timeout_(timeout_seconds) {
  if (command_.empty()) throw ConfigError("external objective command is empty");
  if (!(timeout_ > 0.0)) throw ConfigError("external objective timeout must be positive");
}

ExternalProcess::~ExternalProcess() { shutdown(); }

void ExternalProcess::spawn() {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) fail("pipe: " + std::string(std::strerror(errno)));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    fail("pipe: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (const int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    fail("fork: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

void ExternalProcess::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 100 && !reaped; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        reaped = true;
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  buffer_.clear();
}

std::string ExternalProcess::read_line() {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration<double>(timeout_);
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) fail("external objective timed out after " + format_double(timeout_) + " s");
    pollfd p{from_child_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(left, 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      fail("poll: " + std::string(std::strerror(errno)));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t got = ::read(from_child_, chunk, sizeof(chunk));
    if (got < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      fail("read: " + std::string(std::strerror(errno)));
    }
    if (got == 0) fail("external objective exited before replying");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

double ExternalProcess::evaluate(const Eigen::VectorXd& x) {
  if (pid_ < 0) spawn();
  std::string line;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (j > 0) line.push_back(' ');
    line += format_double(x[j]);
  }
  line.push_back('\n');
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t w = ::write(to_child_, line.data() + sent, line.size() - sent);
    if (w < 0) {
      if (errno == EINTR) continue;
      shutdown();
      fail("external objective is not accepting input");
    }
    sent += static_cast<std::size_t>(w);
  }
  std::string reply;
  try {
    reply = read_line();
  } catch (...) {
    shutdown();
    throw;
  }
  double v = 0.0;
  try {
    v = parse_double(reply);
  } catch (const ArgumentError&) {
    fail("external objective replied with a non-numeric line: '" + reply + "'");
  }
  if (!std::isfinite(v)) fail("external objective replied with a non-finite value");
  return v;
}

Objective make_external_objective(const std::string& command, double timeout_seconds) {
  auto proc = std::make_shared<ExternalProcess>(command, timeout_seconds);
  return [proc](const Eigen::VectorXd& x) { return proc->evaluate(x); };
}

}  // namespace hei
