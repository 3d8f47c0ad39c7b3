// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include "evoheur/errors.hpp"

namespace evoheur {
namespace {

int remaining_ms(Subprocess::Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Subprocess::Clock::now());
  return left.count() <= 0 ? 0 : static_cast<int>(std::min<long>(left.count(), 1 << 30));
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv, long memory_cap_bytes) {
  if (argv.empty()) throw ConfigError("runner command is empty");
  static const bool sigpipe_ignored = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  int to_child[2], from_child[2];
  if (pipe2(to_child, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(from_child, O_CLOEXEC) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
    throw Error(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    const int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    if (memory_cap_bytes > 0) {
      rlimit lim{static_cast<rlim_t>(memory_cap_bytes), static_cast<rlim_t>(memory_cap_bytes)};
      setrlimit(RLIMIT_AS, &lim);
    }
    std::signal(SIGPIPE, SIG_DFL);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  setpgid(pid, pid);  // also from the parent, to close the race with kill()
  pid_ = pid;
  close(to_child[0]);
  close(from_child[1]);
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
  fcntl(in_fd_, F_SETFL, fcntl(in_fd_, F_GETFL) | O_NONBLOCK);
  fcntl(out_fd_, F_SETFL, fcntl(out_fd_, F_GETFL) | O_NONBLOCK);
}

Subprocess::~Subprocess() {
  if (in_fd_ >= 0) close(in_fd_);
  if (out_fd_ >= 0) close(out_fd_);
  if (!reaped_) {
    kill();
    finish(std::chrono::milliseconds(5000));
  }
}

Subprocess::Io Subprocess::write_line(const std::string& line, Clock::time_point deadline) {
  const std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
    if (n > 0) {
      off += static_cast<std::size_t>(n);
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK) return Io::kEof;
    pollfd p{in_fd_, POLLOUT, 0};
    const int ms = remaining_ms(deadline);
    if (ms == 0) return Io::kTimeout;
    const int r = poll(&p, 1, ms);
    if (r == 0) return Io::kTimeout;
    if (r < 0 && errno != EINTR) return Io::kEof;
    if (p.revents & (POLLERR | POLLHUP)) return Io::kEof;
  }
  return Io::kOk;
}

Subprocess::Io Subprocess::read_line(std::string& line, Clock::time_point deadline,
                                     std::size_t max_line) {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return Io::kOk;
    }
    if (buffer_.size() > max_line) return Io::kTooLong;
    char chunk[65536];
    const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
    if (n > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(n));
      continue;
    }
    if (n == 0) return Io::kEof;
    if (errno == EINTR) continue;
    if (errno != EAGAIN && errno != EWOULDBLOCK) return Io::kEof;
    pollfd p{out_fd_, POLLIN, 0};
    const int ms = remaining_ms(deadline);
    if (ms == 0) return Io::kTimeout;
    const int r = poll(&p, 1, ms);
    if (r == 0) return Io::kTimeout;
    if (r < 0 && errno != EINTR) return Io::kEof;
  }
}

void Subprocess::kill() {
  if (pid_ > 0 && !reaped_) {
    ::kill(-pid_, SIGKILL);
    ::kill(pid_, SIGKILL);
  }
}

std::string Subprocess::finish(std::chrono::milliseconds wait) {
  if (pid_ <= 0) return "exit 127";
  const auto until = Clock::now() + wait;
  while (!reaped_) {
    const pid_t r = waitpid(pid_, &status_, WNOHANG);
    if (r == pid_) {
      reaped_ = true;
      break;
    }
    if (r < 0 && errno != EINTR) {
      reaped_ = true;
      status_ = 0;
      break;
    }
    if (Clock::now() >= until) {
      kill();
      waitpid(pid_, &status_, 0);
      reaped_ = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status_)) return "exit " + std::to_string(WEXITSTATUS(status_));
  if (WIFSIGNALED(status_)) return "signal " + std::to_string(WTERMSIG(status_));
  return "running";
}

}  // namespace evoheur
