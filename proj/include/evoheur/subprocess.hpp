// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Child process with line-oriented stdin/stdout pipes and deadline-bounded
// I/O. stderr goes to /dev/null. The child runs in its own process group so
// kill() also reaches anything it spawned.

#pragma once

#include <chrono>
#include <string>
#include <sys/types.h>
#include <vector>

namespace evoheur {

class Subprocess {
 public:
  using Clock = std::chrono::steady_clock;

  enum class Io { kOk, kTimeout, kEof, kTooLong };

  // Throws Error when the process cannot be started. memory_cap_bytes > 0
  // sets RLIMIT_AS in the child.
  Subprocess(const std::vector<std::string>& argv, long memory_cap_bytes = 0);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Appends '\n'.
  Io write_line(const std::string& line, Clock::time_point deadline);
  // Strips the '\n'. Lines above max_line bytes yield kTooLong.
  Io read_line(std::string& line, Clock::time_point deadline,
               std::size_t max_line = 64u << 20);

  void kill();
  // Reaps the child, waiting at most `wait`; kills it if still running.
  // Returns "exit N", "signal N" or "running".
  std::string finish(std::chrono::milliseconds wait = std::chrono::milliseconds(2000));

  pid_t pid() const { return pid_; }

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;   // child's stdin
  int out_fd_ = -1;  // child's stdout
  bool reaped_ = false;
  int status_ = 0;
  std::string buffer_;
};

}  // namespace evoheur
