// SPDX-License-Identifier: Apache-2.0
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <filesystem>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/image_io.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::tools {

namespace fs = std::filesystem;

SubprocessScorer::SubprocessScorer(std::string id, std::string command, std::string scratch_dir,
                                   std::chrono::milliseconds timeout)
    : id_(std::move(id)), command_(std::move(command)), scratch_dir_(std::move(scratch_dir)), timeout_(timeout) {
  std::error_code ec;
  fs::create_directories(scratch_dir_, ec);
  if (ec) throw UsageError(id_ + ": cannot create scratch dir " + scratch_dir_ + ": " + ec.message());
}

SubprocessScorer::~SubprocessScorer() {
  std::lock_guard lock(mutex_);
  stop_locked();
}

void SubprocessScorer::start_locked() {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw AdapterError(id_ + ": pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw AdapterError(id_ + ": pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw AdapterError(id_ + ": fork failed");
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
  read_buffer_.clear();
}

void SubprocessScorer::stop_locked() noexcept {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
  read_buffer_.clear();
}

double SubprocessScorer::score(const ScoringRequest& request) {
  const auto png = encode_png(to_gray8(request.materialize()));
  std::lock_guard lock(mutex_);
  const fs::path path = fs::path(scratch_dir_) / (request.record.case_id + "_" + std::to_string(counter_++) + ".png");
  write_file_atomic(path.string(), png);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove(p, ec);
    }
  } cleanup{path};

  if (pid_ < 0) start_locked();

  const std::string line = path.string() + "\t" + request.record.case_id + "\n";
  std::size_t written = 0;
  struct sigaction ignore {};
  ignore.sa_handler = SIG_IGN;
  struct sigaction previous {};
  ::sigaction(SIGPIPE, &ignore, &previous);
  while (written < line.size()) {
    const ssize_t n = ::write(to_child_, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      ::sigaction(SIGPIPE, &previous, nullptr);
      stop_locked();
      throw AdapterError(id_ + ": scorer process is not accepting input");
    }
    written += static_cast<std::size_t>(n);
  }
  ::sigaction(SIGPIPE, &previous, nullptr);

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  std::size_t newline;
  while ((newline = read_buffer_.find('\n')) == std::string::npos) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      stop_locked();
      throw AdapterError(id_ + ": scorer timed out");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int r = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) continue;
    char buf[512];
    const ssize_t n = ::read(from_child_, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      stop_locked();
      throw AdapterError(id_ + ": scorer process exited");
    }
    read_buffer_.append(buf, static_cast<std::size_t>(n));
  }
  std::string reply = read_buffer_.substr(0, newline);
  read_buffer_.erase(0, newline + 1);
  while (!reply.empty() && (reply.back() == '\r' || reply.back() == ' ')) reply.pop_back();

  double p = 0;
  const auto [ptr, ec] = std::from_chars(reply.data(), reply.data() + reply.size(), p);
  if (ec != std::errc{} || ptr != reply.data() + reply.size()) {
    throw AdapterError(id_ + ": unparseable scorer reply '" + reply + "'");
  }
  return p;
}

}  // namespace cxrt::tools
