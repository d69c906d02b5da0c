#include "ouq/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "ouq/errors.hpp"

namespace ouq {

namespace {

[[noreturn]] void child_exec(const std::string& command,
                             const std::string& workdir, int in_fd, int out_fd) {
  if (!workdir.empty() && ::chdir(workdir.c_str()) != 0) ::_exit(127);
  ::dup2(in_fd, STDIN_FILENO);
  ::dup2(out_fd, STDOUT_FILENO);
  ::close(in_fd);
  ::close(out_fd);
  ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
  ::_exit(127);
}

}  // namespace

ChildProcess::ChildProcess(const std::string& command,
                           const std::string& working_directory) {
  int to_child[2] = {-1, -1};
  int from_child[2] = {-1, -1};
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
    throw ProcessExit("failed to create pipes for external model");

  const int pid = ::fork();
  if (pid < 0) throw ProcessExit("failed to fork external model process");
  if (pid == 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    child_exec(command, working_directory, to_child[0], from_child[1]);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
  // Broken pipes are reported as ProcessExit, not SIGPIPE.
  ::signal(SIGPIPE, SIG_IGN);
}

ChildProcess::~ChildProcess() { terminate(); }

void ChildProcess::terminate() noexcept {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
}

void ChildProcess::write_line(const std::string& line) {
  std::string payload = line;
  payload.push_back('\n');
  std::size_t sent = 0;
  while (sent < payload.size()) {
    const ssize_t n = ::write(to_child_, payload.data() + sent, payload.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProcessExit("external model process closed its input");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string ChildProcess::read_line(double timeout_seconds) {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds);
  for (;;) {
    const std::size_t eol = buffer_.find('\n');
    if (eol != std::string::npos) {
      std::string line = buffer_.substr(0, eol);
      buffer_.erase(0, eol + 1);
      return line;
    }

    const auto remaining = deadline - std::chrono::steady_clock::now();
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count();
    if (ms <= 0) throw TimeoutError("external model batch timed out");

    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(ms, 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProcessExit("poll on external model pipe failed");
    }
    if (rc == 0) continue;

    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProcessExit("read from external model pipe failed");
    }
    if (n == 0) throw ProcessExit("external model process exited");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace ouq
