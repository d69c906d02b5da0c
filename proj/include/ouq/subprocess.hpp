#ifndef OUQ_SUBPROCESS_HPP
#define OUQ_SUBPROCESS_HPP

#include <string>

namespace ouq {

// Line-oriented child process: one request line in, one response line out.
// The child is spawned through /bin/sh and killed on destruction.
class ChildProcess {
 public:
  ChildProcess(const std::string& command, const std::string& working_directory);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  void write_line(const std::string& line);
  // Blocks until a full line arrives; throws TimeoutError after
  // `timeout_seconds` and ProcessExit on EOF.
  std::string read_line(double timeout_seconds);

 private:
  void terminate() noexcept;

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace ouq

#endif
