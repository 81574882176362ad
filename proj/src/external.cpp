#include "tableqa/external.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "tableqa/error.hpp"

namespace tableqa {

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void close_quiet(int& fd) noexcept {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

bool write_all(int fd, const char* data, size_t len) {
  while (len > 0) {
    ssize_t n = ::write(fd, data, len);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += n;
    len -= static_cast<size_t>(n);
  }
  return true;
}

}  // namespace

ExternalAnswerer::ExternalAnswerer(std::string command) : command_(std::move(command)) {
  ignore_sigpipe_once();

  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe(in_pipe) != 0) raise(errc::external_unavailable, "external: pipe: " + std::string(std::strerror(errno)));
  if (::pipe(out_pipe) != 0) {
    int saved = errno;
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    raise(errc::external_unavailable, "external: pipe: " + std::string(std::strerror(saved)));
  }

  pid_ = ::fork();
  if (pid_ < 0) {
    int saved = errno;
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    raise(errc::external_unavailable, "external: fork: " + std::string(std::strerror(saved)));
  }

  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::signal(SIGPIPE, SIG_DFL);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalAnswerer::~ExternalAnswerer() { shutdown(); }

void ExternalAnswerer::shutdown() noexcept {
  close_quiet(to_child_);
  close_quiet(from_child_);
  if (pid_ <= 0) return;

  // The protocol asks the child to exit on closed input; give it a grace
  // period before forcing the issue so a wedged child cannot hang us.
  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  for (;;) {
    int status = 0;
    pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_ || (r < 0 && errno != EINTR)) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  pid_ = -1;
}

std::string ExternalAnswerer::read_line() {
  for (;;) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      raise(errc::external_unavailable, "external: read: " + std::string(std::strerror(errno)));
    }
    if (n == 0) raise(errc::external_unavailable, "external: child closed its output");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

AnswerRecord ExternalAnswerer::ask(const StructuredTable& table, const QuestionRecord& question) {
  if (pid_ <= 0 || to_child_ < 0 || from_child_ < 0)
    raise(errc::external_unavailable, "external: no child process");

  nlohmann::ordered_json request;
  request["id"] = question.question_id;
  request["question"] = question.text;
  request["table"] = table_to_json(table);
  request["linearized"] = linearize(table).text;
  std::string line = request.dump();
  line.push_back('\n');

  if (!write_all(to_child_, line.data(), line.size()))
    raise(errc::external_unavailable, "external: write: " + std::string(std::strerror(errno)));

  std::string response = read_line();
  nlohmann::json parsed = nlohmann::json::parse(response, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    raise(errc::protocol_violation, "external: response is not a JSON object: " + response);
  if (!parsed.contains("id") || !parsed["id"].is_string() ||
      parsed["id"].get<std::string>() != question.question_id)
    raise(errc::protocol_violation, "external: response id does not match request id '" + question.question_id + "'");

  AnswerRecord out;
  out.question_id = question.question_id;
  if (!parsed.contains("answer") || parsed["answer"].is_null()) {
    out.answer = "0";
  } else if (!parsed["answer"].is_string()) {
    raise(errc::protocol_violation, "external: answer field is not a string");
  } else {
    out.answer = parsed["answer"].get<std::string>();
    if (out.answer.empty()) out.answer = "0";
  }
  return out;
}

AnswerRecord answer_external(const StructuredTable& table, const QuestionRecord& question,
                             ExternalAnswerer& endpoint, ErrorMode mode, std::vector<std::string>* warnings) {
  try {
    return endpoint.ask(table, question);
  } catch (const Error& e) {
    if (mode == ErrorMode::strict ||
        (e.code() != errc::external_unavailable && e.code() != errc::protocol_violation))
      throw;
    warn(warnings, std::string("external answerer degraded to \"0\" for question '") + question.question_id +
                       "': " + e.what());
    return AnswerRecord{question.question_id, "0"};
  }
}

}  // namespace tableqa
