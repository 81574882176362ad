#pragma once

#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

#include "tableqa/qa.hpp"
#include "tableqa/structure.hpp"

namespace tableqa {

// How recoverable per-question failures are handled: pipeline mode degrades
// to answer "0" with a warning, strict mode surfaces the error.
enum class ErrorMode { pipeline, strict };

// Client for an out-of-process answerer speaking newline-delimited JSON over
// its standard input/output. One request line:
//   {"id": ..., "question": ..., "table": {...}, "linearized": ...}
// yields one response line {"id": ..., "answer": ...}, in order. The child
// is expected to exit once its input closes.
//
// Not thread-safe: one in-flight request per instance. Spawning a client
// ignores SIGPIPE process-wide so a dead child surfaces as an error return
// instead of a signal.
class ExternalAnswerer {
 public:
  // Spawns `command` via /bin/sh -c. Throws Error(errc::external_unavailable)
  // if the child cannot be started.
  explicit ExternalAnswerer(std::string command);
  ~ExternalAnswerer();

  ExternalAnswerer(const ExternalAnswerer&) = delete;
  ExternalAnswerer& operator=(const ExternalAnswerer&) = delete;

  // Sends one request and reads one response. Throws
  // Error(errc::external_unavailable) on pipe failure or child exit, and
  // Error(errc::protocol_violation) on a non-JSON response, an id mismatch,
  // or a non-string answer field. An empty or missing answer becomes "0".
  AnswerRecord ask(const StructuredTable& table, const QuestionRecord& question);

  const std::string& command() const { return command_; }

 private:
  std::string read_line();
  void shutdown() noexcept;

  std::string command_;
  pid_t pid_ = -1;
  int to_child_ = -1;    // our write end of the child's stdin
  int from_child_ = -1;  // our read end of the child's stdout
  std::string buffer_;   // bytes read past the last returned line
};

// One-shot wrapper applying the error-mode policy: strict rethrows transport
// and protocol errors, pipeline degrades them to answer "0" with a warning.
AnswerRecord answer_external(const StructuredTable& table, const QuestionRecord& question,
                             ExternalAnswerer& endpoint, ErrorMode mode = ErrorMode::strict,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace tableqa
