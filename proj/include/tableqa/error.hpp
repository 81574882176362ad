#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tableqa {

enum class errc {
  malformed_html,
  empty_grid,
  empty_table,
  empty_ground_truth,
  non_numeric_ground_truth,
  duplicate_question_id,
  external_unavailable,
  protocol_violation,
  invalid_schema,
  pipeline_error,
  io_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

// Appends to the sink when one is supplied; warnings are never fatal.
inline void warn(std::vector<std::string>* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace tableqa
