#include "tableqa/error.hpp"

namespace tableqa {

const char* errc_name(errc code) {
  switch (code) {
    case errc::malformed_html: return "malformed_html";
    case errc::empty_grid: return "empty_grid";
    case errc::empty_table: return "empty_table";
    case errc::empty_ground_truth: return "empty_ground_truth";
    case errc::non_numeric_ground_truth: return "non_numeric_ground_truth";
    case errc::duplicate_question_id: return "duplicate_question_id";
    case errc::external_unavailable: return "external_unavailable";
    case errc::protocol_violation: return "protocol_violation";
    case errc::invalid_schema: return "invalid_schema";
    case errc::pipeline_error: return "pipeline_error";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace tableqa
