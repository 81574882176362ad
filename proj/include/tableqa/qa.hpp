#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tableqa/structure.hpp"

namespace tableqa {

enum class AnswerType { Numeric, Text };

struct QuestionRecord {
  std::string question_id;
  std::string text;
  int category = 1;  // 1..5
  AnswerType answer_type = AnswerType::Text;
  std::vector<std::string> ground_truth;  // evaluation only
};

struct AnswerRecord {
  std::string question_id;
  // Never absent: the no-answer case is materialized as "0".
  std::string answer;
};

struct LinearizedTable {
  std::string text;
  int cell_count = 0;  // data cells encoded: rows * columns
};

// "col : c1 | c2 | ... row 1 : v11 | v12 | ..." — header first, then rows
// top-to-bottom, cells left-to-right. Pipes inside cell text become "/".
// Throws Error(errc::empty_table) when the table has no columns.
LinearizedTable linearize(const StructuredTable& table);

AnswerRecord answer_zero(const QuestionRecord& question);

struct LookupOptions {
  // Best row-label similarity below this floor falls back to "0".
  double row_similarity_floor = 0.3;
};

// Deterministic rule-based answerer: picks the column by year/phrase
// similarity, the row by first-column similarity to the remaining question
// text, and applies sum/mean/difference/min/max/ratio aggregation keywords
// over the column's numeric values.
AnswerRecord answer_lookup(const StructuredTable& table, const QuestionRecord& question,
                           const LookupOptions& options = {});

// ---- file schemas ----

// Hook for alternative dataset layouts; the default reads "eval/1" records.
using QuestionAdapter = std::function<QuestionRecord(const nlohmann::json&)>;

// {"question_id", "text", "category", "answer_type", "answers"}.
// ground_truth ("answers") may be absent when the record is only answered,
// never evaluated.
QuestionRecord question_from_eval1(const nlohmann::json& record);

struct DocQuestion {
  std::string doc_id;  // empty when the layout carries none
  QuestionRecord question;
};

std::vector<DocQuestion> load_questions_jsonl(std::istream& in, const QuestionAdapter& adapter = {});

std::string predictions_to_jsonl(const std::vector<AnswerRecord>& answers);
std::vector<AnswerRecord> load_predictions_jsonl(std::istream& in);

}  // namespace tableqa
