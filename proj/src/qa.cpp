#include "tableqa/qa.hpp"

#include <algorithm>
#include <istream>
#include <set>

#include "tableqa/error.hpp"
#include "tableqa/metrics.hpp"
#include "tableqa/numeric.hpp"
#include "tableqa/text.hpp"

namespace tableqa {

namespace {

std::string escape_pipes(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '|', '/');
  return out;
}

}  // namespace

LinearizedTable linearize(const StructuredTable& table) {
  if (table.columns.empty()) raise(errc::empty_table, "cannot linearize a table with no columns");
  std::string text = "col :";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    text += c == 0 ? " " : " | ";
    text += escape_pipes(table.columns[c]);
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    text += " row " + std::to_string(r + 1) + " :";
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      text += c == 0 ? " " : " | ";
      text += escape_pipes(table.rows[r][c]);
    }
  }
  LinearizedTable out;
  out.text = std::move(text);
  out.cell_count = static_cast<int>(table.rows.size() * table.columns.size());
  return out;
}

AnswerRecord answer_zero(const QuestionRecord& question) { return {question.question_id, "0"}; }

namespace {

bool is_year_token(const std::string& token) {
  if (token.size() != 4) return false;
  for (char c : token) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Spans between matching single or double quotes, whitespace-normalized.
std::vector<std::string> quoted_phrases(std::string_view text) {
  std::vector<std::string> phrases;
  for (char quote : {'"', '\''}) {
    std::size_t pos = 0;
    while (true) {
      std::size_t open = text.find(quote, pos);
      if (open == std::string_view::npos) break;
      std::size_t close = text.find(quote, open + 1);
      if (close == std::string_view::npos) break;
      std::string phrase = to_lower_ascii(normalize_whitespace(text.substr(open + 1, close - open - 1)));
      if (!phrase.empty()) phrases.push_back(std::move(phrase));
      pos = close + 1;
    }
  }
  return phrases;
}

enum class Aggregation { None, Sum, Mean, Difference, Minimum, Maximum, Ratio };

Aggregation detect_aggregation(const std::vector<std::string>& tokens) {
  std::set<std::string> set(tokens.begin(), tokens.end());
  if (set.count("total") || set.count("sum")) return Aggregation::Sum;
  if (set.count("average") || set.count("mean")) return Aggregation::Mean;
  if (set.count("difference")) return Aggregation::Difference;
  if (set.count("minimum")) return Aggregation::Minimum;
  if (set.count("maximum")) return Aggregation::Maximum;
  if (set.count("ratio")) return Aggregation::Ratio;
  return Aggregation::None;
}

bool is_aggregation_keyword(const std::string& token) {
  return token == "total" || token == "sum" || token == "average" || token == "mean" ||
         token == "difference" || token == "minimum" || token == "maximum" || token == "ratio";
}

// Mean over label tokens of their best similarity against the remaining
// question tokens. 0 when either side is empty.
double row_label_score(const std::string& label, const std::vector<std::string>& remaining) {
  std::vector<std::string> label_tokens = tokenize(label);
  if (label_tokens.empty() || remaining.empty()) return 0;
  double sum = 0;
  for (const auto& lt : label_tokens) {
    double best = 0;
    for (const auto& rt : remaining) best = std::max(best, normalized_similarity(lt, rt));
    sum += best;
  }
  return sum / static_cast<double>(label_tokens.size());
}

std::string finalize_answer(const std::string& cell_text) {
  if (auto value = normalize_numeric(cell_text)) return render_numeric(*value);
  std::string text = trim(cell_text);
  return text.empty() ? "0" : text;
}

}  // namespace

AnswerRecord answer_lookup(const StructuredTable& table, const QuestionRecord& question,
                           const LookupOptions& options) {
  AnswerRecord zero{question.question_id, "0"};
  if (table.columns.empty() || table.rows.empty()) return zero;

  std::vector<std::string> tokens = tokenize(question.text);
  std::vector<std::string> phrases = quoted_phrases(question.text);

  std::vector<std::string> keys;
  std::set<std::string> key_tokens;  // removed from the row-match content
  for (const auto& t : tokens) {
    if (is_year_token(t)) {
      keys.push_back(t);
      key_tokens.insert(t);
    }
  }
  for (const auto& phrase : phrases) {
    keys.push_back(phrase);
    for (const auto& t : tokenize(phrase)) key_tokens.insert(t);
  }

  // Column: best normalized-Levenshtein similarity against the extracted
  // keys, against all question tokens when nothing was extracted. Leftmost
  // wins ties.
  const std::vector<std::string>& column_keys = keys.empty() ? tokens : keys;
  std::size_t best_col = 0;
  double best_col_score = -1;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    std::string name = to_lower_ascii(trim(table.columns[c]));
    double score = 0;
    for (const auto& key : column_keys) score = std::max(score, normalized_similarity(name, key));
    if (score > best_col_score) {
      best_col_score = score;
      best_col = c;
    }
  }

  std::vector<std::string> remaining;
  for (const auto& t : tokens) {
    if (key_tokens.count(t) || is_aggregation_keyword(t)) continue;
    remaining.push_back(t);
  }

  std::vector<double> row_scores(table.rows.size(), 0);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    row_scores[r] = row_label_score(table.rows[r][0], remaining);
  }
  std::size_t best_row = 0;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    if (row_scores[r] > row_scores[best_row]) best_row = r;  // ties keep the topmost
  }

  Aggregation agg = detect_aggregation(tokens);
  if (agg == Aggregation::Sum || agg == Aggregation::Mean || agg == Aggregation::Minimum ||
      agg == Aggregation::Maximum) {
    std::vector<double> values;
    for (const auto& row : table.rows) {
      if (auto v = normalize_numeric(row[best_col])) values.push_back(*v);
    }
    if (values.empty()) return zero;
    double result = 0;
    switch (agg) {
      case Aggregation::Sum:
        for (double v : values) result += v;
        break;
      case Aggregation::Mean:
        for (double v : values) result += v;
        result /= static_cast<double>(values.size());
        break;
      case Aggregation::Minimum:
        result = *std::min_element(values.begin(), values.end());
        break;
      default:
        result = *std::max_element(values.begin(), values.end());
        break;
    }
    return {question.question_id, render_numeric(result)};
  }

  if (agg == Aggregation::Difference || agg == Aggregation::Ratio) {
    if (table.rows.size() < 2 || row_scores[best_row] < options.row_similarity_floor) return zero;
    std::size_t second_row = best_row == 0 ? 1 : 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (r == best_row) continue;
      if (row_scores[r] > row_scores[second_row]) second_row = r;
    }
    auto a = normalize_numeric(table.rows[best_row][best_col]);
    auto b = normalize_numeric(table.rows[second_row][best_col]);
    if (!a || !b) return zero;
    if (agg == Aggregation::Ratio) {
      if (*b == 0) return zero;
      return {question.question_id, render_numeric(*a / *b)};
    }
    return {question.question_id, render_numeric(*a - *b)};
  }

  if (row_scores[best_row] < options.row_similarity_floor) return zero;
  return {question.question_id, finalize_answer(table.rows[best_row][best_col])};
}

QuestionRecord question_from_eval1(const nlohmann::json& record) {
  QuestionRecord q;
  try {
    q.question_id = record.at("question_id").get<std::string>();
    q.text = record.value("text", "");
    q.category = record.value("category", 1);
    std::string type = to_lower_ascii(record.value("answer_type", "text"));
    if (type == "numeric") {
      q.answer_type = AnswerType::Numeric;
    } else if (type == "text") {
      q.answer_type = AnswerType::Text;
    } else {
      raise(errc::invalid_schema, "answer_type must be \"numeric\" or \"text\"");
    }
    if (record.contains("answers")) {
      q.ground_truth = record.at("answers").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    raise(errc::invalid_schema, std::string("malformed question record: ") + e.what());
  }
  if (q.category < 1 || q.category > 5) {
    raise(errc::invalid_schema, "category must be in 1..5 for question " + q.question_id);
  }
  return q;
}

std::vector<DocQuestion> load_questions_jsonl(std::istream& in, const QuestionAdapter& adapter) {
  const QuestionAdapter& parse = adapter ? adapter : QuestionAdapter(question_from_eval1);
  std::vector<DocQuestion> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      raise(errc::invalid_schema, "line " + std::to_string(line_no) + " is not valid JSON");
    }
    DocQuestion dq;
    dq.doc_id = record.value("doc_id", "");
    dq.question = parse(record);
    out.push_back(std::move(dq));
  }
  return out;
}

std::string predictions_to_jsonl(const std::vector<AnswerRecord>& answers) {
  std::string out;
  for (const auto& answer : answers) {
    nlohmann::ordered_json record;
    record["question_id"] = answer.question_id;
    record["answer"] = answer.answer;
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<AnswerRecord> load_predictions_jsonl(std::istream& in) {
  std::vector<AnswerRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.contains("question_id")) {
      raise(errc::invalid_schema, "prediction line " + std::to_string(line_no) + " is malformed");
    }
    out.push_back({record.at("question_id").get<std::string>(), record.value("answer", "0")});
  }
  return out;
}

}  // namespace tableqa
