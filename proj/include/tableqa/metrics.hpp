#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tableqa/qa.hpp"

namespace tableqa {

// Similarity threshold below which NLS snaps to 0, per the DocVQA convention.
inline constexpr double kNlsThreshold = 0.5;

// Unit-cost edit distance over Unicode scalar values.
int levenshtein(std::string_view a, std::string_view b);

// 1 - d/max(len), with no case folding or threshold. Used for fuzzy lookup.
double normalized_similarity(std::string_view a, std::string_view b);

// Normalized Levenshtein similarity after lowercasing and trimming both
// sides: 1 - NL when NL < threshold, else 0. Both empty compare as 1.
double nls(std::string_view pred, std::string_view gt);

// Max of nls over the acceptable answers. Throws
// Error(errc::empty_ground_truth) when gts is empty.
double anls_score(std::string_view pred, const std::vector<std::string>& gts);

enum class ScoreBranch { TextANLS, NumericCombined };

struct ScoreBreakdown {
  std::string question_id;
  double score = 0;  // in [0, 1]
  ScoreBranch branch = ScoreBranch::TextANLS;
  double anls_component = 0;
  std::optional<double> relative_error;  // present iff NumericCombined
};

// Combined numeric score: sqrt((anls^2 + (1 - rel)^2) / 2) where rel is the
// capped relative error against the ground truth and anls compares the
// canonical renderings of the two values as strings.
// Throws Error(errc::non_numeric_ground_truth) when gt does not parse.
ScoreBreakdown numeric_score(std::string_view pred, std::string_view gt);

struct CategoryStats {
  int count = 0;
  double mean = 0;
};

struct EvalReport {
  std::map<int, CategoryStats> per_category;
  double overall = 0;  // unweighted mean over questions
  int n_questions = 0;
  std::vector<ScoreBreakdown> per_question;  // ground-truth order
};

// Scores every ground-truth question: the numeric branch for Numeric answer
// types, ANLS for Text. Missing predictions score as answer "0". Predictions
// for unknown question ids are ignored with a warning.
// Throws Error(errc::duplicate_question_id) on repeated gt ids.
EvalReport evaluate(const std::vector<AnswerRecord>& preds, const std::vector<QuestionRecord>& gts,
                    std::vector<std::string>* warnings = nullptr);

nlohmann::ordered_json report_to_json(const EvalReport& report);

// Per-question breakdown: question_id,branch,score,anls_component,relative_error.
std::string report_to_csv(const EvalReport& report);

}  // namespace tableqa
