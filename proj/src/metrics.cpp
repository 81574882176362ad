#include "tableqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tableqa/error.hpp"
#include "tableqa/numeric.hpp"
#include "tableqa/text.hpp"

namespace tableqa {

int levenshtein(std::string_view a, std::string_view b) {
  std::vector<char32_t> ca = utf8_codepoints(a);
  std::vector<char32_t> cb = utf8_codepoints(b);
  if (ca.size() < cb.size()) std::swap(ca, cb);
  const size_t n = cb.size();
  if (n == 0) return static_cast<int>(ca.size());

  std::vector<int> prev(n + 1), cur(n + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (size_t i = 1; i <= ca.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= n; ++j) {
      int sub = prev[j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

double normalized_similarity(std::string_view a, std::string_view b) {
  size_t la = codepoint_length(a);
  size_t lb = codepoint_length(b);
  size_t m = std::max(la, lb);
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

double nls(std::string_view pred, std::string_view gt) {
  std::string p = to_lower_ascii(trim(pred));
  std::string g = to_lower_ascii(trim(gt));
  size_t m = std::max(codepoint_length(p), codepoint_length(g));
  double nl = m == 0 ? 0.0 : static_cast<double>(levenshtein(p, g)) / static_cast<double>(m);
  return nl < kNlsThreshold ? 1.0 - nl : 0.0;
}

double anls_score(std::string_view pred, const std::vector<std::string>& gts) {
  if (gts.empty()) raise(errc::empty_ground_truth, "anls_score: no ground-truth answers");
  double best = 0.0;
  for (const std::string& gt : gts) best = std::max(best, nls(pred, gt));
  return best;
}

ScoreBreakdown numeric_score(std::string_view pred, std::string_view gt) {
  std::optional<double> gv = normalize_numeric(gt);
  if (!gv) raise(errc::non_numeric_ground_truth, "numeric_score: ground truth does not parse as a number");

  ScoreBreakdown out;
  out.branch = ScoreBranch::NumericCombined;
  std::string gcanon = render_numeric(*gv);

  std::optional<double> pv = normalize_numeric(pred);
  double rel = 1.0;
  double a = 0.0;
  if (pv) {
    std::string pcanon = render_numeric(*pv);
    a = nls(pcanon, gcanon);
    rel = std::min(1.0, std::fabs(*pv - *gv) / std::max(std::fabs(*gv), kNumericEpsilon));
  } else {
    a = nls(pred, gcanon);
  }
  out.anls_component = a;
  out.relative_error = rel;
  out.score = std::sqrt((a * a + (1.0 - rel) * (1.0 - rel)) / 2.0);
  return out;
}

EvalReport evaluate(const std::vector<AnswerRecord>& preds, const std::vector<QuestionRecord>& gts,
                    std::vector<std::string>* warnings) {
  std::set<std::string> gt_ids;
  for (const QuestionRecord& q : gts) {
    if (!gt_ids.insert(q.question_id).second)
      raise(errc::duplicate_question_id, "evaluate: duplicate question id '" + q.question_id + "'");
  }

  std::unordered_map<std::string, std::string> by_id;
  for (const AnswerRecord& p : preds) {
    if (!gt_ids.count(p.question_id)) {
      warn(warnings, "evaluate: prediction for unknown question id '" + p.question_id + "' ignored");
      continue;
    }
    auto [it, inserted] = by_id.emplace(p.question_id, p.answer);
    if (!inserted) {
      warn(warnings, "evaluate: duplicate prediction for question id '" + p.question_id + "', keeping the last");
      it->second = p.answer;
    }
  }

  EvalReport report;
  report.n_questions = static_cast<int>(gts.size());
  report.per_question.reserve(gts.size());

  std::map<int, std::pair<int, double>> cat_acc;  // category -> (count, sum)
  double total = 0.0;

  for (const QuestionRecord& q : gts) {
    std::string answer = "0";
    auto it = by_id.find(q.question_id);
    if (it != by_id.end()) {
      answer = it->second;
    } else {
      warn(warnings, "evaluate: no prediction for question id '" + q.question_id + "', scoring answer \"0\"");
    }

    ScoreBreakdown sb;
    sb.question_id = q.question_id;
    if (q.answer_type == AnswerType::Numeric) {
      // Score against every parseable ground truth and keep the best.
      bool any = false;
      ScoreBreakdown best;
      for (const std::string& gt : q.ground_truth) {
        if (!normalize_numeric(gt)) continue;
        ScoreBreakdown cand = numeric_score(answer, gt);
        if (!any || cand.score > best.score) best = cand;
        any = true;
      }
      if (!any)
        raise(errc::non_numeric_ground_truth,
              "evaluate: question '" + q.question_id + "' is numeric but no ground truth parses as a number");
      sb.branch = best.branch;
      sb.score = best.score;
      sb.anls_component = best.anls_component;
      sb.relative_error = best.relative_error;
    } else {
      sb.branch = ScoreBranch::TextANLS;
      sb.score = anls_score(answer, q.ground_truth);
      sb.anls_component = sb.score;
    }

    auto& acc = cat_acc[q.category];
    acc.first += 1;
    acc.second += sb.score;
    total += sb.score;
    report.per_question.push_back(std::move(sb));
  }

  for (const auto& [cat, acc] : cat_acc)
    report.per_category[cat] = CategoryStats{acc.first, acc.second / acc.first};
  report.overall = gts.empty() ? 0.0 : total / static_cast<double>(gts.size());
  return report;
}

namespace {

const char* branch_name(ScoreBranch b) {
  return b == ScoreBranch::TextANLS ? "text_anls" : "numeric_combined";
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = "report/1";
  j["overall"] = report.overall;
  j["n_questions"] = report.n_questions;
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (const auto& [cat, stats] : report.per_category) {
    nlohmann::ordered_json c;
    c["count"] = stats.count;
    c["mean"] = stats.mean;
    cats[std::to_string(cat)] = std::move(c);
  }
  j["per_category"] = std::move(cats);
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const ScoreBreakdown& sb : report.per_question) {
    nlohmann::ordered_json q;
    q["question_id"] = sb.question_id;
    q["branch"] = branch_name(sb.branch);
    q["score"] = sb.score;
    q["anls_component"] = sb.anls_component;
    if (sb.relative_error)
      q["relative_error"] = *sb.relative_error;
    else
      q["relative_error"] = nullptr;
    per.push_back(std::move(q));
  }
  j["per_question"] = std::move(per);
  return j;
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "question_id,branch,score,anls_component,relative_error\r\n";
  for (const ScoreBreakdown& sb : report.per_question) {
    out << csv_field(sb.question_id) << ',' << branch_name(sb.branch) << ',' << render_numeric(sb.score) << ','
        << render_numeric(sb.anls_component) << ',';
    if (sb.relative_error) out << render_numeric(*sb.relative_error);
    out << "\r\n";
  }
  return out.str();
}

}  // namespace tableqa
