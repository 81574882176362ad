#include "tableqa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "tableqa/error.hpp"
#include "tableqa/grid.hpp"
#include "tableqa/html_parse.hpp"
#include "tableqa/text.hpp"

namespace tableqa {

namespace {

struct DocWork {
  std::vector<size_t> question_indices;  // into the questions vector
};

void render_answers(const StructuredTable& table, const std::vector<DocQuestion>& questions,
                    const std::vector<size_t>& indices, const PipelineConfig& config,
                    std::unique_ptr<ExternalAnswerer>& endpoint, std::vector<AnswerRecord>& results,
                    std::vector<std::string>& doc_warnings) {
  // Part of the per-document chain even though only the external answerer
  // consumes it: a table that cannot be linearized fails the document.
  linearize(table);

  for (size_t qi : indices) {
    const QuestionRecord& q = questions[qi].question;
    switch (config.answerer) {
      case AnswererKind::zero:
        results[qi] = answer_zero(q);
        break;
      case AnswererKind::lookup:
        results[qi] = answer_lookup(table, q, config.lookup);
        break;
      case AnswererKind::external:
        if (!endpoint) endpoint = std::make_unique<ExternalAnswerer>(config.external_cmd);
        results[qi] = answer_external(table, q, *endpoint, config.mode, &doc_warnings);
        break;
    }
  }
}

}  // namespace

std::vector<AnswerRecord> run_pipeline(const std::vector<std::pair<std::string, std::string>>& docs,
                                       const std::vector<DocQuestion>& questions, const PipelineConfig& config,
                                       std::vector<std::string>* warnings) {
  if (config.answerer == AnswererKind::external && config.external_cmd.empty())
    raise(errc::pipeline_error, "run_pipeline: external answerer requires a command");

  std::unordered_map<std::string, size_t> doc_index;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (!doc_index.emplace(docs[i].first, i).second)
      warn(warnings, "run_pipeline: duplicate doc_id '" + docs[i].first + "', questions bind to the first copy");
  }

  std::vector<AnswerRecord> results(questions.size());
  std::vector<DocWork> work(docs.size());
  for (size_t qi = 0; qi < questions.size(); ++qi) {
    auto it = doc_index.find(questions[qi].doc_id);
    if (it == doc_index.end()) {
      if (config.mode == ErrorMode::strict)
        raise(errc::pipeline_error,
              "run_pipeline: question '" + questions[qi].question.question_id + "' references unknown doc_id '" +
                  questions[qi].doc_id + "'");
      warn(warnings, "run_pipeline: question '" + questions[qi].question.question_id +
                         "' references unknown doc_id '" + questions[qi].doc_id + "', answering \"0\"");
      results[qi] = AnswerRecord{questions[qi].question.question_id, "0"};
      continue;
    }
    work[it->second].question_indices.push_back(qi);
  }

  std::vector<std::vector<std::string>> doc_warnings(docs.size());
  std::vector<std::exception_ptr> doc_errors(docs.size());
  std::atomic<size_t> next_doc{0};

  auto process_doc = [&](size_t di, std::unique_ptr<ExternalAnswerer>& endpoint) {
    const std::vector<size_t>& indices = work[di].question_indices;
    if (indices.empty()) return;
    const std::string& doc_id = docs[di].first;
    const std::string& html = docs[di].second;

    if (detect_blank(html)) {
      for (size_t qi : indices) results[qi] = AnswerRecord{questions[qi].question.question_id, "0"};
      return;
    }

    try {
      RawTable raw = parse_table_html(html, &doc_warnings[di]);
      Grid grid = normalize_grid(raw, &doc_warnings[di]);
      StructuredTable table = build_structured(grid, config.hierarchy);
      render_answers(table, questions, indices, config, endpoint, results, doc_warnings[di]);
    } catch (...) {
      if (config.mode == ErrorMode::strict) {
        doc_errors[di] = std::current_exception();
        return;
      }
      try {
        throw;
      } catch (const std::exception& e) {
        doc_warnings[di].push_back("run_pipeline: document '" + doc_id + "' failed (" + e.what() +
                                   "), answering \"0\"");
      }
      for (size_t qi : indices) results[qi] = AnswerRecord{questions[qi].question.question_id, "0"};
    }
  };

  auto worker = [&] {
    std::unique_ptr<ExternalAnswerer> endpoint;  // one connection per worker
    for (;;) {
      size_t di = next_doc.fetch_add(1);
      if (di >= docs.size()) break;
      process_doc(di, endpoint);
    }
  };

  int n_workers = std::max(1, config.workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (size_t di = 0; di < docs.size(); ++di)
    if (doc_errors[di]) std::rethrow_exception(doc_errors[di]);

  if (warnings)
    for (std::vector<std::string>& dw : doc_warnings)
      for (std::string& w : dw) warnings->push_back(std::move(w));

  return results;
}

namespace {

ValueStats stats_over(const std::vector<double>& values) {
  ValueStats s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

}  // namespace

StatsReport compute_stats(const std::vector<std::pair<std::string, std::string>>& docs,
                          const std::vector<DocQuestion>* questions, std::vector<std::string>* warnings) {
  StatsReport report;
  report.n_documents = static_cast<int>(docs.size());

  std::vector<double> rows, columns, cell_lengths;
  for (const auto& [doc_id, html] : docs) {
    if (detect_blank(html)) {
      ++report.n_blank;
      continue;
    }
    try {
      RawTable raw = parse_table_html(html, warnings);
      Grid grid = normalize_grid(raw, warnings);
      rows.push_back(grid.n_rows);
      columns.push_back(grid.n_cols);
      size_t n = 0, total = 0;
      for (const Cell& cell : grid.cells) {
        if (cell.synthetic) continue;
        ++n;
        total += codepoint_length(cell.text);
      }
      cell_lengths.push_back(n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n));
      ++report.n_tables;
    } catch (const std::exception& e) {
      ++report.n_blank;
      warn(warnings, "compute_stats: document '" + doc_id + "' counted as blank (" + e.what() + ")");
    }
  }

  report.rows = stats_over(rows);
  report.columns = stats_over(columns);
  report.cell_length = stats_over(cell_lengths);

  if (questions) {
    report.has_questions = true;
    for (const DocQuestion& dq : *questions) ++report.questions_per_category[dq.question.category];
  }
  return report;
}

namespace {

nlohmann::ordered_json value_stats_json(const ValueStats& s) {
  nlohmann::ordered_json j;
  j["min"] = s.min;
  j["max"] = s.max;
  j["mean"] = s.mean;
  return j;
}

}  // namespace

nlohmann::ordered_json stats_to_json(const StatsReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = "stats/1";
  j["n_documents"] = report.n_documents;
  j["n_blank"] = report.n_blank;
  j["n_tables"] = report.n_tables;
  j["rows"] = value_stats_json(report.rows);
  j["columns"] = value_stats_json(report.columns);
  j["cell_length"] = value_stats_json(report.cell_length);
  if (report.has_questions) {
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [cat, count] : report.questions_per_category) hist[std::to_string(cat)] = count;
    j["questions_per_category"] = std::move(hist);
  } else {
    j["questions_per_category"] = nullptr;
  }
  return j;
}

std::vector<std::pair<std::string, std::string>> load_docs_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) raise(errc::io_error, "load_docs_dir: not a directory: " + dir);

  std::vector<fs::path> paths;
  for (fs::directory_iterator it(dir, ec), end; it != end && !ec; it.increment(ec)) {
    const fs::path& p = it->path();
    if (it->is_regular_file(ec) && p.extension() == ".html") paths.push_back(p);
  }
  if (ec) raise(errc::io_error, "load_docs_dir: cannot read directory " + dir + ": " + ec.message());
  std::sort(paths.begin(), paths.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  std::vector<std::pair<std::string, std::string>> docs;
  docs.reserve(paths.size());
  for (const fs::path& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) raise(errc::io_error, "load_docs_dir: cannot open " + p.string());
    std::ostringstream body;
    body << in.rdbuf();
    if (in.bad()) raise(errc::io_error, "load_docs_dir: cannot read " + p.string());
    docs.emplace_back(p.stem().string(), body.str());
  }
  return docs;
}

}  // namespace tableqa
