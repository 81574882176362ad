#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tableqa/error.hpp"
#include "tableqa/external.hpp"
#include "tableqa/grid.hpp"
#include "tableqa/html_parse.hpp"
#include "tableqa/metrics.hpp"
#include "tableqa/pipeline.hpp"
#include "tableqa/qa.hpp"
#include "tableqa/structure.hpp"

namespace {

using tableqa::errc;
using tableqa::raise;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  std::ostringstream body;
  body << in.rdbuf();
  if (in.bad()) raise(errc::io_error, "cannot read " + path);
  return body.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::io_error, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) raise(errc::io_error, "cannot write " + path);
}

nlohmann::json read_json_file(const std::string& path) {
  nlohmann::json doc = nlohmann::json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) raise(errc::invalid_schema, path + " is not valid JSON");
  return doc;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<tableqa::DocQuestion> read_questions_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  return tableqa::load_questions_jsonl(in);
}

struct HierarchyFlags {
  int algo = 1;
  double indent_threshold = 10.0;
  std::string separator = " - ";
  bool keep_label_rows = false;

  tableqa::HierarchyOptions to_options() const {
    tableqa::HierarchyOptions opts;
    opts.algorithm = algo == 2 ? tableqa::HierarchyAlgorithm::V2 : tableqa::HierarchyAlgorithm::V1;
    opts.indent_threshold = indent_threshold;
    opts.separator = separator;
    opts.drop_label_rows = !keep_label_rows;
    return opts;
  }
};

void add_hierarchy_flags(CLI::App* cmd, HierarchyFlags& flags) {
  cmd->add_option("--algo", flags.algo, "Flattening algorithm: 1 (text only) or 2 (bbox aware)")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  cmd->add_option("--indent-threshold", flags.indent_threshold,
                  "Minimum first-column x1 spread (pixels) treated as indentation")
      ->capture_default_str();
  cmd->add_option("--separator", flags.separator, "Separator between parent and child text")
      ->capture_default_str();
  cmd->add_flag("--keep-label-rows", flags.keep_label_rows, "Keep otherwise-empty hierarchy label rows");
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

int do_parse(const std::string& html_path, const std::string& out_path) {
  std::vector<std::string> warnings;
  tableqa::RawTable raw = tableqa::parse_table_html(read_file(html_path), &warnings);
  tableqa::Grid grid = tableqa::normalize_grid(raw, &warnings);
  print_warnings(warnings);
  write_file(out_path, dump_json(tableqa::grid_to_json(grid)));
  return 0;
}

int do_structure(const std::string& grid_path, const HierarchyFlags& flags, const std::string& out_path,
                 const std::string& csv_path) {
  tableqa::Grid grid = tableqa::grid_from_json(read_json_file(grid_path));
  tableqa::StructuredTable table = tableqa::build_structured(grid, flags.to_options());
  write_file(out_path, dump_json(tableqa::table_to_json(table)));
  if (!csv_path.empty()) write_file(csv_path, tableqa::table_to_csv(table));
  return 0;
}

int do_linearize(const std::string& table_path) {
  tableqa::StructuredTable table = tableqa::table_from_json(read_json_file(table_path));
  std::cout << tableqa::linearize(table).text << "\n";
  return 0;
}

int do_answer(const std::string& docs_dir, const std::string& questions_path, const std::string& answerer,
              const std::string& external_cmd, int workers, bool strict, const HierarchyFlags& flags,
              const std::string& out_path) {
  tableqa::PipelineConfig config;
  config.hierarchy = flags.to_options();
  if (answerer == "zero")
    config.answerer = tableqa::AnswererKind::zero;
  else if (answerer == "external")
    config.answerer = tableqa::AnswererKind::external;
  else
    config.answerer = tableqa::AnswererKind::lookup;
  config.external_cmd = external_cmd;
  config.mode = strict ? tableqa::ErrorMode::strict : tableqa::ErrorMode::pipeline;
  config.workers = workers;

  std::vector<std::string> warnings;
  auto docs = tableqa::load_docs_dir(docs_dir);
  auto questions = read_questions_file(questions_path);
  auto answers = tableqa::run_pipeline(docs, questions, config, &warnings);
  print_warnings(warnings);
  write_file(out_path, tableqa::predictions_to_jsonl(answers));
  return 0;
}

int do_eval(const std::string& pred_path, const std::string& gt_path, const std::string& out_path,
            const std::string& per_question_path) {
  std::ifstream pred_in(pred_path, std::ios::binary);
  if (!pred_in) raise(errc::io_error, "cannot open " + pred_path);
  auto preds = tableqa::load_predictions_jsonl(pred_in);

  std::vector<tableqa::QuestionRecord> gts;
  for (tableqa::DocQuestion& dq : read_questions_file(gt_path)) gts.push_back(std::move(dq.question));

  std::vector<std::string> warnings;
  tableqa::EvalReport report = tableqa::evaluate(preds, gts, &warnings);
  print_warnings(warnings);
  write_file(out_path, dump_json(tableqa::report_to_json(report)));
  if (!per_question_path.empty()) write_file(per_question_path, tableqa::report_to_csv(report));
  return 0;
}

int do_stats(const std::string& docs_dir, const std::string& questions_path, const std::string& out_path) {
  std::vector<std::string> warnings;
  auto docs = tableqa::load_docs_dir(docs_dir);
  std::vector<tableqa::DocQuestion> questions;
  bool has_questions = !questions_path.empty();
  if (has_questions) questions = read_questions_file(questions_path);
  tableqa::StatsReport report = tableqa::compute_stats(docs, has_questions ? &questions : nullptr, &warnings);
  print_warnings(warnings);
  write_file(out_path, dump_json(tableqa::stats_to_json(report)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Table question answering toolkit: parse recognized HTML tables, "
               "structure them, answer questions, and score predictions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from an INI/TOML file (flags win)");

  std::string html_path, grid_path, table_path, docs_dir, questions_path;
  std::string pred_path, gt_path, out_path, csv_path, per_question_path;
  std::string answerer = "lookup", external_cmd;
  int workers = 1;
  bool strict = false;
  HierarchyFlags structure_flags, answer_flags;

  CLI::App* parse_cmd = app.add_subcommand("parse", "Parse table HTML into a normalized grid JSON");
  parse_cmd->add_option("--html", html_path, "Input HTML file")->required();
  parse_cmd->add_option("--out", out_path, "Output grid JSON path")->required();

  CLI::App* structure_cmd = app.add_subcommand("structure", "Flatten a grid into a structured table JSON");
  structure_cmd->add_option("--grid", grid_path, "Input grid JSON (from parse)")->required();
  add_hierarchy_flags(structure_cmd, structure_flags);
  structure_cmd->add_option("--out", out_path, "Output table JSON path")->required();
  structure_cmd->add_option("--csv", csv_path, "Also write the table as CSV to this path");

  CLI::App* linearize_cmd = app.add_subcommand("linearize", "Print the QA linearization of a table JSON");
  linearize_cmd->add_option("--table", table_path, "Input table JSON (from structure)")->required();

  CLI::App* answer_cmd = app.add_subcommand("answer", "Answer questions against a directory of documents");
  answer_cmd->add_option("--docs", docs_dir, "Directory of <doc_id>.html files")->required();
  answer_cmd->add_option("--questions", questions_path, "Questions JSONL")->required();
  answer_cmd->add_option("--answerer", answerer, "Answerer to use")
      ->check(CLI::IsMember({"zero", "lookup", "external"}))
      ->capture_default_str();
  answer_cmd->add_option("--external-cmd", external_cmd, "Command for the external answerer (sh -c)");
  answer_cmd->add_option("--workers", workers, "Parallel document workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  answer_cmd->add_flag("--strict", strict, "Abort on the first document failure instead of degrading to \"0\"");
  add_hierarchy_flags(answer_cmd, answer_flags);
  answer_cmd->add_option("--out", out_path, "Output predictions JSONL path")->required();

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("--pred", pred_path, "Predictions JSONL")->required();
  eval_cmd->add_option("--gt", gt_path, "Ground-truth questions JSONL")->required();
  eval_cmd->add_option("--out", out_path, "Output report JSON path")->required();
  eval_cmd->add_option("--per-question", per_question_path, "Also write a per-question CSV to this path");

  CLI::App* stats_cmd = app.add_subcommand("stats", "Corpus statistics over a directory of documents");
  stats_cmd->add_option("--docs", docs_dir, "Directory of <doc_id>.html files")->required();
  stats_cmd->add_option("--questions", questions_path, "Questions JSONL for the category histogram");
  stats_cmd->add_option("--out", out_path, "Output stats JSON path")->required();

  try {
    app.parse(argc, argv);
    if (*answer_cmd && answerer == "external" && external_cmd.empty())
      throw CLI::ValidationError("--external-cmd", "required when --answerer external");
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*parse_cmd) return do_parse(html_path, out_path);
    if (*structure_cmd) return do_structure(grid_path, structure_flags, out_path, csv_path);
    if (*linearize_cmd) return do_linearize(table_path);
    if (*answer_cmd)
      return do_answer(docs_dir, questions_path, answerer, external_cmd, workers, strict, answer_flags, out_path);
    if (*eval_cmd) return do_eval(pred_path, gt_path, out_path, per_question_path);
    if (*stats_cmd) return do_stats(docs_dir, questions_path, out_path);
  } catch (const tableqa::Error& e) {
    std::cerr << "error: " << e.what() << " [" << tableqa::errc_name(e.code()) << "]\n";
    return e.code() == errc::io_error ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
