#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tableqa/external.hpp"
#include "tableqa/qa.hpp"
#include "tableqa/structure.hpp"

namespace tableqa {

enum class AnswererKind { zero, lookup, external };

struct PipelineConfig {
  HierarchyOptions hierarchy;
  AnswererKind answerer = AnswererKind::lookup;
  std::string external_cmd;  // required when answerer == external
  LookupOptions lookup;
  ErrorMode mode = ErrorMode::pipeline;
  int workers = 1;  // document-level parallelism; values < 1 behave as 1
};

// Answers every question against its document. Per document: blank detection
// first (blank answers everything "0"), then parse -> normalize ->
// build_structured -> linearize -> answerer. Output order matches question
// order and |answers| == |questions| in every mode. In pipeline mode any
// per-document failure degrades that document's answers to "0" with a
// warning; in strict mode the failure for the lowest-indexed failing
// document is rethrown after the batch finishes. Results are byte-identical
// for any worker count as long as the answerer itself is deterministic.
std::vector<AnswerRecord> run_pipeline(const std::vector<std::pair<std::string, std::string>>& docs,
                                       const std::vector<DocQuestion>& questions, const PipelineConfig& config,
                                       std::vector<std::string>* warnings = nullptr);

struct ValueStats {
  double min = 0;
  double max = 0;
  double mean = 0;
};

struct StatsReport {
  int n_documents = 0;
  int n_blank = 0;   // blank or unparseable
  int n_tables = 0;  // always n_documents - n_blank
  ValueStats rows;
  ValueStats columns;
  ValueStats cell_length;  // per-table mean codepoint length of parsed cells
  std::map<int, int> questions_per_category;
  bool has_questions = false;
};

// Parses every non-blank document and aggregates grid shape statistics
// across tables. Malformed documents count as blank and produce a warning,
// never an error.
StatsReport compute_stats(const std::vector<std::pair<std::string, std::string>>& docs,
                          const std::vector<DocQuestion>* questions = nullptr,
                          std::vector<std::string>* warnings = nullptr);

nlohmann::ordered_json stats_to_json(const StatsReport& report);

// Reads DIR/*.html sorted by filename; doc_id is the filename without the
// extension. Throws Error(errc::io_error) when the directory or a file
// cannot be read.
std::vector<std::pair<std::string, std::string>> load_docs_dir(const std::string& dir);

}  // namespace tableqa
