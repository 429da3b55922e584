#pragma once

// Batch experiment pipeline behind the `sketchlab` CLI: dataset generation,
// training runs for every (method, s, trial), evaluation into a report CSV,
// GJ audits and SVG figures.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sketchlab/data.hpp"
#include "sketchlab/gjtrace.hpp"
#include "sketchlab/train.hpp"

namespace sketchlab {

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  DatasetParams data;
  std::size_t m = 10;
  std::size_t k = 5;
  double eta = 0.1;
  std::size_t iterations = 3000;
  std::vector<TrainMode> methods = {TrainMode::kFix, TrainMode::kLearn, TrainMode::kDense};
  std::vector<std::size_t> s_values = {1, 3, 5};
  std::size_t train_mean_every = 50;
  bool record_scw = true;
  std::size_t audit_m_min = 1;
  std::size_t audit_m_max = 6;
  bool plot = true;
  bool resume = false;
  std::size_t jobs = 1;

  void validate() const;
};

/// Strict JSON schema: every key optional, unknown keys rejected.
ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});
std::string config_to_json_text(const ExperimentConfig& config);

struct RunSpec {
  TrainMode mode;
  std::size_t s;  // budget; m for dense
  std::size_t trial;

  std::string name() const;
};

/// Every run the config asks for. Dense runs once per trial, whatever s_values holds.
std::vector<RunSpec> enumerate_runs(const ExperimentConfig& config);

/// Seed shared by all runs of one trial, so methods are compared on the same
/// initialization and sampling sequence.
std::uint64_t run_seed(const ExperimentConfig& config, std::size_t trial);

// ---- CSV schemas ---------------------------------------------------------

void write_trace_csv(std::ostream& out, const std::vector<TrainRecord>& records);
std::vector<TrainRecord> read_trace_csv(std::istream& in);

struct ReportRow {
  std::string method;
  std::size_t s = 0;
  std::size_t trial = 0;
  double train_surrogate = 0.0;
  double train_scw = 0.0;
  double test_scw = 0.0;
  double test_opt = 0.0;  // mean ‖A − [A]_k‖_F² over the trial's test set

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

inline constexpr const char* kReportHeader =
    "method,s,trial,train_surrogate,train_scw,test_scw,test_opt";

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& in);

struct SummaryRow {
  std::string method;
  std::size_t s = 0;
  std::size_t trials = 0;
  double train_surrogate_mean = 0.0, train_surrogate_std = 0.0;
  double train_scw_mean = 0.0, train_scw_std = 0.0;
  double test_scw_mean = 0.0, test_scw_std = 0.0;
  double test_opt_mean = 0.0;
};

/// Mean and sample standard deviation per (method, s), rows in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct AuditRow {
  std::size_t m = 0;
  std::string algorithm;
  gj::GjReport report;
};

void write_audit_csv(std::ostream& out, const std::vector<AuditRow>& rows);

// ---- pipeline stages -----------------------------------------------------

struct Layout {
  std::filesystem::path root;
  std::filesystem::path data_dir() const { return root / "data"; }
  std::filesystem::path runs_dir() const { return root / "runs"; }
  std::filesystem::path plots_dir() const { return root / "plots"; }
  std::filesystem::path report() const { return root / "report.csv"; }
  std::filesystem::path summary() const { return root / "report_summary.csv"; }
  std::filesystem::path audit() const { return root / "audit.csv"; }
};

/// Writes one binary file per instance plus data/manifest.json.
void gen_data_stage(const ExperimentConfig& config, const Layout& layout);

/// Loads the dataset written by gen_data_stage, checking the manifest
/// against the config.
std::vector<DenseMatrix> load_dataset(const ExperimentConfig& config, const Layout& layout);

struct TrainOutcome {
  std::size_t completed = 0;
  std::size_t skipped = 0;
  std::vector<std::string> failed;  // run names with diagnostics
};

/// Trains every run, `config.jobs` at a time. Each run writes its trace CSV
/// and final sketch; status lines go to runs/manifest.jsonl.
TrainOutcome train_stage(const ExperimentConfig& config, const Layout& layout);

struct EvalOutcome {
  std::vector<ReportRow> rows;
  std::vector<std::string> missing;
};

/// Evaluates every trained sketch on its trial's split and writes
/// report.csv and report_summary.csv.
EvalOutcome eval_stage(const ExperimentConfig& config, const Layout& layout);

/// Decell and greedy audits for m in [audit_m_min, audit_m_max] on the
/// dependence-pattern suite; writes audit.csv.
std::vector<AuditRow> audit_stage(const ExperimentConfig& config, const Layout& layout);

/// Renders SVG panels from report.csv and the run traces. Returns the files
/// written; throws ConfigError when the report is empty or malformed.
std::vector<std::filesystem::path> plot_stage(const Layout& layout);

}  // namespace sketchlab
