#include "sketchlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sketchlab/linalg.hpp"
#include "sketchlab/rng.hpp"
#include "sketchlab/scw.hpp"

namespace sketchlab {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- configuration -------------------------------------------------------

void ExperimentConfig::validate() const {
  try {
    data.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (m < 1 || m > data.n) throw ConfigError("config: need 1 <= m <= n");
  if (k < 1 || k > std::min(m, data.d)) throw ConfigError("config: need 1 <= k <= min(m, d)");
  if (!(eta > 0.0)) throw ConfigError("config: eta must be positive");
  if (iterations < 1) throw ConfigError("config: iterations must be at least 1");
  if (methods.empty()) throw ConfigError("config: methods must not be empty");
  for (std::size_t s : s_values)
    if (s < 1 || s > m) throw ConfigError("config: every s must satisfy 1 <= s <= m");
  const bool sparse_method = std::any_of(methods.begin(), methods.end(),
                                         [](TrainMode t) { return t != TrainMode::kDense; });
  if (sparse_method && s_values.empty()) throw ConfigError("config: s_values must not be empty");
  if (audit_m_min < 1 || audit_m_max < audit_m_min || audit_m_max > 12) {
    throw ConfigError("config: need 1 <= audit_m_min <= audit_m_max <= 12");
  }
  if (jobs < 1) throw ConfigError("config: jobs must be at least 1");
}

namespace {

template <typename T>
T take(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + key + "' has the wrong type");
  }
}

std::size_t take_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError("config: field '" + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

json parse_override_value(const std::string& text) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) return json(text);
  return parsed;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config: not valid JSON");
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("config: override '" + item + "' is not of the form key=value");
    }
    doc[item.substr(0, eq)] = parse_override_value(item.substr(eq + 1));
  }

  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "n") c.data.n = take_count(value, key);
    else if (key == "d") c.data.d = take_count(value, key);
    else if (key == "k_true") c.data.k_true = take_count(value, key);
    else if (key == "noise_scale") c.data.noise_scale = take<double>(value, key);
    else if (key == "count") c.data.count = take_count(value, key);
    else if (key == "split_train") c.data.split_train = take_count(value, key);
    else if (key == "trials") c.data.trials = take_count(value, key);
    else if (key == "master_seed") c.data.master_seed = take<std::uint64_t>(value, key);
    else if (key == "resample_true") c.data.resample_true = take<bool>(value, key);
    else if (key == "m") c.m = take_count(value, key);
    else if (key == "k") c.k = take_count(value, key);
    else if (key == "eta") c.eta = take<double>(value, key);
    else if (key == "iterations") c.iterations = take_count(value, key);
    else if (key == "methods") {
      if (!value.is_array()) throw ConfigError("config: 'methods' must be an array");
      c.methods.clear();
      for (const auto& v : value) {
        try {
          c.methods.push_back(parse_train_mode(take<std::string>(v, key)));
        } catch (const ParameterError& e) {
          throw ConfigError(std::string("config: ") + e.what());
        }
      }
    } else if (key == "s_values") {
      if (!value.is_array()) throw ConfigError("config: 's_values' must be an array");
      c.s_values.clear();
      for (const auto& v : value) c.s_values.push_back(take_count(v, key));
    } else if (key == "train_mean_every") c.train_mean_every = take_count(value, key);
    else if (key == "record_scw") c.record_scw = take<bool>(value, key);
    else if (key == "audit_m_min") c.audit_m_min = take_count(value, key);
    else if (key == "audit_m_max") c.audit_m_max = take_count(value, key);
    else if (key == "plot") c.plot = take<bool>(value, key);
    else if (key == "resume") c.resume = take<bool>(value, key);
    else if (key == "jobs") c.jobs = take_count(value, key);
    else throw ConfigError("config: unknown field '" + key + "'");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str(), overrides);
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json methods = json::array();
  for (TrainMode t : c.methods) methods.push_back(to_string(t));
  json doc = {
      {"n", c.data.n},
      {"d", c.data.d},
      {"k_true", c.data.k_true},
      {"noise_scale", c.data.noise_scale},
      {"count", c.data.count},
      {"split_train", c.data.split_train},
      {"trials", c.data.trials},
      {"master_seed", c.data.master_seed},
      {"resample_true", c.data.resample_true},
      {"m", c.m},
      {"k", c.k},
      {"eta", c.eta},
      {"iterations", c.iterations},
      {"methods", methods},
      {"s_values", c.s_values},
      {"train_mean_every", c.train_mean_every},
      {"record_scw", c.record_scw},
      {"audit_m_min", c.audit_m_min},
      {"audit_m_max", c.audit_m_max},
      {"plot", c.plot},
      {"resume", c.resume},
      {"jobs", c.jobs},
  };
  return doc.dump(2);
}

// ---- runs ----------------------------------------------------------------

std::string RunSpec::name() const {
  return to_string(mode) + "_s" + std::to_string(s) + "_t" + std::to_string(trial);
}

std::vector<RunSpec> enumerate_runs(const ExperimentConfig& config) {
  std::vector<RunSpec> runs;
  for (std::size_t trial = 0; trial < config.data.trials; ++trial) {
    for (TrainMode mode : config.methods) {
      if (mode == TrainMode::kDense) {
        runs.push_back({mode, config.m, trial});
        continue;
      }
      for (std::size_t s : config.s_values) runs.push_back({mode, s, trial});
    }
  }
  return runs;
}

std::uint64_t run_seed(const ExperimentConfig& config, std::size_t trial) {
  return derive_key(config.data.master_seed, Stream::kTrainer, trial);
}

namespace {

TrainConfig train_config_for(const ExperimentConfig& c, const RunSpec& run) {
  TrainConfig t;
  t.mode = run.mode;
  t.s = run.s;
  t.eta = c.eta;
  t.iterations = c.iterations;
  t.seed = run_seed(c, run.trial);
  t.k = c.k;
  t.train_mean_every = c.train_mean_every;
  t.record_scw = c.record_scw;
  return t;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(jobs, std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_double(v); }

double parse_number(const std::string& field, std::size_t line_no, const char* what) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ConfigError(std::string(what) + ": malformed number '" + field + "' on row " +
                      std::to_string(line_no));
  }
  return v;
}

std::size_t parse_count(const std::string& field, std::size_t line_no, const char* what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ConfigError(std::string(what) + ": malformed integer '" + field + "' on row " +
                      std::to_string(line_no));
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_text_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw std::ios_base::failure("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path instance_path(const Layout& layout, std::size_t i) {
  std::ostringstream name;
  name << "instance_" << std::setw(4) << std::setfill('0') << i << ".bin";
  return layout.data_dir() / name.str();
}

json dataset_params_json(const DatasetParams& p) {
  return {{"n", p.n},
          {"d", p.d},
          {"k_true", p.k_true},
          {"noise_scale", p.noise_scale},
          {"count", p.count},
          {"master_seed", p.master_seed},
          {"resample_true", p.resample_true}};
}

}  // namespace

// ---- CSV -----------------------------------------------------------------

void write_trace_csv(std::ostream& out, const std::vector<TrainRecord>& records) {
  out << "iteration,surrogate_loss,scw_loss_sampled,scw_loss_train_mean\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << csv_number(r.surrogate_loss) << ',' << csv_number(r.scw_loss_sampled)
        << ',' << csv_number(r.scw_loss_train_mean) << '\n';
  }
}

std::vector<TrainRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "iteration,surrogate_loss,scw_loss_sampled,scw_loss_train_mean") {
    throw ConfigError("trace csv: unexpected header");
  }
  std::vector<TrainRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 4) throw ConfigError("trace csv: row " + std::to_string(line_no) + " has wrong arity");
    TrainRecord r;
    r.iteration = parse_count(f[0], line_no, "trace csv");
    r.surrogate_loss = parse_number(f[1], line_no, "trace csv");
    r.scw_loss_sampled = parse_number(f[2], line_no, "trace csv");
    r.scw_loss_train_mean = parse_number(f[3], line_no, "trace csv");
    out.push_back(r);
  }
  return out;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportHeader << '\n';
  for (const auto& r : rows) {
    out << r.method << ',' << r.s << ',' << r.trial << ',' << format_double(r.train_surrogate) << ','
        << format_double(r.train_scw) << ',' << format_double(r.test_scw) << ','
        << format_double(r.test_opt) << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw ConfigError("report csv: unexpected header (row 1)");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 7) throw ConfigError("report csv: row " + std::to_string(line_no) + " has wrong arity");
    ReportRow r;
    r.method = f[0];
    try {
      parse_train_mode(r.method);
    } catch (const ParameterError&) {
      throw ConfigError("report csv: unknown method on row " + std::to_string(line_no));
    }
    r.s = parse_count(f[1], line_no, "report csv");
    r.trial = parse_count(f[2], line_no, "report csv");
    r.train_surrogate = parse_number(f[3], line_no, "report csv");
    r.train_scw = parse_number(f[4], line_no, "report csv");
    r.test_scw = parse_number(f[5], line_no, "report csv");
    r.test_opt = parse_number(f[6], line_no, "report csv");
    rows.push_back(r);
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows) {
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<const ReportRow*>> groups;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.method, r.s);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  auto stats = [](const std::vector<const ReportRow*>& g, double ReportRow::*field) {
    double mean = 0.0;
    for (const auto* r : g) mean += r->*field;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    for (const auto* r : g) var += (r->*field - mean) * (r->*field - mean);
    const double sd = g.size() > 1 ? std::sqrt(var / static_cast<double>(g.size() - 1)) : 0.0;
    return std::make_pair(mean, sd);
  };
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    SummaryRow s;
    s.method = key.first;
    s.s = key.second;
    s.trials = g.size();
    std::tie(s.train_surrogate_mean, s.train_surrogate_std) = stats(g, &ReportRow::train_surrogate);
    std::tie(s.train_scw_mean, s.train_scw_std) = stats(g, &ReportRow::train_scw);
    std::tie(s.test_scw_mean, s.test_scw_std) = stats(g, &ReportRow::test_scw);
    s.test_opt_mean = stats(g, &ReportRow::test_opt).first;
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,s,trials,train_surrogate_mean,train_surrogate_std,train_scw_mean,train_scw_std,"
         "test_scw_mean,test_scw_std,test_opt_mean\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.s << ',' << r.trials << ',' << format_double(r.train_surrogate_mean)
        << ',' << format_double(r.train_surrogate_std) << ',' << format_double(r.train_scw_mean) << ','
        << format_double(r.train_scw_std) << ',' << format_double(r.test_scw_mean) << ','
        << format_double(r.test_scw_std) << ',' << format_double(r.test_opt_mean) << '\n';
  }
}

void write_audit_csv(std::ostream& out, const std::vector<AuditRow>& rows) {
  out << "m,algorithm,predicate_count,max_degree,branch_events\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.algorithm << ',' << r.report.predicate_count << ',' << r.report.max_degree
        << ',' << r.report.branch_events << '\n';
  }
}

// ---- stages --------------------------------------------------------------

void gen_data_stage(const ExperimentConfig& config, const Layout& layout) {
  config.validate();
  fs::create_directories(layout.data_dir());
  const std::vector<DenseMatrix> dataset = gen_dataset(config.data);
  json seeds = json::array();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    write_matrix_file(instance_path(layout, i), dataset[i]);
    seeds.push_back(i);
  }
  json manifest = {{"params", dataset_params_json(config.data)},
                   {"signal_stream", "true_signal/0"},
                   {"instance_seeds", seeds},
                   {"files", dataset.size()}};
  write_text_atomically(layout.data_dir() / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<DenseMatrix> load_dataset(const ExperimentConfig& config, const Layout& layout) {
  const fs::path manifest_path = layout.data_dir() / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw std::ios_base::failure("dataset manifest missing: " + manifest_path.string());
  json manifest = json::parse(in, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("params")) {
    throw ConfigError("dataset manifest is malformed: " + manifest_path.string());
  }
  if (manifest["params"] != dataset_params_json(config.data)) {
    throw ConfigError("dataset in " + layout.data_dir().string() +
                      " was generated with different parameters; rerun gen-data");
  }
  std::vector<DenseMatrix> dataset;
  dataset.reserve(config.data.count);
  for (std::size_t i = 0; i < config.data.count; ++i) dataset.push_back(read_matrix_file(instance_path(layout, i)));
  return dataset;
}

TrainOutcome train_stage(const ExperimentConfig& config, const Layout& layout) {
  config.validate();
  const std::vector<DenseMatrix> dataset = load_dataset(config, layout);
  fs::create_directories(layout.runs_dir());
  const fs::path manifest_path = layout.runs_dir() / "manifest.jsonl";

  std::set<std::string> done;
  if (config.resume) {
    std::ifstream in(manifest_path);
    std::string line;
    while (std::getline(in, line)) {
      json entry = json::parse(line, nullptr, false);
      if (!entry.is_discarded() && entry.value("status", "") == "ok") done.insert(entry.value("run", ""));
    }
  }

  const std::vector<SurrogateInstance> prepared = prepare_instances(dataset, config.k);
  const std::vector<RunSpec> runs = enumerate_runs(config);

  std::ofstream manifest(manifest_path, config.resume ? std::ios::app : std::ios::trunc);
  if (!manifest) throw std::ios_base::failure("cannot open " + manifest_path.string());
  std::mutex manifest_mutex;
  TrainOutcome outcome;

  parallel_for(runs.size(), config.jobs, [&](std::size_t idx) {
    const RunSpec& run = runs[idx];
    const std::string name = run.name();
    const fs::path trace_path = layout.runs_dir() / (name + ".csv");
    const fs::path sketch_path = layout.runs_dir() / (name + ".sketch");
    if (done.contains(name) && fs::exists(trace_path) && fs::exists(sketch_path)) {
      std::lock_guard lock(manifest_mutex);
      ++outcome.skipped;
      return;
    }
    const Split split = split_indices(config.data, run.trial);
    std::vector<SurrogateInstance> train_set;
    train_set.reserve(split.train.size());
    for (std::size_t i : split.train) train_set.push_back(prepared[i]);

    const auto start = std::chrono::steady_clock::now();
    json entry = {{"run", name}, {"method", to_string(run.mode)}, {"s", run.s}, {"trial", run.trial}};
    try {
      const TrainTrace trace = train(train_set, config.m, train_config_for(config, run));
      std::ostringstream csv;
      write_trace_csv(csv, trace.records);
      write_text_atomically(trace_path, csv.str());
      std::ostringstream sketch;
      write_sketch(sketch, trace.final_sketch);
      write_text_atomically(sketch_path, sketch.str());
      entry["status"] = "ok";
    } catch (const NumericError& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
    }
    entry["seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::lock_guard lock(manifest_mutex);
    manifest << entry.dump() << '\n' << std::flush;
    if (entry["status"] == "ok") ++outcome.completed;
    else outcome.failed.push_back(name + ": " + entry["error"].get<std::string>());
  });
  return outcome;
}

EvalOutcome eval_stage(const ExperimentConfig& config, const Layout& layout) {
  config.validate();
  const std::vector<DenseMatrix> dataset = load_dataset(config, layout);
  const std::vector<SurrogateInstance> prepared = prepare_instances(dataset, config.k);
  std::vector<double> floors(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) floors[i] = eckart_young_floor(dataset[i], config.k);

  const std::vector<RunSpec> runs = enumerate_runs(config);
  std::vector<std::optional<ReportRow>> rows(runs.size());

  parallel_for(runs.size(), config.jobs, [&](std::size_t idx) {
    const RunSpec& run = runs[idx];
    const fs::path sketch_path = layout.runs_dir() / (run.name() + ".sketch");
    std::ifstream in(sketch_path);
    if (!in) return;
    const SparseSketch sketch = read_sketch(in);
    const DenseMatrix dense = densify(sketch);
    const Split split = split_indices(config.data, run.trial);

    ReportRow row;
    row.method = to_string(run.mode);
    row.s = run.s;
    row.trial = run.trial;
    for (std::size_t i : split.train) {
      row.train_surrogate += surrogate_loss(dense, prepared[i]);
      row.train_scw += scw_loss(sketch, dataset[i], config.k);
    }
    for (std::size_t i : split.test) {
      row.test_scw += scw_loss(sketch, dataset[i], config.k);
      row.test_opt += floors[i];
    }
    const auto n_train = static_cast<double>(split.train.size());
    const auto n_test = static_cast<double>(split.test.size());
    row.train_surrogate /= n_train;
    row.train_scw /= n_train;
    row.test_scw /= n_test;
    row.test_opt /= n_test;
    rows[idx] = row;
  });

  EvalOutcome outcome;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (rows[i]) outcome.rows.push_back(*rows[i]);
    else outcome.missing.push_back(runs[i].name());
  }
  std::ostringstream report;
  write_report_csv(report, outcome.rows);
  write_text_atomically(layout.report(), report.str());
  std::ostringstream summary;
  write_summary_csv(summary, summarize(outcome.rows));
  write_text_atomically(layout.summary(), summary.str());
  return outcome;
}

std::vector<AuditRow> audit_stage(const ExperimentConfig& config, const Layout& layout) {
  config.validate();
  std::vector<AuditRow> rows;
  for (std::size_t m = config.audit_m_min; m <= config.audit_m_max; ++m) {
    const auto suite = gj::dependence_suite(m, config.data.master_seed);
    rows.push_back({m, "decell", gj::audit_pinv_decell(m, suite)});
    rows.push_back({m, "greedy", gj::audit_pinv_greedy(m, suite)});
  }
  fs::create_directories(layout.root);
  std::ostringstream csv;
  write_audit_csv(csv, rows);
  write_text_atomically(layout.audit(), csv.str());
  return rows;
}

}  // namespace sketchlab
