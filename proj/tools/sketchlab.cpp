// sketchlab: batch driver for learned-sketch low-rank approximation experiments.
//
//   sketchlab gen-data|train|eval|audit-gj|plot [--config file] [--set key=value]...
//             [--jobs N] [--out dir]
//
// Exit codes: 0 success, 2 config error, 3 numeric fault, 4 IO error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sketchlab/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::size_t jobs = 0;
  std::string out = "out";
};

sketchlab::ExperimentConfig resolve_config(const Options& opt) {
  std::vector<std::string> overrides = opt.overrides;
  if (opt.jobs > 0) overrides.push_back("jobs=" + std::to_string(opt.jobs));
  if (opt.config_path.empty()) return sketchlab::config_from_json_text("{}", overrides);
  return sketchlab::load_config(opt.config_path, overrides);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_gen_data(const Options& opt) {
  const auto config = resolve_config(opt);
  const sketchlab::Layout layout{opt.out};
  sketchlab::gen_data_stage(config, layout);
  std::cout << "wrote " << config.data.count << " instances to " << layout.data_dir().string() << "\n";
  return kExitOk;
}

int cmd_train(const Options& opt) {
  const auto config = resolve_config(opt);
  const sketchlab::Layout layout{opt.out};
  const auto start = std::chrono::steady_clock::now();
  const auto outcome = sketchlab::train_stage(config, layout);
  std::cout << "runs completed: " << outcome.completed << ", skipped: " << outcome.skipped
            << ", failed: " << outcome.failed.size() << " (" << seconds_since(start) << " s)\n";
  for (const auto& f : outcome.failed) std::cerr << "failed run " << f << "\n";
  return outcome.failed.empty() ? kExitOk : kExitNumeric;
}

int cmd_eval(const Options& opt) {
  const auto config = resolve_config(opt);
  const sketchlab::Layout layout{opt.out};
  const auto outcome = sketchlab::eval_stage(config, layout);
  for (const auto& g : sketchlab::summarize(outcome.rows)) {
    std::printf("%-6s s=%-3zu trials=%-3zu train_surrogate=%.6g±%.3g test_scw=%.6g±%.3g (opt %.6g)\n",
                g.method.c_str(), g.s, g.trials, g.train_surrogate_mean, g.train_surrogate_std,
                g.test_scw_mean, g.test_scw_std, g.test_opt_mean);
  }
  // Paired Learn − Fix gap per budget.
  for (std::size_t s : config.s_values) {
    double gap = 0.0;
    std::size_t pairs = 0;
    for (const auto& l : outcome.rows) {
      if (l.method != "learn" || l.s != s) continue;
      for (const auto& f : outcome.rows)
        if (f.method == "fix" && f.s == s && f.trial == l.trial) {
          gap += l.test_scw - f.test_scw;
          ++pairs;
        }
    }
    if (pairs > 0) std::printf("learn-fix test_scw gap at s=%zu: %+.6g\n", s, gap / static_cast<double>(pairs));
  }
  if (!outcome.missing.empty()) {
    std::cerr << "WARNING: partial report, " << outcome.missing.size() << " runs missing:";
    for (const auto& m : outcome.missing) std::cerr << ' ' << m;
    std::cerr << "\n";
  }
  std::cout << "report: " << layout.report().string() << "\n";
  if (config.plot && !outcome.rows.empty()) {
    for (const auto& p : sketchlab::plot_stage(layout)) std::cout << "plot: " << p.string() << "\n";
  }
  return kExitOk;
}

int cmd_audit(const Options& opt) {
  const auto config = resolve_config(opt);
  const sketchlab::Layout layout{opt.out};
  const auto rows = sketchlab::audit_stage(config, layout);
  std::printf("%3s  %-8s %15s %10s %13s\n", "m", "algorithm", "predicate_count", "max_degree",
              "branch_events");
  for (const auto& r : rows) {
    std::printf("%3zu  %-8s %15zu %10d %13zu\n", r.m, r.algorithm.c_str(), r.report.predicate_count,
                r.report.max_degree, r.report.branch_events);
  }
  return kExitOk;
}

int cmd_plot(const Options& opt) {
  const sketchlab::Layout layout{opt.out};
  for (const auto& p : sketchlab::plot_stage(layout)) std::cout << "plot: " << p.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned sparse sketching for low-rank approximation"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--set", opt.overrides, "Override a config field (key=value)")->take_all();
    sub->add_option("--jobs", opt.jobs, "Parallel runs");
    sub->add_option("--out", opt.out, "Output directory");
  };
  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic dataset");
  auto* train = app.add_subcommand("train", "Train sketches for every method, budget and trial");
  auto* eval = app.add_subcommand("eval", "Evaluate trained sketches into report CSVs");
  auto* audit = app.add_subcommand("audit-gj", "Degree/predicate audit of the pseudo-inverse algorithms");
  auto* plot = app.add_subcommand("plot", "Render SVG figures from the report");
  for (auto* sub : {gen, train, eval, audit, plot}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen_data(opt);
    if (*train) return cmd_train(opt);
    if (*eval) return cmd_eval(opt);
    if (*audit) return cmd_audit(opt);
    if (*plot) return cmd_plot(opt);
  } catch (const sketchlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sketchlab::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sketchlab::NumericError& e) {
    std::cerr << "numeric fault: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const sketchlab::ContractError& e) {
    std::cerr << "numeric fault: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
