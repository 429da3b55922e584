#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sketchlab/experiment.hpp"

namespace sketchlab {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const std::map<std::string, std::string> kColors = {
    {"fix", "#1f77b4"}, {"learn", "#d62728"}, {"dense", "#2ca02c"}};

struct Curve {
  std::string method;
  std::vector<std::size_t> iteration;
  std::vector<double> mean;
  std::vector<double> sd;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// Mean and standard deviation across trials of a moving average with window
// `window`, sampled at most `points` times.
Curve aggregate(const std::string& method, const std::vector<std::vector<double>>& series,
                std::size_t points) {
  Curve c{method, {}, {}, {}};
  if (series.empty()) return c;
  std::size_t len = series.front().size();
  for (const auto& s : series) len = std::min(len, s.size());
  if (len == 0) return c;
  const std::size_t window = std::max<std::size_t>(1, len / 100);
  std::vector<std::vector<double>> smooth(series.size(), std::vector<double>(len));
  for (std::size_t t = 0; t < series.size(); ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      acc += series[t][i];
      if (i >= window) acc -= series[t][i - window];
      smooth[t][i] = acc / static_cast<double>(std::min(i + 1, window));
    }
  }
  const std::size_t stride = std::max<std::size_t>(1, len / points);
  for (std::size_t i = 0; i < len; i += stride) {
    double mean = 0.0;
    for (const auto& s : smooth) mean += s[i];
    mean /= static_cast<double>(smooth.size());
    double var = 0.0;
    for (const auto& s : smooth) var += (s[i] - mean) * (s[i] - mean);
    const double sd = smooth.size() > 1 ? std::sqrt(var / static_cast<double>(smooth.size() - 1)) : 0.0;
    c.iteration.push_back(i);
    c.mean.push_back(mean);
    c.sd.push_back(sd);
  }
  return c;
}

std::string svg_header(const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
    << "</text>\n";
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << text;
}

// Training panel with a log-scale loss axis.
std::string curve_panel(const std::string& title, const std::vector<Curve>& curves) {
  double lo = INFINITY, hi = 0.0;
  std::size_t max_it = 1;
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.mean.size(); ++i) {
      lo = std::min(lo, std::max(c.mean[i] - c.sd[i], c.mean[i] * 0.5));
      hi = std::max(hi, c.mean[i] + c.sd[i]);
      max_it = std::max(max_it, c.iteration[i]);
    }
  lo = std::max(lo, 1e-12);
  const double log_lo = std::floor(std::log10(lo));
  const double log_hi = std::max(std::ceil(std::log10(hi)), log_lo + 1.0);
  auto px = [&](double it) { return kLeft + (kWidth - kLeft - kRight) * it / static_cast<double>(max_it); };
  auto py = [&](double v) {
    const double lv = std::log10(std::max(v, lo * 1e-3));
    return kTop + (kHeight - kTop - kBottom) * (log_hi - lv) / (log_hi - log_lo);
  };

  std::ostringstream s;
  s << svg_header(title);
  s << "<!-- data\nmethod,iteration,mean,std\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.mean.size(); ++i)
      s << c.method << ',' << c.iteration[i] << ',' << format_double(c.mean[i]) << ','
        << format_double(c.sd[i]) << '\n';
  s << "-->\n";

  s << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
    << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (double e = log_lo; e <= log_hi; e += 1.0) {
    const double y = py(std::pow(10.0, e));
    s << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << y
      << "\" stroke=\"#ddd\"/>\n"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double it = static_cast<double>(max_it) * t / 4.0;
    s << "<text x=\"" << px(it) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">"
      << static_cast<long long>(it) << "</text>\n";
  }
  s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\">iteration</text>\n";

  double legend_y = kTop + 10;
  for (const auto& c : curves) {
    const std::string color = kColors.contains(c.method) ? kColors.at(c.method) : "black";
    s << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < c.mean.size(); ++i)
      s << fmt(px(static_cast<double>(c.iteration[i])), 6) << ',' << fmt(py(c.mean[i] + c.sd[i]), 6) << ' ';
    for (std::size_t i = c.mean.size(); i-- > 0;)
      s << fmt(px(static_cast<double>(c.iteration[i])), 6) << ',' << fmt(py(c.mean[i] - c.sd[i]), 6) << ' ';
    s << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.mean.size(); ++i)
      s << fmt(px(static_cast<double>(c.iteration[i])), 6) << ',' << fmt(py(c.mean[i]), 6) << ' ';
    s << "\"/>\n";
    s << "<line x1=\"" << kWidth - 130 << "\" y1=\"" << legend_y << "\" x2=\"" << kWidth - 110 << "\" y2=\""
      << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << kWidth - 105 << "\" y=\"" << legend_y + 4 << "\">" << c.method << "</text>\n";
    legend_y += 16;
  }
  s << "</svg>\n";
  return s.str();
}

std::string bar_chart(const std::string& title, const std::vector<SummaryRow>& groups) {
  double hi = 0.0;
  for (const auto& g : groups) hi = std::max(hi, g.test_scw_mean + g.test_scw_std);
  hi = hi > 0.0 ? hi * 1.1 : 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double slot = plot_w / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  auto py = [&](double v) { return kTop + (kHeight - kTop - kBottom) * (1.0 - v / hi); };

  std::ostringstream s;
  s << svg_header(title);
  s << "<!-- data\nmethod,s,trials,test_scw_mean,test_scw_std,test_opt_mean\n";
  for (const auto& g : groups)
    s << g.method << ',' << g.s << ',' << g.trials << ',' << format_double(g.test_scw_mean) << ','
      << format_double(g.test_scw_std) << ',' << format_double(g.test_opt_mean) << '\n';
  s << "-->\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
    << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = hi * t / 4.0;
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << fmt(v, 3)
      << "</text>\n";
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const std::string color = kColors.contains(g.method) ? kColors.at(g.method) : "gray";
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.15;
    const double w = slot * 0.7;
    s << "<rect x=\"" << x << "\" y=\"" << py(g.test_scw_mean) << "\" width=\"" << w << "\" height=\""
      << py(0.0) - py(g.test_scw_mean) << "\" fill=\"" << color << "\"/>\n";
    const double cx = x + w / 2;
    s << "<line x1=\"" << cx << "\" y1=\"" << py(g.test_scw_mean + g.test_scw_std) << "\" x2=\"" << cx
      << "\" y2=\"" << py(std::max(0.0, g.test_scw_mean - g.test_scw_std)) << "\" stroke=\"black\"/>\n";
    const std::string label = g.method == "dense" ? "dense" : g.method + " s=" + std::to_string(g.s);
    s << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">" << label
      << "</text>\n";
  }
  if (!groups.empty() && groups.front().test_opt_mean > 0.0) {
    const double y = py(groups.front().test_opt_mean);
    s << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << y
      << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n"
      << "<text x=\"" << kWidth - kRight << "\" y=\"" << y - 4 << "\" text-anchor=\"end\">optimal rank-k</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::vector<fs::path> plot_stage(const Layout& layout) {
  std::ifstream in(layout.report());
  if (!in) throw std::ios_base::failure("report missing: " + layout.report().string());
  const std::vector<ReportRow> rows = read_report_csv(in);
  if (rows.empty()) throw ConfigError("plot: report " + layout.report().string() + " has no rows");

  // Panels per sparse budget; dense curves appear in every panel.
  std::set<std::size_t> budgets;
  for (const auto& r : rows)
    if (r.method != "dense") budgets.insert(r.s);
  const bool has_dense = std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.method == "dense"; });

  std::map<std::pair<std::string, std::size_t>, std::vector<std::vector<TrainRecord>>> traces;
  for (const auto& r : rows) {
    const fs::path p = layout.runs_dir() / (r.method + "_s" + std::to_string(r.s) + "_t" + std::to_string(r.trial) + ".csv");
    std::ifstream t(p);
    if (!t) continue;
    traces[{r.method, r.s}].push_back(read_trace_csv(t));
  }

  fs::create_directories(layout.plots_dir());
  std::vector<fs::path> written;
  auto series_of = [&](const std::string& method, std::size_t s, double TrainRecord::*field) {
    std::vector<std::vector<double>> out;
    const auto it = traces.find({method, s});
    if (it == traces.end()) return out;
    for (const auto& trace : it->second) {
      std::vector<double> v;
      for (const auto& rec : trace) v.push_back(rec.*field);
      if (!v.empty() && !std::isnan(v.front())) out.push_back(std::move(v));
    }
    return out;
  };

  std::vector<std::size_t> panels(budgets.begin(), budgets.end());
  if (panels.empty() && has_dense) panels.push_back(0);
  for (std::size_t s : panels) {
    for (const auto& [kind, field] : {std::pair{std::string("surrogate"), &TrainRecord::surrogate_loss},
                                      std::pair{std::string("scw"), &TrainRecord::scw_loss_sampled}}) {
      std::vector<Curve> curves;
      for (const std::string method : {"fix", "learn"}) {
        auto series = series_of(method, s, field);
        if (!series.empty()) curves.push_back(aggregate(method, series, 400));
      }
      if (has_dense) {
        for (const auto& r : rows)
          if (r.method == "dense") {
            auto series = series_of("dense", r.s, field);
            if (!series.empty()) curves.push_back(aggregate("dense", series, 400));
            break;
          }
      }
      if (curves.empty()) continue;
      const std::string label = kind == "surrogate" ? "Surrogate loss" : "SCW loss";
      const std::string title = s == 0 ? label : label + ", s=" + std::to_string(s);
      const fs::path path = layout.plots_dir() / (kind + "_s" + std::to_string(s) + ".svg");
      write_file(path, curve_panel(title + " (training)", curves));
      written.push_back(path);
    }
  }

  // Test-loss bars grouped as fix/learn per budget, then dense.
  const std::vector<SummaryRow> summary = summarize(rows);
  std::vector<SummaryRow> ordered;
  for (std::size_t s : budgets)
    for (const std::string method : {"fix", "learn"})
      for (const auto& g : summary)
        if (g.method == method && g.s == s) ordered.push_back(g);
  for (const auto& g : summary)
    if (g.method == "dense") ordered.push_back(g);
  const fs::path bars = layout.plots_dir() / "test_scw.svg";
  write_file(bars, bar_chart("SCW loss on test data", ordered));
  written.push_back(bars);
  return written;
}

}  // namespace sketchlab
