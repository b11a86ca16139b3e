#include "aggcast/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "aggcast/evaluation.hpp"
#include "aggcast/oracles.hpp"

namespace aggcast {

namespace {

namespace fs = std::filesystem;

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) {
    threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path.string());
  out.precision(12);
  return out;
}

struct Task {
  const StreamKey* key;
  const ForecastPanel* panel;
  const StrategyConfig* strategy;
};

}  // namespace

ForecastPanel filter_experts(const ForecastPanel& panel,
                             const std::vector<std::string>& include,
                             const std::vector<std::string>& exclude) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < panel.num_experts(); ++i) {
    const std::string& name = panel.expert_names[i];
    bool in = include.empty();
    for (const auto& pat : include) in = in || glob_match(pat, name);
    for (const auto& pat : exclude) in = in && !glob_match(pat, name);
    if (in) keep.push_back(i);
  }
  if (keep.empty()) {
    throw std::invalid_argument("expert selection leaves no experts");
  }
  if (keep.size() == panel.num_experts()) return panel;
  ForecastPanel out;
  for (std::size_t i : keep) out.expert_names.push_back(panel.expert_names[i]);
  out.rows.reserve(panel.size());
  for (const auto& row : panel.rows) {
    PanelRow r;
    r.date = row.date;
    r.obs = row.obs;
    for (std::size_t i : keep) r.experts.push_back(row.experts[i]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

StreamRunResult run_stream(const ForecastPanel& panel, const StreamKey& key,
                           const StrategyConfig& config) {
  panel.validate();
  StreamRunResult res;
  res.key = key;
  res.strategy_label = config.label();
  Strategy strategy(config, panel.num_experts());

  for (const auto& row : panel.rows) {
    try {
      // Losses recorded for evaluation are the raw configured losses; the
      // strategy applies the gradient trick internally when configured.
      const std::vector<double> el =
          expert_losses(config.loss, row.experts, row.obs);
      const Prediction pred = strategy.step(row.experts, row.obs);
      const double al = loss(config.loss, pred.value, row.obs);

      if (config.loss.range_bound) {
        const double m = *config.loss.range_bound;
        if (al > m) ++res.bound_violations;
        for (double l : el) {
          if (l > m) ++res.bound_violations;
        }
      }
      res.dates.push_back(row.date);
      res.predictions.push_back(pred.value);
      res.observations.push_back(row.obs);
      res.weights.push_back(pred.weights_used.values());
      res.agg_losses.push_back(al);
      res.expert_losses.push_back(el);
    } catch (const std::domain_error&) {
      ++res.rejected_steps;
    } catch (const std::invalid_argument&) {
      ++res.rejected_steps;
    }
  }
  return res;
}

std::map<StreamKey, ForecastPanel> load_filtered_panels(
    const ExperimentConfig& config, ParseStats* stats) {
  std::optional<ColumnMap> cm;
  if (config.column_map_path) cm = ColumnMap::load(*config.column_map_path);
  auto panels = parse_forecast_csv(config.input_path, stats,
                                   cm ? &*cm : nullptr);
  std::map<StreamKey, ForecastPanel> out;
  for (auto& [key, panel] : panels) {
    if (!config.stations.empty() &&
        std::find(config.stations.begin(), config.stations.end(),
                  key.station_id) == config.stations.end()) {
      continue;
    }
    if (!config.lead_times.empty() &&
        std::find(config.lead_times.begin(), config.lead_times.end(),
                  key.lead_time_hours) == config.lead_times.end()) {
      continue;
    }
    out.emplace(key, filter_experts(panel, config.include_experts,
                                    config.exclude_experts));
  }
  if (out.empty()) {
    throw std::runtime_error("station/lead-time filters leave no streams");
  }
  return out;
}

double pooled_rmse(const std::vector<StreamRunResult>& results,
                   const std::string& strategy_label) {
  SquaredErrorPool pool;
  for (const auto& r : results) {
    if (r.strategy_label != strategy_label) continue;
    for (std::size_t t = 0; t < r.predictions.size(); ++t) {
      pool.add(r.predictions[t], r.observations[t]);
    }
  }
  return pool.rmse();
}

namespace {

std::vector<StreamRunResult> run_all(
    const std::map<StreamKey, ForecastPanel>& panels,
    const std::vector<StrategyConfig>& strategies, std::size_t threads,
    RunReport& report) {
  std::vector<Task> tasks;
  for (const auto& [key, panel] : panels) {
    for (const auto& s : strategies) tasks.push_back({&key, &panel, &s});
  }
  std::vector<StreamRunResult> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    try {
      results[i] = run_stream(*tasks[i].panel, *tasks[i].key,
                              *tasks[i].strategy);
    } catch (const std::exception& e) {
      errors[i] = tasks[i].key->label() + " [" +
                  tasks[i].strategy->label() + "]: " + e.what();
    }
  });

  std::vector<StreamRunResult> ok;
  std::set<std::string> failed_streams, ok_streams;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (errors[i].empty()) {
      ok_streams.insert(tasks[i].key->label());
      ok.push_back(std::move(results[i]));
    } else {
      failed_streams.insert(tasks[i].key->label());
      report.errors.push_back(errors[i]);
    }
  }
  report.streams_ok = ok_streams.size();
  report.streams_failed = failed_streams.size();
  if (report.streams_failed > 0) {
    report.exit_code = report.streams_ok > 0 ? 2 : 1;
  }
  return ok;
}

void write_summary(const fs::path& dir,
                   const std::vector<StreamRunResult>& results) {
  // scope: pooled | station | lead_time | stream
  auto out = open_output(dir / "summary.csv");
  out << "scope,station_id,lead_time,strategy,rmse,count\n";

  std::set<std::string> labels;
  for (const auto& r : results) labels.insert(r.strategy_label);

  for (const auto& label : labels) {
    SquaredErrorPool pooled;
    std::map<std::string, SquaredErrorPool> by_station;
    std::map<int, SquaredErrorPool> by_lead;
    std::map<std::pair<std::string, int>, SquaredErrorPool> by_stream;
    for (const auto& r : results) {
      if (r.strategy_label != label) continue;
      SquaredErrorPool p;
      for (std::size_t t = 0; t < r.predictions.size(); ++t) {
        p.add(r.predictions[t], r.observations[t]);
      }
      pooled.merge(p);
      by_station[r.key.station_id].merge(p);
      by_lead[r.key.lead_time_hours].merge(p);
      by_stream[{r.key.station_id, r.key.lead_time_hours}].merge(p);
    }
    out << "pooled,,," << label << ',' << pooled.rmse() << ',' << pooled.count
        << '\n';
    for (const auto& [st, p] : by_station) {
      out << "station," << st << ",," << label << ',' << p.rmse() << ','
          << p.count << '\n';
    }
    for (const auto& [lt, p] : by_lead) {
      out << "lead_time,," << lt << ',' << label << ',' << p.rmse() << ','
          << p.count << '\n';
    }
    for (const auto& [sk, p] : by_stream) {
      out << "stream," << sk.first << ',' << sk.second << ',' << label << ','
          << p.rmse() << ',' << p.count << '\n';
    }
  }
}

void write_boxplot(const fs::path& dir,
                   const std::vector<StreamRunResult>& results) {
  auto out = open_output(dir / "boxplot.csv");
  out << "strategy,lead_time,min,q1,median,q3,max\n";
  std::map<std::pair<std::string, int>, std::map<std::string, SquaredErrorPool>>
      groups;  // (strategy, lead) -> station -> pool
  for (const auto& r : results) {
    auto& station_pool =
        groups[{r.strategy_label, r.key.lead_time_hours}][r.key.station_id];
    for (std::size_t t = 0; t < r.predictions.size(); ++t) {
      station_pool.add(r.predictions[t], r.observations[t]);
    }
  }
  for (const auto& [group, stations] : groups) {
    std::vector<double> station_rmses;
    for (const auto& [st, pool] : stations) {
      station_rmses.push_back(pool.rmse());
    }
    const BoxStats b = five_number_summary(std::move(station_rmses));
    out << group.first << ',' << group.second << ',' << b.min << ',' << b.q1
        << ',' << b.median << ',' << b.q3 << ',' << b.max << '\n';
  }
}

void write_regret(const fs::path& dir,
                  const std::vector<StreamRunResult>& results,
                  const std::map<StreamKey, ForecastPanel>& panels) {
  auto out = open_output(dir / "regret.csv");
  out << "station_id,lead_time,strategy,date,expert,cum_regret\n";
  for (const auto& r : results) {
    const auto& names = panels.at(r.key).expert_names;
    const auto curve = regret_curve(r.agg_losses, r.expert_losses);
    for (std::size_t t = 0; t < curve.size(); ++t) {
      for (std::size_t i = 0; i < curve[t].size(); ++i) {
        out << r.key.station_id << ',' << r.key.lead_time_hours << ','
            << r.strategy_label << ',' << r.dates[t] << ',' << names[i] << ','
            << curve[t][i] << '\n';
      }
    }
  }
}

void write_weights(const fs::path& dir,
                   const std::vector<StreamRunResult>& results,
                   const std::map<StreamKey, ForecastPanel>& panels) {
  std::set<StreamKey> keys;
  for (const auto& r : results) keys.insert(r.key);
  for (const auto& key : keys) {
    const auto& names = panels.at(key).expert_names;
    auto out = open_output(dir / ("weights_" + key.label() + ".csv"));
    out << "date,strategy";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (const auto& r : results) {
      if (!(r.key == key)) continue;
      for (std::size_t t = 0; t < r.weights.size(); ++t) {
        out << r.dates[t] << ',' << r.strategy_label;
        for (double w : r.weights[t]) out << ',' << w;
        out << '\n';
      }
    }
  }
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  RunReport report;
  try {
    if (config.strategies.empty()) {
      throw std::invalid_argument("at least one strategy required");
    }
    ParseStats stats;
    const auto panels = load_filtered_panels(config, &stats);
    report.dropped_rows = stats.dropped_rows;

    const auto results =
        run_all(panels, config.strategies, config.threads, report);
    if (results.empty()) {
      report.exit_code = 1;
      return report;
    }

    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    write_summary(dir, results);
    write_boxplot(dir, results);
    if (config.write_regret) write_regret(dir, results, panels);
    if (config.write_weights) write_weights(dir, results, panels);
  } catch (const std::exception& e) {
    report.exit_code = 1;
    report.errors.push_back(e.what());
  }
  return report;
}

RunReport run_oracles(const ExperimentConfig& config) {
  RunReport report;
  try {
    const auto panels = load_filtered_panels(config);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    auto out = open_output(dir / "oracles.csv");

    const auto& names = panels.begin()->second.expert_names;
    out << "station_id,lead_time,best_expert_name,best_expert_rmse,"
           "compound_rmse,convex_rmse";
    for (const auto& n : names) out << ",w_" << n;
    out << '\n';

    const LossSpec spec;  // oracles are square-loss quantities
    std::vector<const ForecastPanel*> ordered;
    std::vector<const StreamKey*> keys;
    for (const auto& [key, panel] : panels) {
      keys.push_back(&key);
      ordered.push_back(&panel);
    }
    std::vector<std::string> rows(ordered.size());
    std::vector<std::string> errors(ordered.size());
    parallel_for(ordered.size(), config.threads, [&](std::size_t i) {
      try {
        const auto& panel = *ordered[i];
        const auto be = best_expert(panel, spec);
        const auto bc = best_compound(panel, spec);
        const auto cv = best_convex(panel);
        std::ostringstream line;
        line.precision(12);
        line << keys[i]->station_id << ',' << keys[i]->lead_time_hours << ','
             << panel.expert_names[be.index] << ',' << be.rmse << ','
             << bc.rmse << ',' << cv.rmse;
        for (std::size_t j = 0; j < panel.num_experts(); ++j) {
          line << ',' << cv.q[j];
        }
        rows[i] = line.str();
      } catch (const std::exception& e) {
        errors[i] = keys[i]->label() + ": " + e.what();
      }
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!errors[i].empty()) {
        ++report.streams_failed;
        report.errors.push_back(errors[i]);
        continue;
      }
      ++report.streams_ok;
      out << rows[i] << '\n';
    }
    if (report.streams_failed > 0) {
      report.exit_code = report.streams_ok > 0 ? 2 : 1;
    }
  } catch (const std::exception& e) {
    report.exit_code = 1;
    report.errors.push_back(e.what());
  }
  return report;
}

RunReport run_sweep(const ExperimentConfig& config,
                    const std::vector<std::size_t>& windows) {
  RunReport report;
  try {
    if (config.strategies.empty()) {
      throw std::invalid_argument("at least one strategy required");
    }
    if (windows.empty()) {
      throw std::invalid_argument("at least one window required");
    }
    if (!std::is_sorted(windows.begin(), windows.end())) {
      throw std::invalid_argument("windows must be sorted ascending");
    }
    const auto panels = load_filtered_panels(config);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    auto out = open_output(dir / "sweep.csv");
    out << "window,strategy,pooled_rmse\n";

    for (const std::size_t w : windows) {
      auto strategies = config.strategies;
      for (auto& s : strategies) s.window = w;
      RunReport sub;
      const auto results = run_all(panels, strategies, config.threads, sub);
      report.streams_failed += sub.streams_failed;
      for (const auto& e : sub.errors) report.errors.push_back(e);
      std::set<std::string> labels;
      for (const auto& r : results) labels.insert(r.strategy_label);
      for (std::size_t si = 0; si < strategies.size(); ++si) {
        const std::string label = strategies[si].label();
        if (labels.count(label) == 0) continue;
        out << w << ',' << config.strategies[si].label() << ','
            << pooled_rmse(results, label) << '\n';
      }
      if (sub.exit_code != 0) report.exit_code = 2;
    }
    report.streams_ok = panels.size();
  } catch (const std::exception& e) {
    report.exit_code = 1;
    report.errors.push_back(e.what());
  }
  return report;
}

}  // namespace aggcast
