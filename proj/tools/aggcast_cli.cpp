#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aggcast/experiment.hpp"
#include "aggcast/ingest.hpp"
#include "aggcast/synthetic.hpp"

namespace {

using namespace aggcast;

struct CommonOptions {
  std::string input;
  std::string out = "out";
  std::vector<std::string> strategy_names;
  bool gradient_trick = false;
  std::size_t window = 0;
  std::string loss = "square";
  std::string loss_scaling = "none";
  std::vector<std::string> exclude_experts;
  std::vector<std::string> include_experts;
  std::vector<std::string> stations;
  std::vector<int> lead_times;
  std::string column_map;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_strategies) {
  cmd->add_option("--input", opt.input, "input forecast CSV")->required();
  cmd->add_option("--out", opt.out, "output directory");
  if (with_strategies) {
    cmd->add_option("--strategy", opt.strategy_names,
                    "uniform|ewa|boa|mlprod|mlpol (repeatable)")
        ->required();
    cmd->add_flag("--gradient-trick", opt.gradient_trick,
                  "update on linearized losses");
    cmd->add_option("--window", opt.window, "sliding window in steps");
    cmd->add_option("--loss", opt.loss, "square|absolute|mape");
    cmd->add_option("--loss-scaling", opt.loss_scaling, "none|running-max");
  }
  cmd->add_option("--exclude-experts", opt.exclude_experts,
                  "glob pattern, matching experts are dropped (repeatable)");
  cmd->add_option("--include-experts", opt.include_experts,
                  "glob pattern, only matching experts are kept (repeatable)");
  cmd->add_option("--stations", opt.stations, "station filter")
      ->delimiter(',');
  cmd->add_option("--lead-times", opt.lead_times, "lead-time filter (hours)")
      ->delimiter(',');
  cmd->add_option("--column-map", opt.column_map,
                  "key=value file remapping input column names");
  cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
}

ExperimentConfig to_config(const CommonOptions& opt) {
  ExperimentConfig cfg;
  cfg.input_path = opt.input;
  cfg.output_dir = opt.out;
  cfg.include_experts = opt.include_experts;
  cfg.exclude_experts = opt.exclude_experts;
  cfg.stations = opt.stations;
  cfg.lead_times = opt.lead_times;
  cfg.threads = opt.threads;
  if (!opt.column_map.empty()) cfg.column_map_path = opt.column_map;
  for (const auto& name : opt.strategy_names) {
    StrategyConfig s;
    s.kind = strategy_kind_from_string(name);
    s.gradient_trick = opt.gradient_trick;
    if (opt.window > 0) s.window = opt.window;
    s.loss.kind = loss_kind_from_string(opt.loss);
    if (opt.loss_scaling == "running-max") {
      s.scaling = LossScaling::running_max;
    } else if (opt.loss_scaling != "none") {
      throw CLI::ValidationError("--loss-scaling must be none or running-max");
    }
    cfg.strategies.push_back(std::move(s));
  }
  return cfg;
}

int finish(const RunReport& report) {
  for (const auto& e : report.errors) {
    std::fprintf(stderr, "error: %s\n", e.c_str());
  }
  std::fprintf(stderr, "streams ok: %zu, failed: %zu, dropped rows: %zu\n",
               report.streams_ok, report.streams_failed, report.dropped_rows);
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online convex aggregation of competing point forecasts"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file replacing flags");

  CommonOptions run_opt;
  auto* run = app.add_subcommand("run", "run aggregations over all streams");
  add_common(run, run_opt, true);

  CommonOptions oracle_opt;
  auto* oracles = app.add_subcommand(
      "oracles", "hindsight oracles (best expert, compound, convex)");
  add_common(oracles, oracle_opt, false);

  CommonOptions sweep_opt;
  std::vector<std::size_t> windows;
  auto* sweep =
      app.add_subcommand("sweep", "re-run the pipeline per sliding window");
  add_common(sweep, sweep_opt, true);
  sweep->add_option("--windows", windows, "window sizes, ascending")
      ->required()
      ->delimiter(',');

  SyntheticStreamSpec synth_spec;
  std::string synth_kind = "iid_dominant";
  std::string synth_out = "synthetic.csv";
  std::size_t synth_streams = 1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic panel CSV");
  synth->add_option("--kind", synth_kind,
                    "iid_dominant|adversarial_alternating|seasonal_flip|"
                    "biased_quantile_pair");
  synth->add_option("--T", synth_spec.T, "steps per stream");
  synth->add_option("--N", synth_spec.N, "experts");
  synth->add_option("--seed", synth_spec.seed, "random seed");
  synth->add_option("--noise", synth_spec.noise, "noise scale");
  synth->add_option("--streams", synth_streams, "number of stations");
  synth->add_option("--out", synth_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return finish(run_experiment(to_config(run_opt)));
    }
    if (oracles->parsed()) {
      return finish(run_oracles(to_config(oracle_opt)));
    }
    if (sweep->parsed()) {
      return finish(run_sweep(to_config(sweep_opt), windows));
    }
    if (synth->parsed()) {
      synth_spec.kind = synthetic_kind_from_string(synth_kind);
      std::map<StreamKey, ForecastPanel> panels;
      for (std::size_t s = 0; s < synth_streams; ++s) {
        SyntheticStreamSpec spec = synth_spec;
        spec.seed = synth_spec.seed + s;
        panels.emplace(StreamKey{"S" + std::to_string(s + 1), 24},
                       generate_synthetic(spec));
      }
      const auto dir = std::filesystem::path(synth_out).parent_path();
      if (!dir.empty()) std::filesystem::create_directories(dir);
      write_panel_csv(synth_out, panels);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 1;
  }
  return 0;
}
