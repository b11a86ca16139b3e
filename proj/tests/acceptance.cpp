// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits non-zero if any required criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "aggcast/evaluation.hpp"
#include "aggcast/experiment.hpp"
#include "aggcast/ingest.hpp"
#include "aggcast/losses.hpp"
#include "aggcast/oracles.hpp"
#include "aggcast/strategies.hpp"
#include "aggcast/synthetic.hpp"

using namespace aggcast;

namespace {

const LossSpec kSquare{LossKind::square, {}};

WeightVector random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = e(rng) + 1e-12;
  return WeightVector::from_unnormalized(std::move(v));
}

// --- 1. algebraic identities ------------------------------------------------

bool criterion1() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 6;
    const auto w = random_simplex(rng, n);
    std::vector<double> x(n);
    for (auto& xi : x) xi = u(rng);
    const double y = u(rng);
    const auto d = decompose_square_loss(w, x, y);
    const double yh = predict(w, x);
    if (std::abs(d.mean_term - d.diversity_term - (yh - y) * (yh - y)) >
        1e-10 * std::max(1.0, d.mean_term)) {
      return false;
    }
  }
  for (int k = 0; k < 100; ++k) {
    const double yh = u(rng), y = u(rng);
    const double g = loss_subgradient(kSquare, yh, y);
    if (std::abs(g * g - 4.0 * loss(kSquare, yh, y)) >
        1e-10 * std::max(1.0, 4.0 * loss(kSquare, yh, y))) {
      return false;
    }
  }
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto w = random_simplex(rng, n);
    std::vector<double> x(n);
    for (auto& xi : x) xi = u(rng);
    const double y = u(rng);
    const auto exc = excess_losses(expert_losses(kSquare, x, y), w);
    const auto lin = linearized_losses(kSquare, w, x, y);
    double m1 = 0.0, m2 = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      m1 += w[i] * exc[i];
      m2 += w[i] * lin[i];
      scale = std::max({scale, std::abs(exc[i]), std::abs(lin[i])});
    }
    if (std::abs(m1) / scale > 1e-12 || std::abs(m2) / scale > 1e-12) {
      return false;
    }
  }
  return true;
}

// --- 2. five-step hand traces -----------------------------------------------

bool criterion2() {
  const std::vector<std::vector<double>> losses{
      {0.0, 1.0}, {1.0, 0.0}, {0.25, 0.75}, {1.0, 0.5}, {0.0, 1.0}};

  struct Case {
    StrategyKind kind;
    std::vector<std::vector<double>> expected;  // post-update weights
  };
  const std::vector<Case> cases{
      {StrategyKind::ewa,
       {{0.7310585786300049, 0.2689414213699951},
        {0.5, 0.5},
        {0.6224593312018546, 0.37754066879814546},
        {0.5, 0.5},
        {0.7288255230252817, 0.2711744769747183}}},
      {StrategyKind::boa,
       {{0.7938678796628766, 0.20613212033712347},
        {0.7764825512260878, 0.22351744877391225},
        {0.8473664225509678, 0.1526335774490321},
        {0.8084069045155918, 0.19159309548440817},
        {0.9054828048220832, 0.09451719517791678}}},
      {StrategyKind::mlprod,
       {{0.625, 0.375},
        {0.5078125, 0.4921875},
        {0.5702972412109375, 0.4297027587890625},
        {0.5090326667414047, 0.4909673332585953},
        {0.633991872207174, 0.36600812779282593}}},
      {StrategyKind::mlpol,
       {{1.0, 0.0},
        {0.6428571428571429, 0.3571428571428571},
        {0.874625748502994, 0.12537425149700596},
        {0.6643104155672119, 0.3356895844327881},
        {1.0, 0.0}}}};

  for (const auto& c : cases) {
    StrategyConfig cfg;
    cfg.kind = c.kind;
    Strategy s(cfg, 2);
    for (std::size_t t = 0; t < losses.size(); ++t) {
      s.update_with_losses(losses[t]);
      for (std::size_t i = 0; i < 2; ++i) {
        if (std::abs(s.weights()[i] - c.expected[t][i]) > 1e-3) {
          std::cerr << "  trace mismatch: " << to_string(c.kind) << " step "
                    << t + 1 << " expert " << i << " got " << s.weights()[i]
                    << " want " << c.expected[t][i] << "\n";
          return false;
        }
      }
    }
  }
  return true;
}

// --- 3. adaptive EWA regret bound -------------------------------------------

bool criterion3() {
  const int T = 2000, N = 5;
  const double bound = 2.0 * std::sqrt((T / 2.0) * std::log(double(N)));
  for (int seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // heterogeneous expert quality so the best expert is non-trivial
    std::vector<double> level(N);
    for (auto& l : level) l = u(rng);
    StrategyConfig cfg;
    cfg.kind = StrategyKind::ewa;
    Strategy s(cfg, N);
    double agg = 0.0;
    std::vector<double> cum(N, 0.0);
    std::vector<double> l(N);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < N; ++i) {
        l[i] = std::clamp(level[i] * u(rng) + 0.1 * u(rng), 0.0, 1.0);
      }
      agg += s.update_with_losses(l);
      for (int i = 0; i < N; ++i) cum[i] += l[i];
    }
    for (int i = 0; i < N; ++i) {
      if (agg - cum[i] > bound) {
        std::cerr << "  seed " << seed << ": regret vs expert " << i << " = "
                  << agg - cum[i] << " > " << bound << "\n";
        return false;
      }
    }
  }
  return true;
}

// --- 4. sublinear mean regret -----------------------------------------------

bool criterion4() {
  SyntheticStreamSpec spec;
  spec.kind = SyntheticKind::iid_dominant;
  spec.T = 2000;
  spec.N = 5;
  spec.seed = 21;
  const auto panel = generate_synthetic(spec);
  const StreamKey key{"synth", 24};

  for (const auto kind :
       {StrategyKind::boa, StrategyKind::mlprod, StrategyKind::mlpol}) {
    StrategyConfig cfg;
    cfg.kind = kind;
    cfg.gradient_trick = true;
    const auto res = run_stream(panel, key, cfg);
    double agg = 0.0;
    std::vector<double> cum(spec.N, 0.0);
    double mean_200 = 0.0;
    for (std::size_t t = 0; t < res.agg_losses.size(); ++t) {
      agg += res.agg_losses[t];
      for (std::size_t i = 0; i < spec.N; ++i) {
        cum[i] += res.expert_losses[t][i];
      }
      if (t + 1 == 200) {
        mean_200 =
            (agg - *std::min_element(cum.begin(), cum.end())) / 200.0;
      }
    }
    const double mean_final =
        (agg - *std::min_element(cum.begin(), cum.end())) / 2000.0;
    // non-positive final mean regret (at or below best-expert parity) is
    // stronger than the required 4x shrink
    if (!(mean_final < 0.25 * mean_200 || mean_final <= 0.0)) {
      std::cerr << "  " << to_string(kind) << ": mean regret " << mean_final
                << " at T=2000 vs " << mean_200 << " at T=200\n";
      return false;
    }
  }
  return true;
}

// --- 5. oracle correctness --------------------------------------------------

bool criterion5() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 20; ++k) {
    ForecastPanel p;
    p.expert_names = {"e1", "e2", "e3"};
    for (int t = 0; t < 50; ++t) {
      PanelRow row;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "2020-%02d-%02d", 1 + t / 28,
                    1 + t % 28);
      row.date = buf;
      row.experts = {u(rng), u(rng), u(rng)};
      row.obs = u(rng);
      p.rows.push_back(std::move(row));
    }
    const auto sol = best_convex(p);
    double grid_best = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= 100; ++a) {
      for (int b = 0; b <= 100 - a; ++b) {
        const double q0 = a / 100.0, q1 = b / 100.0, q2 = 1.0 - q0 - q1;
        double f = 0.0;
        for (const auto& row : p.rows) {
          const double r = q0 * row.experts[0] + q1 * row.experts[1] +
                           q2 * row.experts[2] - row.obs;
          f += r * r;
        }
        grid_best = std::min(grid_best, f);
      }
    }
    if (sol.objective > grid_best + 1e-3) {
      std::cerr << "  panel " << k << ": objective " << sol.objective
                << " vs grid " << grid_best << "\n";
      return false;
    }
    const auto be = best_expert(p, kSquare);
    const auto bc = best_compound(p, kSquare);
    if (sol.objective > be.cumulative_loss * (1 + 1e-9) + 1e-9) return false;
    if (bc.cumulative_loss > be.cumulative_loss * (1 + 1e-9) + 1e-9) {
      return false;
    }
  }
  return true;
}

// --- 6. window consistency --------------------------------------------------

double mean_weight_variance(const std::vector<std::vector<double>>& weights) {
  if (weights.empty()) return 0.0;
  const std::size_t n = weights[0].size();
  const double t_count = static_cast<double>(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& w : weights) mean += w[i];
    mean /= t_count;
    double var = 0.0;
    for (const auto& w : weights) var += (w[i] - mean) * (w[i] - mean);
    total += var / t_count;
  }
  return total / static_cast<double>(n);
}

bool criterion6() {
  SyntheticStreamSpec spec;
  spec.kind = SyntheticKind::biased_quantile_pair;
  spec.T = 1253;
  spec.N = 8;
  spec.seed = 41;
  const auto panel = generate_synthetic(spec);
  const StreamKey key{"synth", 24};

  for (const auto kind : {StrategyKind::ewa, StrategyKind::boa,
                          StrategyKind::mlprod, StrategyKind::mlpol}) {
    StrategyConfig plain;
    plain.kind = kind;
    plain.gradient_trick = true;
    StrategyConfig full = plain;
    full.window = spec.T;
    const auto a = run_stream(panel, key, plain);
    const auto b = run_stream(panel, key, full);
    for (std::size_t t = 0; t < a.predictions.size(); ++t) {
      if (std::abs(a.predictions[t] - b.predictions[t]) > 1e-12) {
        std::cerr << "  " << to_string(kind) << ": window=T diverges at step "
                  << t << "\n";
        return false;
      }
    }
  }

  StrategyConfig boa;
  boa.kind = StrategyKind::boa;
  boa.gradient_trick = true;
  StrategyConfig boa_w = boa;
  boa_w.window = 500;
  const double v_plain =
      mean_weight_variance(run_stream(panel, key, boa).weights);
  const double v_win =
      mean_weight_variance(run_stream(panel, key, boa_w).weights);
  if (!(v_win > v_plain)) {
    std::cerr << "  windowed weight variance " << v_win
              << " not above unwindowed " << v_plain << "\n";
    return false;
  }
  return true;
}

// --- 7. beating uniform and the best expert ---------------------------------

bool criterion7() {
  const int kStreams = 10;
  SyntheticStreamSpec spec;
  spec.kind = SyntheticKind::biased_quantile_pair;
  spec.T = 1253;
  spec.N = 8;
  std::vector<ForecastPanel> panels;
  for (int s = 0; s < kStreams; ++s) {
    spec.seed = 100 + s;
    panels.push_back(generate_synthetic(spec));
  }

  auto pooled = [&](const StrategyConfig& cfg) {
    SquaredErrorPool pool;
    for (int s = 0; s < kStreams; ++s) {
      const auto res = run_stream(panels[s], StreamKey{"S", 24}, cfg);
      for (std::size_t t = 0; t < res.predictions.size(); ++t) {
        pool.add(res.predictions[t], res.observations[t]);
      }
    }
    return pool.rmse();
  };

  StrategyConfig uni;
  uni.kind = StrategyKind::uniform;
  const double uniform_rmse = pooled(uni);

  double best_expert_rmse = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < static_cast<std::size_t>(spec.N); ++i) {
    SquaredErrorPool pool;
    for (const auto& panel : panels) {
      for (const auto& row : panel.rows) pool.add(row.experts[i], row.obs);
    }
    best_expert_rmse = std::min(best_expert_rmse, pool.rmse());
  }

  bool ok = true;
  for (const auto kind : {StrategyKind::ewa, StrategyKind::boa,
                          StrategyKind::mlprod, StrategyKind::mlpol}) {
    StrategyConfig cfg;
    cfg.kind = kind;
    cfg.gradient_trick = true;
    const double r = pooled(cfg);
    if (!(r < uniform_rmse && r < best_expert_rmse)) {
      std::cerr << "  " << to_string(kind) << ": rmse " << r << " vs uniform "
                << uniform_rmse << ", best expert " << best_expert_rmse
                << "\n";
      ok = false;
    }
  }
  return ok;
}

// --- 8. optional replication on an external verification panel ---------------

// Set AGGCAST_DATASET to a CSV in the standard panel schema (or provide
// AGGCAST_COLUMN_MAP) to enable. Pooled RMSE of the four gradient-trick
// strategies is checked against the published reference values.
int criterion8() {  // 1 pass, 0 fail, -1 skipped
  const char* data = std::getenv("AGGCAST_DATASET");
  if (data == nullptr) return -1;
  const char* map_path = std::getenv("AGGCAST_COLUMN_MAP");
  ExperimentConfig cfg;
  cfg.input_path = data;
  if (map_path != nullptr) cfg.column_map_path = map_path;
  const auto panels = load_filtered_panels(cfg);
  const struct {
    StrategyKind kind;
    double expected;
  } targets[] = {{StrategyKind::ewa, 1.25},
                 {StrategyKind::boa, 1.24},
                 {StrategyKind::mlpol, 1.24},
                 {StrategyKind::mlprod, 1.25}};
  bool ok = true;
  for (const auto& target : targets) {
    StrategyConfig sc;
    sc.kind = target.kind;
    sc.gradient_trick = true;
    SquaredErrorPool pool;
    for (const auto& [key, panel] : panels) {
      const auto res = run_stream(panel, key, sc);
      for (std::size_t t = 0; t < res.predictions.size(); ++t) {
        pool.add(res.predictions[t], res.observations[t]);
      }
    }
    const double r = pool.rmse();
    std::cerr << "  " << to_string(target.kind) << ": pooled rmse " << r
              << " (reference " << target.expected << ")\n";
    if (std::abs(r - target.expected) > 0.03) ok = false;
  }
  return ok ? 1 : 0;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    bool (*fn)();
  };
  const Entry entries[] = {
      {"1 algebraic identities", &criterion1},
      {"2 five-step hand traces", &criterion2},
      {"3 adaptive EWA regret bound", &criterion3},
      {"4 sublinear mean regret", &criterion4},
      {"5 hindsight oracle correctness", &criterion5},
      {"6 sliding-window consistency", &criterion6},
      {"7 beats uniform and best expert", &criterion7},
  };

  bool all_ok = true;
  for (const auto& e : entries) {
    const bool ok = e.fn();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << e.name << "\n";
    all_ok = all_ok && ok;
  }

  const int r8 = criterion8();
  if (r8 < 0) {
    std::cout << "SKIP criterion 8 external dataset replication "
                 "(AGGCAST_DATASET not set)\n";
  } else {
    std::cout << (r8 == 1 ? "PASS" : "FAIL")
              << " criterion 8 external dataset replication\n";
    all_ok = all_ok && r8 == 1;
  }

  return all_ok ? 0 : 1;
}
