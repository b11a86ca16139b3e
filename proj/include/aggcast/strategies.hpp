#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aggcast/core.hpp"
#include "aggcast/losses.hpp"

namespace aggcast {

enum class StrategyKind { uniform, ewa, boa, mlprod, mlpol };

std::string to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& s);

enum class LossScaling { none, running_max };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::ewa;
  bool gradient_trick = false;
  std::optional<std::size_t> window;  // sliding window in steps, >= 1
  LossSpec loss;
  LossScaling scaling = LossScaling::none;

  // e.g. "boa+grad+w500"
  std::string label() const;
};

// Constant of the adaptive EWA learning rate, sqrt(2(sqrt(2)-1)/(e-2)).
inline constexpr double kEwaRateConstant = 1.0739392506778522;

// softmax of -eta * L, shifted by the max argument; exponent clamped at
// -700 so extreme learning rates still yield finite weights. eta -> 0
// recovers the uniform vector, eta -> inf follow-the-leader.
WeightVector exponential_weights(double eta, std::span<const double> cum_losses);

/// One online aggregation state machine. Strictly sequential; value-like,
/// may be moved between threads but a single stream's timeline never runs
/// in parallel.
class Strategy {
 public:
  Strategy(StrategyConfig config, std::size_t num_experts);

  const StrategyConfig& config() const { return config_; }
  std::size_t num_experts() const { return n_; }
  const WeightVector& weights() const { return weights_; }
  std::size_t steps() const { return steps_; }

  // MLprod potential clamps hit so far (diagnostic).
  std::size_t clamp_events() const { return clamp_events_; }

  // Predict with the pre-update weights, then update from (x, y). Throws
  // std::invalid_argument on non-finite input without touching state.
  Prediction step(std::span<const double> x, double y);

  // Direct loss feed for the bounded-loss setting: the per-expert losses
  // are taken as given (no gradient trick), the aggregation's implied loss
  // is w . losses. Returns that implied loss.
  double update_with_losses(std::span<const double> raw_losses);

 private:
  void dispatch_update(std::span<const double> fed);
  void ewa_update(std::span<const double> fed);
  void boa_update(std::span<const double> excess);
  void mlprod_update(std::span<const double> excess);
  void mlpol_update(std::span<const double> excess);
  void apply_scaling(std::vector<double>& fed);
  void trim_window(std::size_t capacity);

  StrategyConfig config_;
  std::size_t n_ = 0;
  WeightVector weights_;
  std::size_t steps_ = 0;
  std::size_t clamp_events_ = 0;
  double running_max_ = 0.0;

  // EWA accumulators (cumulative mode).
  std::vector<double> ewa_cum_;  // L_i
  double ewa_range_ = 0.0;       // E_t, max pairwise loss gap
  double ewa_var_sum_ = 0.0;     // V_t

  // BOA.
  std::vector<double> boa_var_;        // V_i
  std::vector<double> boa_eta_prev_;   // eta_{i,t-1}
  std::vector<double> boa_surr_cum_;   // Ltilde_i

  // MLprod, tracked in log space: logp_i is the log of Alg-style potential.
  std::vector<double> ml_var_;
  std::vector<double> ml_eta_prev_;
  std::vector<double> ml_logp_;

  // MLpol.
  std::vector<double> pol_regret_;  // Rexc_i
  std::vector<double> pol_var_;

  // Sliding-window ring buffer of per-step raw quantities, as they were
  // computed online. Cumulative sums / maxima are recomputed over the
  // trailing window in chronological order, so window >= T reproduces the
  // cumulative accumulators bit for bit.
  struct StepRecord {
    std::vector<double> fed;        // EWA: losses fed to the update
    std::vector<double> excess;     // second-order strategies
    std::vector<double> surrogate;  // BOA ltilde, with the then-current eta
    double var = 0.0;               // EWA Var_s under w_s
    double range = 0.0;             // EWA per-step max pairwise gap
  };
  std::deque<StepRecord> window_buf_;
};

}  // namespace aggcast
