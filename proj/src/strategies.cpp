#include "aggcast/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aggcast {

namespace {

constexpr double kExpClamp = 700.0;
constexpr double kPotentialFloor = 1e-300;

double clamp_exp_arg(double a) {
  return std::clamp(a, -kExpClamp, kExpClamp);
}

// Smallest power of two B = 2^k (k integer, possibly negative) with e <= B.
double pow2_ceiling(double e) {
  const int k = static_cast<int>(std::ceil(std::log2(e)));
  return std::ldexp(1.0, k);
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string("non-finite ") + what);
    }
  }
}

}  // namespace

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::uniform: return "uniform";
    case StrategyKind::ewa: return "ewa";
    case StrategyKind::boa: return "boa";
    case StrategyKind::mlprod: return "mlprod";
    case StrategyKind::mlpol: return "mlpol";
  }
  return "?";
}

StrategyKind strategy_kind_from_string(const std::string& s) {
  if (s == "uniform") return StrategyKind::uniform;
  if (s == "ewa") return StrategyKind::ewa;
  if (s == "boa") return StrategyKind::boa;
  if (s == "mlprod") return StrategyKind::mlprod;
  if (s == "mlpol") return StrategyKind::mlpol;
  throw std::invalid_argument("unknown strategy kind: " + s);
}

std::string StrategyConfig::label() const {
  std::string s = to_string(kind);
  if (gradient_trick) s += "+grad";
  if (window) s += "+w" + std::to_string(*window);
  if (loss.kind != LossKind::square) s += "+" + to_string(loss.kind);
  if (scaling == LossScaling::running_max) s += "+rmax";
  return s;
}

WeightVector exponential_weights(double eta,
                                 std::span<const double> cum_losses) {
  // shift by the best cumulative loss before clamping, so extreme rates
  // degrade to follow-the-leader rather than to uniform
  const double lmin =
      *std::min_element(cum_losses.begin(), cum_losses.end());
  std::vector<double> u(cum_losses.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = std::exp(clamp_exp_arg(-eta * (cum_losses[i] - lmin)));
  }
  return WeightVector::from_unnormalized(std::move(u));
}

Strategy::Strategy(StrategyConfig config, std::size_t num_experts)
    : config_(std::move(config)), n_(num_experts) {
  if (n_ == 0) throw std::invalid_argument("strategy needs >= 1 expert");
  if (config_.window && *config_.window == 0) {
    throw std::invalid_argument("window must be >= 1");
  }
  weights_ = WeightVector::uniform(n_);

  ewa_cum_.assign(n_, 0.0);
  boa_var_.assign(n_, 0.0);
  boa_eta_prev_.assign(n_, 0.0);  // Alg-3 initialization eta_{i,0} = 0
  boa_surr_cum_.assign(n_, 0.0);
  ml_var_.assign(n_, 0.0);
  // eta_{i,0} = min{0.5, sqrt(ln N)} so the first exponent ratio is defined.
  const double eta0 =
      n_ > 1 ? std::min(0.5, std::sqrt(std::log(static_cast<double>(n_))))
             : 0.5;
  ml_eta_prev_.assign(n_, eta0);
  ml_logp_.assign(n_, std::log(1.0 / static_cast<double>(n_)));
  pol_regret_.assign(n_, 0.0);
  pol_var_.assign(n_, 0.0);
}

Prediction Strategy::step(std::span<const double> x, double y) {
  if (x.size() != n_) {
    throw std::invalid_argument("step: expert dimension mismatch");
  }
  check_finite(x, "expert prediction");
  if (!std::isfinite(y)) {
    throw std::invalid_argument("non-finite observation");
  }

  Prediction pred;
  pred.weights_used = weights_;
  pred.value = predict(weights_, x);

  std::vector<double> fed =
      config_.gradient_trick
          ? linearized_losses(config_.loss, weights_, x, y)
          : expert_losses(config_.loss, x, y);
  dispatch_update(fed);
  ++steps_;
  return pred;
}

double Strategy::update_with_losses(std::span<const double> raw_losses) {
  if (raw_losses.size() != n_) {
    throw std::invalid_argument("update: loss dimension mismatch");
  }
  check_finite(raw_losses, "loss");
  double implied = 0.0;
  for (std::size_t i = 0; i < n_; ++i) implied += weights_[i] * raw_losses[i];
  std::vector<double> fed(raw_losses.begin(), raw_losses.end());
  dispatch_update(fed);
  ++steps_;
  return implied;
}

void Strategy::apply_scaling(std::vector<double>& fed) {
  if (config_.scaling != LossScaling::running_max) return;
  for (double l : fed) running_max_ = std::max(running_max_, std::abs(l));
  if (running_max_ > 0.0) {
    for (double& l : fed) l /= running_max_;
  }
}

void Strategy::trim_window(std::size_t capacity) {
  while (window_buf_.size() > capacity) window_buf_.pop_front();
}

void Strategy::dispatch_update(std::span<const double> fed_in) {
  if (n_ == 1) return;  // single expert: every strategy is a passthrough
  std::vector<double> fed(fed_in.begin(), fed_in.end());
  apply_scaling(fed);

  switch (config_.kind) {
    case StrategyKind::uniform:
      return;
    case StrategyKind::ewa:
      ewa_update(fed);
      return;
    case StrategyKind::boa:
    case StrategyKind::mlprod:
    case StrategyKind::mlpol: {
      // Linearized losses are already centered; re-centering is exact there
      // and required for raw losses.
      std::vector<double> exc = excess_losses(fed, weights_);
      if (config_.kind == StrategyKind::boa) {
        boa_update(exc);
      } else if (config_.kind == StrategyKind::mlprod) {
        mlprod_update(exc);
      } else {
        mlpol_update(exc);
      }
      return;
    }
  }
}

void Strategy::ewa_update(std::span<const double> fed) {
  // Var_t under the pre-update weights.
  double mean = 0.0, msq = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    mean += weights_[i] * fed[i];
    msq += weights_[i] * fed[i] * fed[i];
  }
  const double var = std::max(msq - mean * mean, 0.0);
  const auto [lo, hi] = std::minmax_element(fed.begin(), fed.end());
  const double range = *hi - *lo;

  if (config_.window) {
    StepRecord rec;
    rec.fed.assign(fed.begin(), fed.end());
    rec.var = var;
    rec.range = range;
    window_buf_.push_back(std::move(rec));
    trim_window(*config_.window);

    std::fill(ewa_cum_.begin(), ewa_cum_.end(), 0.0);
    ewa_var_sum_ = 0.0;
    ewa_range_ = 0.0;
    for (const auto& r : window_buf_) {
      for (std::size_t i = 0; i < n_; ++i) ewa_cum_[i] += r.fed[i];
      ewa_var_sum_ += r.var;
      ewa_range_ = std::max(ewa_range_, r.range);
    }
  } else {
    for (std::size_t i = 0; i < n_; ++i) ewa_cum_[i] += fed[i];
    ewa_var_sum_ += var;
    ewa_range_ = std::max(ewa_range_, range);
  }

  // Degenerate V or E: the adaptive rate is undefined, keep the current
  // weights (uniform until the first informative step).
  if (!(ewa_var_sum_ > 0.0) || !(ewa_range_ > 0.0)) return;

  const double inv_b = 1.0 / pow2_ceiling(ewa_range_);
  const double eta =
      std::min(inv_b, kEwaRateConstant *
                          std::sqrt(std::log(static_cast<double>(n_)) /
                                    ewa_var_sum_));
  weights_ = exponential_weights(eta, ewa_cum_);
}

void Strategy::boa_update(std::span<const double> excess) {
  std::vector<double> surr(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    surr[i] = excess[i] + boa_eta_prev_[i] * excess[i] * excess[i];
  }

  if (config_.window) {
    StepRecord rec;
    rec.excess.assign(excess.begin(), excess.end());
    rec.surrogate = surr;
    window_buf_.push_back(std::move(rec));
    trim_window(*config_.window);

    std::fill(boa_var_.begin(), boa_var_.end(), 0.0);
    std::fill(boa_surr_cum_.begin(), boa_surr_cum_.end(), 0.0);
    for (const auto& r : window_buf_) {
      for (std::size_t i = 0; i < n_; ++i) {
        boa_var_[i] += 2.2 * r.excess[i] * r.excess[i];
        boa_surr_cum_[i] += r.surrogate[i];
      }
    }
  } else {
    for (std::size_t i = 0; i < n_; ++i) {
      boa_var_[i] += 2.2 * excess[i] * excess[i];
      boa_surr_cum_[i] += surr[i];
    }
  }

  bool any_positive = false;
  for (std::size_t i = 0; i < n_; ++i) {
    boa_eta_prev_[i] = boa_var_[i] > 0.0 ? std::sqrt(1.0 / boa_var_[i]) : 0.0;
    any_positive = any_positive || boa_eta_prev_[i] > 0.0;
  }
  if (!any_positive) {
    weights_ = WeightVector::uniform(n_);
    return;
  }

  // w_{i,t+1} proportional to w_{i,1} eta_i exp(-eta_i Ltilde_i); the
  // uniform w_1 cancels in the normalization.
  std::vector<double> a(n_, -std::numeric_limits<double>::infinity());
  double amax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_; ++i) {
    if (boa_eta_prev_[i] > 0.0) {
      a[i] = std::log(boa_eta_prev_[i]) +
             clamp_exp_arg(-boa_eta_prev_[i] * boa_surr_cum_[i]);
      amax = std::max(amax, a[i]);
    }
  }
  std::vector<double> u(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (std::isfinite(a[i])) u[i] = std::exp(std::max(a[i] - amax, -kExpClamp));
  }
  weights_ = WeightVector::from_unnormalized(std::move(u));
}

void Strategy::mlprod_update(std::span<const double> excess) {
  if (config_.window) {
    StepRecord rec;
    rec.excess.assign(excess.begin(), excess.end());
    window_buf_.push_back(std::move(rec));
    trim_window(*config_.window);

    std::fill(ml_var_.begin(), ml_var_.end(), 0.0);
    for (const auto& r : window_buf_) {
      for (std::size_t i = 0; i < n_; ++i) {
        ml_var_[i] += r.excess[i] * r.excess[i];
      }
    }
  } else {
    for (std::size_t i = 0; i < n_; ++i) ml_var_[i] += excess[i] * excess[i];
  }

  const double logn = std::log(static_cast<double>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    const double eta = std::min(0.5, std::sqrt(logn / (1.0 + ml_var_[i])));
    // Potential recurrence p <- (p (1 - eta_prev excess))^{eta/eta_prev},
    // carried in log space so long runs never underflow. The base is floored
    // at 1e-300 when an excess loss is large enough to make it nonpositive.
    double base = 1.0 - ml_eta_prev_[i] * excess[i];
    if (base < kPotentialFloor) {
      base = kPotentialFloor;
      ++clamp_events_;
    }
    ml_logp_[i] =
        (eta / ml_eta_prev_[i]) * (ml_logp_[i] + std::log(base));
    ml_eta_prev_[i] = eta;
  }

  // Prediction weights: eta_i p_i, normalized.
  std::vector<double> a(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    a[i] = std::log(ml_eta_prev_[i]) + ml_logp_[i];
  }
  const double m = *std::max_element(a.begin(), a.end());
  std::vector<double> u(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    u[i] = std::exp(std::max(a[i] - m, -kExpClamp));
  }
  weights_ = WeightVector::from_unnormalized(std::move(u));
}

void Strategy::mlpol_update(std::span<const double> excess) {
  if (config_.window) {
    StepRecord rec;
    rec.excess.assign(excess.begin(), excess.end());
    window_buf_.push_back(std::move(rec));
    trim_window(*config_.window);

    std::fill(pol_regret_.begin(), pol_regret_.end(), 0.0);
    std::fill(pol_var_.begin(), pol_var_.end(), 0.0);
    for (const auto& r : window_buf_) {
      for (std::size_t i = 0; i < n_; ++i) {
        pol_regret_[i] -= r.excess[i];
        pol_var_[i] += r.excess[i] * r.excess[i];
      }
    }
  } else {
    for (std::size_t i = 0; i < n_; ++i) {
      pol_regret_[i] -= excess[i];
      pol_var_[i] += excess[i] * excess[i];
    }
  }

  std::vector<double> u(n_);
  double den = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double eta = 1.0 / (1.0 + pol_var_[i]);
    u[i] = eta * std::max(pol_regret_[i], 0.0);
    den += u[i];
  }
  // All instantaneous regrets nonpositive: 0/0 in the normalization,
  // reset to uniform as at initialization.
  weights_ = den > 0.0 ? WeightVector::from_unnormalized(std::move(u))
                       : WeightVector::uniform(n_);
}

}  // namespace aggcast
