#include "aggcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aggcast {

double rmse(std::span<const double> predictions,
            std::span<const double> observations) {
  if (predictions.empty()) throw std::invalid_argument("rmse: empty input");
  if (predictions.size() != observations.size()) {
    throw std::invalid_argument("rmse: length mismatch");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - observations[i];
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(predictions.size()));
}

double SquaredErrorPool::rmse() const {
  if (count == 0) throw std::invalid_argument("rmse of empty pool");
  return std::sqrt(sum_sq / static_cast<double>(count));
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BoxStats five_number_summary(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summary of empty sample");
  std::sort(values.begin(), values.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (pos - static_cast<double>(lo)) *
                            (values[hi] - values[lo]);
  };
  BoxStats s;
  s.min = values.front();
  s.q1 = q(0.25);
  s.median = q(0.5);
  s.q3 = q(0.75);
  s.max = values.back();
  return s;
}

std::vector<std::vector<double>> regret_curve(
    std::span<const double> agg_losses,
    const std::vector<std::vector<double>>& expert_losses) {
  if (agg_losses.size() != expert_losses.size()) {
    throw std::invalid_argument("regret_curve: length mismatch");
  }
  std::vector<std::vector<double>> out(agg_losses.size());
  std::vector<double> cum;
  for (std::size_t t = 0; t < agg_losses.size(); ++t) {
    const auto& el = expert_losses[t];
    if (cum.empty()) cum.assign(el.size(), 0.0);
    if (el.size() != cum.size()) {
      throw std::invalid_argument("regret_curve: ragged expert losses");
    }
    for (std::size_t i = 0; i < cum.size(); ++i) {
      cum[i] += agg_losses[t] - el[i];
    }
    out[t] = cum;
  }
  return out;
}

}  // namespace aggcast
