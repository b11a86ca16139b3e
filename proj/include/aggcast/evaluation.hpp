#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "aggcast/core.hpp"

namespace aggcast {

// sqrt(mean squared error). Throws on empty or mismatched input.
double rmse(std::span<const double> predictions,
            std::span<const double> observations);

struct SquaredErrorPool {
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double prediction, double observation) {
    const double d = prediction - observation;
    sum_sq += d * d;
    ++count;
  }
  void merge(const SquaredErrorPool& other) {
    sum_sq += other.sum_sq;
    count += other.count;
  }
  double rmse() const;
};

struct BoxStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Linear-interpolation quantile of the sorted sample, p in [0,1].
double quantile(std::vector<double> values, double p);
BoxStats five_number_summary(std::vector<double> values);

// Running cumulative regrets, one column per expert; the final row is R_T.
std::vector<std::vector<double>> regret_curve(
    std::span<const double> agg_losses,
    const std::vector<std::vector<double>>& expert_losses);

}  // namespace aggcast
