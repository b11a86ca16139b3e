#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aggcast/core.hpp"

namespace aggcast {

enum class LossKind { square, absolute, absolute_percentage };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& s);

struct LossSpec {
  LossKind kind = LossKind::square;
  // Optional range bound M; when set, observed losses above M are reported
  // by the experiment runner.
  std::optional<double> range_bound;
};

// square -> (x-y)^2, absolute -> |x-y|, absolute_percentage -> |x-y|/|y|.
// Throws std::domain_error for the percentage loss at y = 0 (temperature
// in degrees C crosses zero; a signed or infinite loss is rejected).
double loss(const LossSpec& spec, double x, double y);

// square -> 2(yhat-y); absolute -> sign(yhat-y) with 0 at the kink;
// absolute_percentage -> sign(yhat-y)/|y|.
double loss_subgradient(const LossSpec& spec, double y_hat, double y);

std::vector<double> expert_losses(const LossSpec& spec,
                                  std::span<const double> x, double y);

// l_i - w.l, so the weighted mean of the output under w is zero.
std::vector<double> excess_losses(std::span<const double> losses,
                                  const WeightVector& w);

// Gradient-trick losses in centered form: g_i = l'(yhat) (x_i - yhat).
// The per-step constant shift relative to l'(yhat) x_i is neutral for
// exponential weights, and the centered form is what the second-order
// updates consume, so one form serves every strategy.
std::vector<double> linearized_losses(const LossSpec& spec,
                                      const WeightVector& w,
                                      std::span<const double> x, double y);

struct SquareLossDecomposition {
  double mean_term = 0.0;       // sum_j w_j (x_j - y)^2
  double diversity_term = 0.0;  // sum_j w_j (x_j - yhat)^2
};

// mean_term - diversity_term = (yhat - y)^2.
SquareLossDecomposition decompose_square_loss(const WeightVector& w,
                                              std::span<const double> x,
                                              double y);

}  // namespace aggcast
