#include "aggcast/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace aggcast {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::square: return "square";
    case LossKind::absolute: return "absolute";
    case LossKind::absolute_percentage: return "mape";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "square") return LossKind::square;
  if (s == "absolute") return LossKind::absolute;
  if (s == "mape" || s == "absolute_percentage") {
    return LossKind::absolute_percentage;
  }
  throw std::invalid_argument("unknown loss kind: " + s);
}

double loss(const LossSpec& spec, double x, double y) {
  switch (spec.kind) {
    case LossKind::square: {
      const double d = x - y;
      return d * d;
    }
    case LossKind::absolute:
      return std::abs(x - y);
    case LossKind::absolute_percentage:
      if (y == 0.0) {
        throw std::domain_error("absolute percentage loss undefined at y=0");
      }
      return std::abs(x - y) / std::abs(y);
  }
  throw std::logic_error("unreachable loss kind");
}

double loss_subgradient(const LossSpec& spec, double y_hat, double y) {
  const double d = y_hat - y;
  switch (spec.kind) {
    case LossKind::square:
      return 2.0 * d;
    case LossKind::absolute:
      if (d > 0.0) return 1.0;
      if (d < 0.0) return -1.0;
      return 0.0;  // chosen subgradient at the kink
    case LossKind::absolute_percentage:
      if (y == 0.0) {
        throw std::domain_error("absolute percentage loss undefined at y=0");
      }
      if (d > 0.0) return 1.0 / std::abs(y);
      if (d < 0.0) return -1.0 / std::abs(y);
      return 0.0;
  }
  throw std::logic_error("unreachable loss kind");
}

std::vector<double> expert_losses(const LossSpec& spec,
                                  std::span<const double> x, double y) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = loss(spec, x[i], y);
  return out;
}

std::vector<double> excess_losses(std::span<const double> losses,
                                  const WeightVector& w) {
  if (losses.size() != w.size()) {
    throw std::invalid_argument("excess_losses: dimension mismatch");
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) mean += w[i] * losses[i];
  std::vector<double> out(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) out[i] = losses[i] - mean;
  return out;
}

std::vector<double> linearized_losses(const LossSpec& spec,
                                      const WeightVector& w,
                                      std::span<const double> x, double y) {
  const double y_hat = predict(w, x);
  const double g = loss_subgradient(spec, y_hat, y);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = g * (x[i] - y_hat);
  return out;
}

SquareLossDecomposition decompose_square_loss(const WeightVector& w,
                                              std::span<const double> x,
                                              double y) {
  const double y_hat = predict(w, x);
  SquareLossDecomposition d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double me = x[i] - y;
    const double de = x[i] - y_hat;
    d.mean_term += w[i] * me * me;
    d.diversity_term += w[i] * de * de;
  }
  return d;
}

}  // namespace aggcast
