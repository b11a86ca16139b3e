#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aggcast/core.hpp"
#include "aggcast/losses.hpp"

namespace aggcast {

struct BestExpertResult {
  std::size_t index = 0;
  double cumulative_loss = 0.0;
  double rmse = 0.0;  // RMSE of the chosen expert's predictions
};

// argmin_i sum_t loss(x_i, y); ties go to the lowest index.
BestExpertResult best_expert(const ForecastPanel& panel, const LossSpec& spec);

struct CompoundExpertResult {
  std::vector<double> step_losses;  // min_i loss at each t
  double cumulative_loss = 0.0;
  double rmse = 0.0;  // RMSE of the per-step best expert's predictions
};

// Predicts at each t like the expert with the smallest loss at t.
CompoundExpertResult best_compound(const ForecastPanel& panel,
                                   const LossSpec& spec);

struct ConvexOracleSolution {
  WeightVector q;
  double objective = 0.0;  // cumulative square loss at q
  int iterations = 0;
  bool converged = false;
  double rmse = 0.0;
};

// Best fixed convex combination under the square loss, by projected
// gradient descent on F(q) = sum_t (q.x_t - y_t)^2 with step 1/L from a
// power-iteration bound on the Gram matrix. Square loss only; the
// absolute-loss analogue is non-smooth and out of scope.
ConvexOracleSolution best_convex(const ForecastPanel& panel,
                                 double rel_tol = 1e-10,
                                 int max_iterations = 10000);

// Euclidean projection onto the probability simplex (sort and threshold).
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace aggcast
