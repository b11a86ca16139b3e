#include "aggcast/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aggcast {

namespace {

double rmse_of_picks(const ForecastPanel& panel,
                     const std::vector<std::size_t>& pick) {
  double sq = 0.0;
  for (std::size_t t = 0; t < panel.size(); ++t) {
    const double d = panel.rows[t].experts[pick[t]] - panel.rows[t].obs;
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(panel.size()));
}

}  // namespace

BestExpertResult best_expert(const ForecastPanel& panel,
                             const LossSpec& spec) {
  if (panel.size() == 0) throw std::invalid_argument("best_expert: empty panel");
  const std::size_t n = panel.num_experts();
  std::vector<double> cum(n, 0.0);
  for (const auto& row : panel.rows) {
    for (std::size_t i = 0; i < n; ++i) {
      cum[i] += loss(spec, row.experts[i], row.obs);
    }
  }
  BestExpertResult r;
  r.index = static_cast<std::size_t>(
      std::min_element(cum.begin(), cum.end()) - cum.begin());
  r.cumulative_loss = cum[r.index];
  std::vector<std::size_t> pick(panel.size(), r.index);
  r.rmse = rmse_of_picks(panel, pick);
  return r;
}

CompoundExpertResult best_compound(const ForecastPanel& panel,
                                   const LossSpec& spec) {
  if (panel.size() == 0) {
    throw std::invalid_argument("best_compound: empty panel");
  }
  const std::size_t n = panel.num_experts();
  CompoundExpertResult r;
  r.step_losses.reserve(panel.size());
  std::vector<std::size_t> pick(panel.size(), 0);
  for (std::size_t t = 0; t < panel.size(); ++t) {
    const auto& row = panel.rows[t];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double l = loss(spec, row.experts[i], row.obs);
      if (l < best) {
        best = l;
        pick[t] = i;
      }
    }
    r.step_losses.push_back(best);
    r.cumulative_loss += best;
  }
  r.rmse = rmse_of_picks(panel, pick);
  return r;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("projection of empty vector");
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double cand = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) {
      rho = j + 1;
      theta = cand;
    }
  }
  (void)rho;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - theta, 0.0);
  }
  return out;
}

ConvexOracleSolution best_convex(const ForecastPanel& panel, double rel_tol,
                                 int max_iterations) {
  if (panel.size() == 0) throw std::invalid_argument("best_convex: empty panel");
  const std::size_t n = panel.num_experts();
  const std::size_t T = panel.size();

  ConvexOracleSolution sol;
  if (n == 1) {
    sol.q = WeightVector::uniform(1);
    double sq = 0.0;
    for (const auto& row : panel.rows) {
      const double d = row.experts[0] - row.obs;
      sq += d * d;
    }
    sol.objective = sq;
    sol.rmse = std::sqrt(sq / static_cast<double>(T));
    sol.converged = true;
    return sol;
  }

  // Gram matrix G = sum_t x_t x_t^T; F has Hessian 2G.
  std::vector<double> gram(n * n, 0.0);
  for (const auto& row : panel.rows) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        gram[i * n + j] += row.experts[i] * row.experts[j];
      }
    }
  }

  // Power iteration for the largest eigenvalue of G.
  std::vector<double> pv(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> gv(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) gv[i] += gram[i * n + j] * pv[j];
    }
    const double norm = std::sqrt(
        std::inner_product(gv.begin(), gv.end(), gv.begin(), 0.0));
    if (norm <= 0.0) break;
    for (std::size_t i = 0; i < n; ++i) pv[i] = gv[i] / norm;
    lambda = norm;
  }
  const double lipschitz = std::max(2.0 * lambda * 1.01, 1e-12);
  const double step = 1.0 / lipschitz;

  auto objective = [&](const std::vector<double>& q) {
    double f = 0.0;
    for (const auto& row : panel.rows) {
      double r = -row.obs;
      for (std::size_t i = 0; i < n; ++i) r += q[i] * row.experts[i];
      f += r * r;
    }
    return f;
  };
  auto gradient = [&](const std::vector<double>& q, std::vector<double>& g) {
    std::fill(g.begin(), g.end(), 0.0);
    for (const auto& row : panel.rows) {
      double r = -row.obs;
      for (std::size_t i = 0; i < n; ++i) r += q[i] * row.experts[i];
      for (std::size_t i = 0; i < n; ++i) g[i] += 2.0 * r * row.experts[i];
    }
  };

  std::vector<double> q(n, 1.0 / static_cast<double>(n));
  std::vector<double> grad(n);
  double f = objective(q);
  sol.converged = false;
  int it = 0;
  for (; it < max_iterations; ++it) {
    gradient(q, grad);
    std::vector<double> cand(n);
    for (std::size_t i = 0; i < n; ++i) cand[i] = q[i] - step * grad[i];
    cand = project_to_simplex(cand);
    const double fc = objective(cand);
    const double decrease = f - fc;
    q = std::move(cand);
    const bool done =
        std::abs(decrease) < rel_tol * std::max(std::abs(f), 1.0);
    f = std::min(f, fc);
    if (done) {
      sol.converged = true;
      ++it;
      break;
    }
  }
  sol.iterations = it;
  sol.q = WeightVector::from_unnormalized(std::move(q));
  sol.objective = f;
  sol.rmse = std::sqrt(f / static_cast<double>(T));
  return sol;
}

}  // namespace aggcast
