#include "aggcast/core.hpp"

#include <algorithm>
#include <numeric>

namespace aggcast {

void ForecastPanel::validate() const {
  if (expert_names.empty()) {
    throw std::invalid_argument("panel has no experts");
  }
  const std::size_t n = expert_names.size();
  const PanelRow* prev = nullptr;
  for (const auto& row : rows) {
    if (row.experts.size() != n) {
      throw std::invalid_argument("panel row at " + row.date +
                                  " has wrong expert count");
    }
    if (!std::isfinite(row.obs)) {
      throw std::invalid_argument("non-finite observation at " + row.date);
    }
    for (double x : row.experts) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("non-finite expert prediction at " +
                                    row.date);
      }
    }
    if (prev != nullptr && !(prev->date < row.date)) {
      throw std::invalid_argument("dates not strictly increasing at " +
                                  row.date);
    }
    prev = &row;
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("weight vector of size 0");
  WeightVector w;
  w.w_.assign(n, 1.0 / static_cast<double>(n));
  return w;
}

WeightVector WeightVector::basis(std::size_t n, std::size_t i) {
  if (i >= n) throw std::invalid_argument("basis index out of range");
  WeightVector w;
  w.w_.assign(n, 0.0);
  w.w_[i] = 1.0;
  return w;
}

WeightVector WeightVector::from_unnormalized(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("weight vector of size 0");
  for (double& x : v) {
    if (!std::isfinite(x) || x < -1e-12) {
      throw std::invalid_argument("invalid unnormalized weight");
    }
    if (x < 0.0) x = 0.0;
  }
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(s > 0.0)) throw std::invalid_argument("weights sum to zero");
  for (double& x : v) x /= s;
  WeightVector w;
  w.w_ = std::move(v);
  return w;
}

bool WeightVector::on_simplex(double tol) const {
  if (w_.empty()) return false;
  double s = 0.0;
  for (double x : w_) {
    if (x < -1e-12) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= tol;
}

double predict(const WeightVector& w, std::span<const double> x) {
  if (w.size() != x.size()) {
    throw std::invalid_argument("predict: weight/expert dimension mismatch");
  }
  double y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) y += w[i] * x[i];
  return y;
}

void RegretLedger::add_step(double agg_loss,
                            std::span<const double> expert_losses) {
  if (expert_losses.size() != expert_cum_.size()) {
    throw std::invalid_argument("ledger: expert loss dimension mismatch");
  }
  if (!std::isfinite(agg_loss)) {
    throw std::invalid_argument("ledger: non-finite aggregation loss");
  }
  for (double l : expert_losses) {
    if (!std::isfinite(l)) {
      throw std::invalid_argument("ledger: non-finite expert loss");
    }
  }
  agg_cum_ += agg_loss;
  for (std::size_t i = 0; i < expert_cum_.size(); ++i) {
    expert_cum_[i] += expert_losses[i];
  }
  ++steps_;
}

std::vector<double> RegretLedger::regrets() const {
  std::vector<double> r(expert_cum_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = agg_cum_ - expert_cum_[i];
  return r;
}

}  // namespace aggcast
