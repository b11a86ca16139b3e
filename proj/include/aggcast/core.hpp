#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aggcast {

/// One (station, lead time) forecast stream. Each pair gets its own
/// independent online aggregation.
struct StreamKey {
  std::string station_id;
  int lead_time_hours = 0;

  auto operator<=>(const StreamKey&) const = default;

  std::string label() const {
    return station_id + "_" + std::to_string(lead_time_hours);
  }
};

struct PanelRow {
  std::string date;  // ISO-8601, so lexicographic order == chronological
  std::vector<double> experts;
  double obs = 0.0;
};

/// Time-ordered expert predictions plus observations for one stream.
struct ForecastPanel {
  std::vector<std::string> expert_names;
  std::vector<PanelRow> rows;

  std::size_t num_experts() const { return expert_names.size(); }
  std::size_t size() const { return rows.size(); }

  // Throws std::invalid_argument on a broken invariant: empty expert set,
  // ragged rows, non-increasing dates, or non-finite entries.
  void validate() const;
};

/// Convex weights over N experts. Nonnegative, sums to one (renormalized
/// after every construction to suppress fp drift).
class WeightVector {
 public:
  WeightVector() = default;

  static WeightVector uniform(std::size_t n);
  static WeightVector basis(std::size_t n, std::size_t i);

  // Clamps coordinates below -1e-12 as errors, zeroes tiny negatives,
  // divides by the sum. Throws if the sum is not positive.
  static WeightVector from_unnormalized(std::vector<double> v);

  double operator[](std::size_t i) const { return w_[i]; }
  std::size_t size() const { return w_.size(); }
  const std::vector<double>& values() const { return w_; }
  std::span<const double> span() const { return w_; }

  bool on_simplex(double tol = 1e-9) const;

 private:
  std::vector<double> w_;
};

struct Prediction {
  double value = 0.0;
  WeightVector weights_used;
};

/// w . x, the convex combination. Result lies in [min x, max x] up to
/// 1e-9 rounding slack at the interval endpoints.
double predict(const WeightVector& w, std::span<const double> x);

/// Cumulative losses of the aggregation and of each expert.
class RegretLedger {
 public:
  RegretLedger() = default;
  explicit RegretLedger(std::size_t n) : expert_cum_(n, 0.0) {}

  // Advances every cumulative sum by one step. Throws on a non-finite loss.
  void add_step(double agg_loss, std::span<const double> expert_losses);

  double cum_loss_aggregation() const { return agg_cum_; }
  const std::vector<double>& cum_loss_experts() const { return expert_cum_; }
  std::size_t num_experts() const { return expert_cum_.size(); }
  std::size_t steps() const { return steps_; }

  // R_T(delta_i) = aggregation cumulative loss - expert i cumulative loss.
  double regret(std::size_t i) const { return agg_cum_ - expert_cum_.at(i); }
  std::vector<double> regrets() const;

 private:
  double agg_cum_ = 0.0;
  std::vector<double> expert_cum_;
  std::size_t steps_ = 0;
};

}  // namespace aggcast
