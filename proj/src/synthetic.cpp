#include "aggcast/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace aggcast {

namespace {

std::string iso_date(std::size_t day_offset) {
  using namespace std::chrono;
  const sys_days start = year{2020} / 3 / 30;
  const year_month_day ymd{start + days{static_cast<int>(day_offset)}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

// Smooth annual temperature-like signal with a seed-dependent phase.
double seasonal(std::size_t t, double phase) {
  return 12.0 + 8.0 * std::sin(2.0 * std::numbers::pi *
                               (static_cast<double>(t) / 365.25 + phase));
}

}  // namespace

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::iid_dominant: return "iid_dominant";
    case SyntheticKind::adversarial_alternating:
      return "adversarial_alternating";
    case SyntheticKind::seasonal_flip: return "seasonal_flip";
    case SyntheticKind::biased_quantile_pair: return "biased_quantile_pair";
  }
  return "?";
}

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "iid_dominant") return SyntheticKind::iid_dominant;
  if (s == "adversarial_alternating") {
    return SyntheticKind::adversarial_alternating;
  }
  if (s == "seasonal_flip") return SyntheticKind::seasonal_flip;
  if (s == "biased_quantile_pair") return SyntheticKind::biased_quantile_pair;
  throw std::invalid_argument("unknown synthetic kind: " + s);
}

ForecastPanel generate_synthetic(const SyntheticStreamSpec& spec) {
  if (spec.T == 0 || spec.N == 0) {
    throw std::invalid_argument("synthetic stream needs T >= 1 and N >= 1");
  }
  if (spec.kind == SyntheticKind::biased_quantile_pair && spec.N < 3) {
    throw std::invalid_argument("biased_quantile_pair needs N >= 3");
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double phase = unif(rng);
  // Error magnitudes are kept small relative to 1: squared-loss gradients
  // grow quadratically with the error scale, and the second-order
  // strategies' first-step rates assume roughly unit-bounded losses.
  const double sigma = 0.2 * spec.noise;
  const double bias = 0.4 * spec.noise;

  ForecastPanel panel;
  for (std::size_t i = 0; i < spec.N; ++i) {
    if (spec.kind == SyntheticKind::biased_quantile_pair && i == spec.N - 2) {
      panel.expert_names.push_back("cold");
    } else if (spec.kind == SyntheticKind::biased_quantile_pair &&
               i == spec.N - 1) {
      panel.expert_names.push_back("warm");
    } else {
      panel.expert_names.push_back("e" + std::to_string(i + 1));
    }
  }

  std::size_t regime_left = 0;  // biased_quantile_pair cold spells
  const double cold_shift = 0.6 * spec.noise;

  for (std::size_t t = 0; t < spec.T; ++t) {
    const double s = seasonal(t, phase);
    PanelRow row;
    row.date = iso_date(t);
    row.experts.resize(spec.N);

    switch (spec.kind) {
      case SyntheticKind::iid_dominant: {
        row.obs = s;
        for (std::size_t i = 0; i < spec.N; ++i) {
          row.experts[i] = s + (i == 0 ? 0.0 : bias) + sigma * gauss(rng);
        }
        break;
      }
      case SyntheticKind::adversarial_alternating: {
        row.obs = s;
        const std::size_t good = (t / 100) % spec.N;
        for (std::size_t i = 0; i < spec.N; ++i) {
          row.experts[i] = s + (i == good ? 0.0 : bias) + sigma * gauss(rng);
        }
        break;
      }
      case SyntheticKind::seasonal_flip: {
        row.obs = s;
        const bool first_half = (t % 365) < 183;
        for (std::size_t i = 0; i < spec.N; ++i) {
          const bool in_season = (i % 2 == 0) == first_half;
          row.experts[i] = s + (in_season ? 0.0 : bias) + sigma * gauss(rng);
        }
        break;
      }
      case SyntheticKind::biased_quantile_pair: {
        const std::size_t m = spec.N - 2;
        // Unbiased experts of heterogeneous quality; the last two carry a
        // constant cold/warm offset with a tighter own noise.
        for (std::size_t i = 0; i < m; ++i) {
          const double frac =
              m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.0;
          const double si = sigma * (0.7 + 1.5 * frac);
          const double mu = sigma * (-0.4 + 0.8 * frac);
          row.experts[i] = s + mu + si * gauss(rng);
        }
        row.experts[m] = s - cold_shift + 0.5 * sigma * gauss(rng);
        row.experts[m + 1] = s + cold_shift + 0.5 * sigma * gauss(rng);
        // Rare cold spells where the whole field is too warm and only the
        // cold-biased expert is near the truth.
        if (regime_left == 0 && unif(rng) < 0.003) regime_left = 10;
        if (regime_left > 0) {
          row.obs = s - cold_shift;
          --regime_left;
        } else {
          row.obs = s;
        }
        break;
      }
    }
    panel.rows.push_back(std::move(row));
  }
  panel.validate();
  return panel;
}

}  // namespace aggcast
