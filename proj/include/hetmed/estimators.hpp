#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hetmed/numeric.hpp"

namespace hetmed {

// Observations sharing one location parameter. `scales` are the true
// per-observation scales (only the oracle MLE may look at them) and
// `true_location` is known only for simulated data.
class Dataset {
 public:
  explicit Dataset(std::vector<double> values, std::optional<std::vector<double>> scales = std::nullopt,
                   std::optional<double> true_location = std::nullopt)
      : values_(std::move(values)), scales_(std::move(scales)), true_location_(true_location) {
    if (values_.empty()) throw std::domain_error("Dataset: values must be non-empty");
    if (scales_) {
      if (scales_->size() != values_.size()) {
        throw std::domain_error("Dataset: scales and values differ in length");
      }
      for (double s : *scales_) {
        if (!(s > 0.0)) throw std::domain_error("Dataset: scales must be strictly positive");
      }
    }
  }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] bool has_scales() const noexcept { return scales_.has_value(); }
  [[nodiscard]] std::span<const double> scales() const {
    if (!scales_) throw std::domain_error("Dataset: no scales attached");
    return *scales_;
  }
  [[nodiscard]] std::optional<double> true_location() const noexcept { return true_location_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
  std::optional<std::vector<double>> scales_;
  std::optional<double> true_location_;
};

// Index of the median order statistic (0-based): floor(n/2). For even n this
// is the upper of the two middle values, the only choice under which
// "median >= t  <=>  #{x_i >= t} >= n/2" holds exactly.
constexpr std::size_t median_rank(std::size_t n) noexcept { return n / 2; }

// Upper median, computed in place by selection. Reorders `scratch`.
inline double empirical_median_inplace(std::span<double> scratch) {
  if (scratch.empty()) throw std::domain_error("empirical_median: empty input");
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(median_rank(scratch.size()));
  std::nth_element(scratch.begin(), mid, scratch.end());
  return *mid;
}

inline double empirical_median(std::span<const double> values) {
  std::vector<double> scratch(values.begin(), values.end());
  return empirical_median_inplace(scratch);
}

inline double empirical_mean(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("empirical_mean: empty input");
  return compensated_sum(values) / static_cast<double>(values.size());
}

// Inverse-variance weighted mean; needs the true scales.
inline double mle_oracle(std::span<const double> values, std::span<const double> scales) {
  if (values.empty()) throw std::domain_error("mle_oracle: empty input");
  if (values.size() != scales.size()) throw std::domain_error("mle_oracle: length mismatch");
  CompensatedSum weighted;
  CompensatedSum total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(scales[i] > 0.0)) throw std::domain_error("mle_oracle: scales must be strictly positive");
    const double w = 1.0 / (scales[i] * scales[i]);
    weighted += w * values[i];
    total += w;
  }
  return weighted.value() / total.value();
}

inline double empirical_median(const Dataset& data) { return empirical_median(data.values()); }
inline double empirical_mean(const Dataset& data) { return empirical_mean(data.values()); }
inline double mle_oracle(const Dataset& data) { return mle_oracle(data.values(), data.scales()); }

}  // namespace hetmed
