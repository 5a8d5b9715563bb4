#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetmed/numeric.hpp"

namespace hetmed {

namespace constants {

// Lower bound on the unit Gaussian density over [0, 1]: phi(1).
inline const double gaussian_density_floor = std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);

// 1 / (C sqrt 2) with C = phi(1); equals sqrt(pi) * e^(1/2).
inline const double median_upper_gaussian_coefficient =
    std::sqrt(std::numbers::pi) * std::exp(0.5);
inline constexpr double median_upper_gaussian_coefficient_rounded = 2.93;

inline const double median_lower_coefficient =
    (2.0 - std::numbers::sqrt2) * std::sqrt(std::numbers::pi) / 8.0;
inline constexpr double median_lower_trim_coefficient = (std::numbers::sqrt2 - 1.0) / 8.0;
inline constexpr double median_lower_coefficient_rounded = 0.13;
inline constexpr double median_lower_trim_coefficient_rounded = 0.05;
inline constexpr double median_lower_delta_ceiling = 0.25;

inline constexpr double xia_coefficient = std::numbers::sqrt2 / 0.35;

}  // namespace constants

// Scale parameters sigma_1 <= ... <= sigma_n. Suffix sums of 1/sigma are
// precomputed so every trimmed sum is O(1).
class VarianceProfile {
 public:
  explicit VarianceProfile(std::vector<double> sigmas) : sigmas_(std::move(sigmas)) {
    if (sigmas_.empty()) throw std::domain_error("VarianceProfile: empty profile");
    for (double s : sigmas_) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::domain_error("VarianceProfile: scales must be finite and > 0");
      }
    }
    std::sort(sigmas_.begin(), sigmas_.end());

    suffix_inverse_.assign(sigmas_.size() + 1, 0.0);
    CompensatedSum acc;
    for (std::size_t i = sigmas_.size(); i-- > 0;) {
      acc += 1.0 / sigmas_[i];
      suffix_inverse_[i] = acc.value();
    }
    CompensatedSum sq;
    CompensatedSum inv_sq;
    for (double s : sigmas_) {
      sq += s * s;
      inv_sq += 1.0 / (s * s);
    }
    sum_squares_ = sq.value();
    sum_inverse_squares_ = inv_sq.value();
  }

  [[nodiscard]] std::size_t size() const noexcept { return sigmas_.size(); }
  [[nodiscard]] std::span<const double> sigmas() const noexcept { return sigmas_; }
  [[nodiscard]] double operator[](std::size_t i) const { return sigmas_.at(i); }
  [[nodiscard]] double smallest() const noexcept { return sigmas_.front(); }
  [[nodiscard]] double largest() const noexcept { return sigmas_.back(); }
  [[nodiscard]] double sum_squares() const noexcept { return sum_squares_; }
  [[nodiscard]] double sum_inverse_squares() const noexcept { return sum_inverse_squares_; }

  // Sum of 1/sigma over the n - j largest scales.
  [[nodiscard]] double trimmed_inverse_sum(std::size_t j) const {
    if (j >= sigmas_.size()) {
      throw std::domain_error("trimmed_inverse_scale_sum: trim index must be < n");
    }
    return suffix_inverse_[j];
  }

  [[nodiscard]] VarianceProfile scaled(double c) const {
    if (!(c > 0.0)) throw std::domain_error("VarianceProfile::scaled: factor must be > 0");
    std::vector<double> out(sigmas_);
    for (double& s : out) s *= c;
    return VarianceProfile(std::move(out));
  }

 private:
  std::vector<double> sigmas_;
  std::vector<double> suffix_inverse_;
  double sum_squares_ = 0.0;
  double sum_inverse_squares_ = 0.0;
};

inline double trimmed_inverse_scale_sum(const VarianceProfile& profile, std::size_t j) {
  return profile.trimmed_inverse_sum(j);
}

enum class BoundName {
  mean,
  mle,
  median_upper,
  median_upper_gaussian,
  median_lower_gaussian,
  xia,
  devroye,
};

inline constexpr BoundName kAllBoundNames[] = {
    BoundName::mean,         BoundName::mle, BoundName::median_upper, BoundName::median_upper_gaussian,
    BoundName::median_lower_gaussian, BoundName::xia, BoundName::devroye,
};

// Stable identifiers used in every CSV/JSON report.
constexpr std::string_view wire_name(BoundName name) noexcept {
  switch (name) {
    case BoundName::mean: return "mean_eq1";
    case BoundName::mle: return "mle_eq2";
    case BoundName::median_upper: return "median_thm1";
    case BoundName::median_upper_gaussian: return "median_cor1";
    case BoundName::median_lower_gaussian: return "median_lower_thm2";
    case BoundName::xia: return "xia_prop1";
    case BoundName::devroye: return "devroye_eq4";
  }
  return "unknown";
}

inline std::optional<BoundName> parse_bound_name(std::string_view text) noexcept {
  for (BoundName name : kAllBoundNames) {
    if (wire_name(name) == text) return name;
  }
  return std::nullopt;
}

// Lower bounds certify P(|err| >= value) >= delta; everything else is an
// upper bound certifying P(|err| > value) <= delta.
constexpr bool is_lower_bound(BoundName name) noexcept { return name == BoundName::median_lower_gaussian; }

struct BoundReport {
  BoundName name = BoundName::mean;
  double value = std::numeric_limits<double>::quiet_NaN();  // half-width; NaN when undefined
  double delta = 0.0;
  std::size_t trim_index = 0;
  bool applicable = false;
  std::string note;
};

namespace detail {

inline void require_delta(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error(std::string(who) + ": delta must lie in (0, 1)");
  }
}

inline std::size_t floor_index(double x) {
  // Values of x are bounded well below 2^53 for any profile that fits in memory.
  return static_cast<std::size_t>(std::floor(x));
}

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

inline BoundReport mean_deviation_bound(const VarianceProfile& profile, double delta) {
  detail::require_delta(delta, "mean_deviation_bound");
  const auto n = static_cast<double>(profile.size());
  BoundReport r;
  r.name = BoundName::mean;
  r.delta = delta;
  r.value = std::sqrt(2.0 * profile.sum_squares() * std::log(1.0 / delta)) / n;
  r.applicable = true;
  return r;
}

inline BoundReport mle_deviation_bound(const VarianceProfile& profile, double delta) {
  detail::require_delta(delta, "mle_deviation_bound");
  BoundReport r;
  r.name = BoundName::mle;
  r.delta = delta;
  r.value = std::sqrt(2.0 * std::log(1.0 / delta) / profile.sum_inverse_squares());
  r.applicable = true;
  r.note = "oracle: requires the true scales";
  return r;
}

// Upper bound on |median - theta| holding with probability >= 1 - delta,
// for any family with P(theta <= X_i <= theta + t) >= c_const * t / sigma_i
// on 0 <= t <= sigma_i.
inline BoundReport median_upper_bound(const VarianceProfile& profile, double delta, double c_const) {
  if (!(c_const > 0.0 && c_const < 1.0)) {
    throw std::domain_error("median_upper_bound: constant C must lie in (0, 1)");
  }
  detail::require_delta(delta, "median_upper_bound");
  const std::size_t n = profile.size();
  const auto nd = static_cast<double>(n);
  const double coefficient = 1.0 / (c_const * std::numbers::sqrt2);
  const std::size_t j = detail::floor_index(coefficient * std::sqrt(nd * std::log(1.0 / delta)));

  BoundReport r;
  r.name = BoundName::median_upper;
  r.delta = delta;
  r.trim_index = j;
  const double delta_floor = std::exp(-2.0 * nd * c_const * c_const);
  if (j < n) {
    r.value = coefficient * std::sqrt(nd * std::log(2.0 / delta)) / profile.trimmed_inverse_sum(j);
  }
  if (!(delta > delta_floor)) {
    r.note = "delta <= exp(-2 n C^2) = " + detail::format_number(delta_floor);
  } else if (j >= n) {
    r.note = "trim index j >= n";
  } else {
    r.applicable = true;
  }
  return r;
}

inline BoundReport median_upper_bound_gaussian(const VarianceProfile& profile, double delta) {
  BoundReport r = median_upper_bound(profile, delta, constants::gaussian_density_floor);
  r.name = BoundName::median_upper_gaussian;
  if (r.applicable) r.note = "coefficient sqrt(pi) e^(1/2) ~ 2.93";
  return r;
}

// Lower bound: |median - theta| >= value with probability >= delta, for
// Gaussian observations. Computed with the exact constants; the rounded
// 0.13 / 0.05 only appear in the note.
inline BoundReport median_lower_bound_gaussian(const VarianceProfile& profile, double delta) {
  detail::require_delta(delta, "median_lower_bound_gaussian");
  const std::size_t n = profile.size();
  const auto nd = static_cast<double>(n);
  const double root = std::sqrt(nd * std::log(1.0 / delta));
  const std::size_t j = detail::floor_index(constants::median_lower_trim_coefficient * root);

  BoundReport r;
  r.name = BoundName::median_lower_gaussian;
  r.delta = delta;
  r.trim_index = j;
  if (j < n) r.value = constants::median_lower_coefficient * root / profile.trimmed_inverse_sum(j);

  const double gap = std::numbers::sqrt2 - 1.0;
  const double delta_floor = std::exp(-gap * gap * nd);
  if (!(delta > delta_floor)) {
    r.note = "delta <= exp(-(sqrt2-1)^2 n) = " + detail::format_number(delta_floor);
  } else if (!(delta < constants::median_lower_delta_ceiling)) {
    r.note = "delta must be < 1/4";
  } else if (j >= n) {
    r.note = "trim index j >= n";
  } else {
    r.applicable = true;
    r.note = "rounded form 0.13*sqrt(n log(1/delta)), j = floor(0.05*sqrt(n log(1/delta)))";
  }
  return r;
}

inline BoundReport xia_bound(const VarianceProfile& profile, double delta) {
  detail::require_delta(delta, "xia_bound");
  const auto nd = static_cast<double>(profile.size());
  BoundReport r;
  r.name = BoundName::xia;
  r.delta = delta;
  r.trim_index = 0;
  r.value = constants::xia_coefficient * std::sqrt(nd * std::log(2.0 / delta)) / profile.trimmed_inverse_sum(0);
  r.applicable = profile.smallest() > 2.0 * r.value;
  r.note = r.applicable ? "sigma_1 condition satisfied"
                        : "sigma_1 <= " + detail::format_number(2.0 * r.value) +
                              " violates the sigma_1 condition; the trimmed median bound still applies";
  return r;
}

// Bound of the heavy-tail analysis with tail constant beta, maximized over
// the full integer j-range by exact scan.
inline BoundReport devroye_bound(const VarianceProfile& profile, double delta, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("devroye_bound: beta must be > 0");
  detail::require_delta(delta, "devroye_bound");
  const std::size_t n = profile.size();
  const auto nd = static_cast<double>(n);
  const double limit = 8.0 * std::sqrt(2.0 * nd * std::log(6.0 / delta));
  const std::size_t j_max = detail::floor_index(limit);

  BoundReport r;
  r.name = BoundName::devroye;
  r.delta = delta;
  if (j_max >= n) {
    r.note = "j-range exceeds n";
    return r;
  }
  double best = -1.0;
  std::size_t best_j = 1;
  for (std::size_t j = 1; j <= j_max; ++j) {
    // sum_{i=j}^n 1/sigma_i drops the j - 1 smallest scales
    const double ratio = (limit + 1.0 - static_cast<double>(j)) / profile.trimmed_inverse_sum(j - 1);
    if (ratio > best) {
      best = ratio;
      best_j = j;
    }
  }
  const double log_factor = std::max(std::log(3.0 / delta), std::log(nd + 1.0));
  r.value = 8.0 * std::numbers::e * std::numbers::sqrt2 * log_factor / beta * best;
  r.trim_index = best_j;
  r.applicable = true;
  r.note = "requires P(|Z| >= t) >= exp(-beta t) for all t; Gaussian tails do not satisfy this";
  return r;
}

struct DominanceResult {
  bool holds = false;
  double lhs = 0.0;    // sqrt(n) / sum_{i>j} 1/sigma_i
  double rhs = 0.0;    // 2 sqrt(2) sqrt(sum sigma_i^2) / n
  double ratio = 0.0;  // rhs / lhs
  std::size_t trim_index = 0;
};

constexpr std::size_t ceil_sqrt(std::size_t n) noexcept {
  std::size_t r = 0;
  while (r * r < n) ++r;
  return r;
}

inline DominanceResult dominance_check(const VarianceProfile& profile, std::size_t trim_index) {
  const std::size_t n = profile.size();
  if (n < 4) throw std::domain_error("dominance_check: requires n >= 4");
  const auto nd = static_cast<double>(n);
  DominanceResult out;
  out.trim_index = trim_index;
  out.lhs = std::sqrt(nd) / profile.trimmed_inverse_sum(trim_index);
  out.rhs = 2.0 * std::numbers::sqrt2 * std::sqrt(profile.sum_squares()) / nd;
  out.ratio = out.rhs / out.lhs;
  out.holds = out.lhs <= out.rhs;
  return out;
}

// Compares the trimmed median bound scale against the mean's deviation
// scale, trimming j = ceil(sqrt n) smallest scales.
inline DominanceResult dominance_check(const VarianceProfile& profile) {
  return dominance_check(profile, ceil_sqrt(profile.size()));
}

// One report per bound. Applicable entries come first, ascending by value;
// inapplicable ones follow in declaration order.
inline std::vector<BoundReport> compare_all(const VarianceProfile& profile, double delta,
                                            std::optional<double> beta = std::nullopt,
                                            double c_const = constants::gaussian_density_floor) {
  std::vector<BoundReport> out;
  out.push_back(mean_deviation_bound(profile, delta));
  out.push_back(mle_deviation_bound(profile, delta));
  out.push_back(median_upper_bound(profile, delta, c_const));
  out.push_back(median_upper_bound_gaussian(profile, delta));
  out.push_back(median_lower_bound_gaussian(profile, delta));
  out.push_back(xia_bound(profile, delta));
  if (beta) {
    out.push_back(devroye_bound(profile, delta, *beta));
  } else {
    BoundReport r;
    r.name = BoundName::devroye;
    r.delta = delta;
    r.note = "beta not supplied";
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const BoundReport& a, const BoundReport& b) {
    if (a.applicable != b.applicable) return a.applicable;
    return a.applicable && a.value < b.value;
  });
  return out;
}

}  // namespace hetmed
