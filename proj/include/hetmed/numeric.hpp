#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/beta.hpp>

namespace hetmed {

// Neumaier's variant of Kahan summation. Order-dependence of the result is
// bounded by a couple of ulps of the total, which is what the estimators need
// for permutation invariance.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc += x;
  return acc.value();
}

// Standard Gaussian distribution function via erfc; accurate to a few ulps in
// both tails, so absolute error is far below 1e-10 on |z| <= 8.
inline double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// P(Z > z)
inline double normal_sf(double z) noexcept {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation for p in (0, 0.5], followed by one Halley
// step against the erfc-based distribution function. The refined result is
// accurate to ~1e-15 absolute on (1e-300, 0.5].
inline double normal_quantile_lower(double p) noexcept {
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
  constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                          -2.400758277161838e+00, -2.549732539343734e+00,
                          4.374664141464968e+00, 2.938163982698783e+00};
  constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                          2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace detail

// Inverse of normal_cdf on (0, 1). The upper half is mapped through symmetry
// so the refinement step never evaluates Phi near 1.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return detail::normal_quantile_lower(p);
  return -detail::normal_quantile_lower(1.0 - p);
}

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Two-sided exact (Clopper-Pearson) interval for a binomial proportion with
// `successes` out of `trials`, at confidence 1 - alpha.
inline Interval clopper_pearson(long long successes, long long trials, double alpha = 0.01) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::domain_error("clopper_pearson: need 0 <= successes <= trials, trials >= 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("clopper_pearson: alpha must lie in (0, 1)");
  }
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval ci;
  ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, alpha / 2.0);
  ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return ci;
}

}  // namespace hetmed
