#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetmed/estimators.hpp"
#include "hetmed/numeric.hpp"

namespace hetmed {

namespace constants {

inline constexpr double lemma1_offset = 0.3;
// 1 - 1/sqrt(2): the offset the anticoncentration argument actually delivers.
inline constexpr double lemma1_offset_exact = 1.0 - 1.0 / std::numbers::sqrt2;
inline constexpr double bernoulli_band_low = 0.25;
inline constexpr double bernoulli_band_high = 0.75;
// sqrt(2 pi) / 4: the t / sigma_1 ratio up to which every P(X_i >= t) stays in [1/4, 3/4].
inline const double band_threshold_ratio = std::sqrt(2.0 * std::numbers::pi) / 4.0;
inline constexpr double band_threshold_ratio_rounded = 0.63;

}  // namespace constants

// Exact distribution of a sum of independent Bernoulli variables.
struct ExactTail {
  std::vector<double> pmf;  // pmf[k] = P(S = k), k = 0..n
  double mean = 0.0;        // E[S]

  [[nodiscard]] std::size_t trials() const noexcept { return pmf.empty() ? 0 : pmf.size() - 1; }

  // P(S >= k)
  [[nodiscard]] double upper_tail(std::size_t k) const {
    if (k >= pmf.size()) return 0.0;
    CompensatedSum acc;
    for (std::size_t i = pmf.size(); i-- > k;) acc += pmf[i];
    return acc.value();
  }

  [[nodiscard]] double total_mass() const { return upper_tail(0); }
};

// O(n^2) convolution recurrence, one variable at a time.
inline ExactTail poisson_binomial_pmf(std::span<const double> probs) {
  if (probs.empty()) throw std::domain_error("poisson_binomial_pmf: need at least one probability");
  ExactTail out;
  out.pmf.assign(probs.size() + 1, 0.0);
  out.pmf[0] = 1.0;
  CompensatedSum mean;
  std::size_t processed = 0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("poisson_binomial_pmf: probability outside [0, 1]");
    const double q = 1.0 - p;
    ++processed;
    for (std::size_t k = processed; k > 0; --k) {
      out.pmf[k] = out.pmf[k] * q + out.pmf[k - 1] * p;
    }
    out.pmf[0] *= q;
    mean += p;
  }
  out.mean = mean.value();
  return out;
}

struct AnticoncentrationCheck {
  double offset = 0.0;     // c in E[S] + c sqrt(n log(2/delta))
  double threshold = 0.0;  // real-valued threshold
  std::size_t k_min = 0;   // smallest integer S satisfying S >= threshold
  double tail = 0.0;       // P(S >= threshold)
  double target = 0.0;     // delta / 2
  double margin = 0.0;     // tail - target
  bool holds = false;
};

struct Lemma1Result {
  double delta = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  AnticoncentrationCheck stated;  // offset 0.3
  AnticoncentrationCheck exact;   // offset 1 - 1/sqrt(2)
  // Outside delta <= 1/4 the stated offset is known to be too large; such
  // results are informational and never count as a failure.
  bool report_only = false;
};

inline constexpr double kLemma1Slack = 1e-12;

namespace detail {

inline AnticoncentrationCheck anticoncentration(const ExactTail& dist, double offset, double delta) {
  const auto nd = static_cast<double>(dist.trials());
  AnticoncentrationCheck c;
  c.offset = offset;
  c.threshold = dist.mean + offset * std::sqrt(nd * std::log(2.0 / delta));
  const double ceiling = std::ceil(c.threshold);
  c.k_min = ceiling <= 0.0 ? 0 : static_cast<std::size_t>(ceiling);
  c.tail = dist.upper_tail(c.k_min);
  c.target = delta / 2.0;
  c.margin = c.tail - c.target;
  c.holds = c.tail + kLemma1Slack >= c.target;
  return c;
}

}  // namespace detail

inline Lemma1Result lemma1_exact_check(std::span<const double> probs, double delta) {
  const std::size_t n = probs.size();
  if (n == 0) throw std::domain_error("lemma1_exact_check: empty probability list");
  for (double p : probs) {
    if (!(p >= constants::bernoulli_band_low && p <= constants::bernoulli_band_high)) {
      throw std::domain_error("lemma1_exact_check: every p_i must lie in [1/4, 3/4]");
    }
  }
  if (!(delta > std::exp(-static_cast<double>(n)) && delta < 1.0)) {
    throw std::domain_error("lemma1_exact_check: delta must lie in (exp(-n), 1)");
  }
  const ExactTail dist = poisson_binomial_pmf(probs);
  Lemma1Result r;
  r.delta = delta;
  r.n = n;
  r.mean = dist.mean;
  r.stated = detail::anticoncentration(dist, constants::lemma1_offset, delta);
  r.exact = detail::anticoncentration(dist, constants::lemma1_offset_exact, delta);
  r.report_only = delta > 0.25;
  return r;
}

struct Lemma2Result {
  bool median_at_least_t = false;  // estimator side
  bool counting_side = false;      // D(t) >= B(t), decided as #{x_i >= t} >= n/2
  bool agree = false;
  std::size_t count_at_least_t = 0;
  double d = 0.0;  // sum (1{x_i >= t} - P(X_i > t))
  double b = 0.0;  // sum P(0 <= X_i <= t)
};

// Both sides of the median/counting equivalence for centred Gaussian data.
// D(t) - B(t) = #{x_i >= t} - n/2 exactly when t >= 0, so the counting side
// is decided by integer comparison; D and B are returned for inspection.
inline Lemma2Result lemma2_equivalence_check(std::span<const double> values, std::span<const double> scales,
                                             double t) {
  if (!(t >= 0.0)) throw std::domain_error("lemma2_equivalence_check: t must be >= 0");
  if (values.empty()) throw std::domain_error("lemma2_equivalence_check: empty input");
  if (values.size() != scales.size()) throw std::domain_error("lemma2_equivalence_check: length mismatch");

  Lemma2Result r;
  CompensatedSum d;
  CompensatedSum b;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(scales[i] > 0.0)) throw std::domain_error("lemma2_equivalence_check: scales must be > 0");
    const double above = normal_sf(t / scales[i]);
    const bool hit = values[i] >= t;
    r.count_at_least_t += hit ? 1 : 0;
    d += (hit ? 1.0 : 0.0) - above;
    b += 0.5 - above;
  }
  r.d = d.value();
  r.b = b.value();
  r.median_at_least_t = empirical_median(values) >= t;
  r.counting_side = 2 * r.count_at_least_t >= values.size();
  r.agree = r.median_at_least_t == r.counting_side;
  return r;
}

struct Corollary2Result {
  bool holds = false;  // every p_i(t) in [1/4, 3/4]
  double p_min = 0.0;
  double p_max = 0.0;
};

// p_i(t) = P(X_i >= t) for centred Gaussians with the given scales.
inline Corollary2Result corollary2_range_check(std::span<const double> scales, double t) {
  if (!(t >= 0.0)) throw std::domain_error("corollary2_range_check: t must be >= 0");
  if (scales.empty()) throw std::domain_error("corollary2_range_check: empty scale list");
  Corollary2Result r;
  r.p_min = 1.0;
  r.p_max = 0.0;
  for (double s : scales) {
    if (!(s > 0.0)) throw std::domain_error("corollary2_range_check: scales must be > 0");
    const double p = normal_sf(t / s);
    r.p_min = std::min(r.p_min, p);
    r.p_max = std::max(r.p_max, p);
  }
  r.holds = r.p_min >= constants::bernoulli_band_low && r.p_max <= constants::bernoulli_band_high;
  return r;
}

inline double corollary2_safe_threshold(double smallest_scale) {
  return constants::band_threshold_ratio * smallest_scale;
}

}  // namespace hetmed
