#pragma once

// Randomized and exhaustive verification suites built on the exact oracles.
// Every suite is a pure function of its arguments (including the seed).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "hetmed/bounds.hpp"
#include "hetmed/numeric.hpp"
#include "hetmed/oracles.hpp"
#include "hetmed/random.hpp"

namespace hetmed {

namespace purpose {
inline constexpr std::uint64_t lemma1 = 1;
inline constexpr std::uint64_t lemma2 = 2;
inline constexpr std::uint64_t corollary2 = 3;
inline constexpr std::uint64_t dominance = 4;
}  // namespace purpose

enum class BernoulliMode { half, random };

struct Lemma1Case {
  BernoulliMode mode = BernoulliMode::half;
  std::size_t case_index = 0;
  Lemma1Result result;
  std::vector<double> probs;

  [[nodiscard]] bool counts_as_failure() const noexcept { return !result.report_only && !result.stated.holds; }
};

struct Lemma1Suite {
  std::vector<Lemma1Case> cases;

  [[nodiscard]] std::size_t failures() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const Lemma1Case& c) { return c.counts_as_failure(); }));
  }
};

// half: one case per (n, delta) with p_i = 1/2. random: `draws` cases per
// (n, delta) with p_i uniform on [1/4, 3/4].
inline Lemma1Suite run_lemma1_suite(const std::vector<std::size_t>& n_list, const std::vector<double>& delta_list,
                                    BernoulliMode mode, std::size_t draws, std::uint64_t seed) {
  const CounterStream source(mix_seed(seed, purpose::lemma1));
  Lemma1Suite suite;
  for (std::size_t n : n_list) {
    for (std::size_t di = 0; di < delta_list.size(); ++di) {
      const std::size_t count = mode == BernoulliMode::half ? 1 : draws;
      for (std::size_t c = 0; c < count; ++c) {
        Lemma1Case lc;
        lc.mode = mode;
        lc.case_index = c;
        if (mode == BernoulliMode::half) {
          lc.probs.assign(n, 0.5);
        } else {
          const std::uint64_t stream = (std::uint64_t{n} << 40) | (std::uint64_t{di} << 24) | c;
          StreamCursor rng(source, stream);
          lc.probs.resize(n);
          for (double& p : lc.probs) p = rng.uniform(constants::bernoulli_band_low, constants::bernoulli_band_high);
        }
        lc.result = lemma1_exact_check(lc.probs, delta_list[di]);
        suite.cases.push_back(std::move(lc));
      }
    }
  }
  return suite;
}

struct Lemma2Suite {
  std::size_t instances = 0;
  std::size_t disagreements = 0;
  std::size_t ties_at_data_point = 0;  // instances whose t equals an observation
  std::optional<std::size_t> first_disagreement;
};

// Gaussian data with theta = 0 and log-uniform scales on [e^-2, e^2]; t is
// drawn from {0} u {non-negative order statistics} u {midpoints between
// consecutive ones} u {max + 1}.
inline Lemma2Suite run_lemma2_suite(std::size_t cases, std::size_t max_n, std::uint64_t seed) {
  if (max_n < 1) throw std::domain_error("run_lemma2_suite: max_n must be >= 1");
  const CounterStream source(mix_seed(seed, purpose::lemma2));
  Lemma2Suite suite;
  std::vector<double> values;
  std::vector<double> scales;
  std::vector<double> grid;
  for (std::size_t c = 0; c < cases; ++c) {
    StreamCursor rng(source, c);
    const auto n = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_n)));
    values.resize(n);
    scales.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      scales[i] = std::exp(rng.uniform(-2.0, 2.0));
      values[i] = scales[i] * normal_quantile(rng.uniform());
    }

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    grid.assign(1, 0.0);
    double prev = 0.0;
    for (double x : sorted) {
      if (x < 0.0) continue;
      grid.push_back(x);
      grid.push_back(0.5 * (prev + x));
      prev = x;
    }
    grid.push_back(std::max(0.0, sorted.back()) + 1.0);
    const double t = grid[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(grid.size()) - 1))];

    const Lemma2Result r = lemma2_equivalence_check(values, scales, t);
    ++suite.instances;
    if (std::find(values.begin(), values.end(), t) != values.end()) ++suite.ties_at_data_point;
    if (!r.agree) {
      ++suite.disagreements;
      if (!suite.first_disagreement) suite.first_disagreement = c;
    }
  }
  return suite;
}

struct Corollary2Suite {
  std::size_t profiles = 0;
  std::size_t grid_points = 0;
  double worst_p_min = 1.0;          // smallest p_i(t) seen on the safe grid
  std::size_t grid_violations = 0;   // grid points with p_min < 1/4 - tolerance
  std::size_t vacuity_failures = 0;  // profiles where p_1(sigma_1) >= 1/4
  double witness_p_at_sigma1 = 0.0;  // largest p_1(sigma_1) over profiles
  std::vector<double> per_profile_p_min;
};

inline constexpr double kCorollary2Tolerance = 1e-9;

// Random profiles (n in [1, 50], log-uniform scales on [e^-3, e^3]); each is
// checked on a `grid`-point uniform grid over [0, sqrt(2 pi)/4 * sigma_1].
inline Corollary2Suite run_corollary2_suite(std::size_t profiles, std::size_t grid, std::uint64_t seed) {
  if (grid < 2) throw std::domain_error("run_corollary2_suite: grid must have >= 2 points");
  const CounterStream source(mix_seed(seed, purpose::corollary2));
  Corollary2Suite suite;
  suite.grid_points = grid;
  std::vector<double> scales;
  for (std::size_t c = 0; c < profiles; ++c) {
    StreamCursor rng(source, c);
    const auto n = static_cast<std::size_t>(rng.integer(1, 50));
    scales.resize(n);
    for (double& s : scales) s = std::exp(rng.uniform(-3.0, 3.0));
    const double sigma1 = *std::min_element(scales.begin(), scales.end());
    const double limit = corollary2_safe_threshold(sigma1);
    double profile_min = 1.0;
    for (std::size_t k = 0; k < grid; ++k) {
      const double t = limit * static_cast<double>(k) / static_cast<double>(grid - 1);
      const Corollary2Result r = corollary2_range_check(scales, t);
      profile_min = std::min(profile_min, r.p_min);
      if (r.p_min < constants::bernoulli_band_low - kCorollary2Tolerance) ++suite.grid_violations;
    }
    suite.worst_p_min = std::min(suite.worst_p_min, profile_min);
    suite.per_profile_p_min.push_back(profile_min);
    const Corollary2Result at_sigma1 = corollary2_range_check(scales, sigma1);
    suite.witness_p_at_sigma1 = std::max(suite.witness_p_at_sigma1, at_sigma1.p_min);
    if (!(at_sigma1.p_min < constants::bernoulli_band_low)) ++suite.vacuity_failures;
    ++suite.profiles;
  }
  return suite;
}

struct DominanceFailure {
  std::size_t case_index = 0;
  std::size_t n = 0;
  DominanceResult result;
};

struct DominanceSuite {
  std::size_t cases = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();  // min rhs/lhs
  std::size_t worst_n = 0;
  std::vector<DominanceFailure> failures;
  // Same profiles with the trimmed sum starting at i = ceil(sqrt n), i.e.
  // one fewer scale dropped.
  std::size_t failures_inclusive_range = 0;
  std::vector<std::size_t> sizes;  // per case
  std::vector<double> ratios;      // per case
};

// Random ascending profiles: n uniform on [4, max_n], log sigma uniform on
// [-s, s] with the spread s itself uniform on [0, 5].
inline VarianceProfile random_dominance_profile(StreamCursor& rng, std::size_t max_n) {
  const auto n = static_cast<std::size_t>(rng.integer(4, static_cast<std::int64_t>(max_n)));
  const double spread = rng.uniform(0.0, 5.0);
  std::vector<double> s(n);
  for (double& x : s) x = std::exp(rng.uniform(-spread, spread));
  return VarianceProfile(std::move(s));
}

inline DominanceSuite run_dominance_suite(std::size_t cases, std::size_t max_n, std::uint64_t seed) {
  if (max_n < 4) throw std::domain_error("run_dominance_suite: max_n must be >= 4");
  const CounterStream source(mix_seed(seed, purpose::dominance));
  DominanceSuite suite;
  for (std::size_t c = 0; c < cases; ++c) {
    StreamCursor rng(source, c);
    const VarianceProfile profile = random_dominance_profile(rng, max_n);
    const DominanceResult r = dominance_check(profile);
    ++suite.cases;
    suite.sizes.push_back(profile.size());
    suite.ratios.push_back(r.ratio);
    if (r.ratio < suite.worst_ratio) {
      suite.worst_ratio = r.ratio;
      suite.worst_n = profile.size();
    }
    if (!r.holds) suite.failures.push_back({c, profile.size(), r});
    if (!dominance_check(profile, ceil_sqrt(profile.size()) - 1).holds) ++suite.failures_inclusive_range;
  }
  return suite;
}

}  // namespace hetmed
