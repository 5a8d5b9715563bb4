#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hetmed/bounds.hpp"
#include "hetmed/distributions.hpp"
#include "hetmed/estimators.hpp"
#include "hetmed/numeric.hpp"
#include "hetmed/random.hpp"

namespace hetmed {

// How to build a scale profile of length n.
struct ProfileSpec {
  enum class Kind { constant, geometric, polynomial, one_tiny, one_huge, explicit_list };

  Kind kind = Kind::constant;
  double first = 1.0;   // sigma (constant), sigma_0 (geometric), exponent (polynomial), epsilon, M
  double second = 1.0;  // ratio (geometric)
  std::vector<double> sigmas;  // explicit_list

  static ProfileSpec constant(double sigma) { return {Kind::constant, sigma, 1.0, {}}; }
  static ProfileSpec geometric(double sigma0, double ratio) { return {Kind::geometric, sigma0, ratio, {}}; }
  static ProfileSpec polynomial(double exponent) { return {Kind::polynomial, exponent, 1.0, {}}; }
  static ProfileSpec one_tiny(double epsilon) { return {Kind::one_tiny, epsilon, 1.0, {}}; }
  static ProfileSpec one_huge(double magnitude) { return {Kind::one_huge, magnitude, 1.0, {}}; }
  static ProfileSpec explicit_list(std::vector<double> sigmas) {
    return {Kind::explicit_list, 1.0, 1.0, std::move(sigmas)};
  }
};

inline std::string kind_name(ProfileSpec::Kind kind) {
  switch (kind) {
    case ProfileSpec::Kind::constant: return "constant";
    case ProfileSpec::Kind::geometric: return "geometric";
    case ProfileSpec::Kind::polynomial: return "polynomial";
    case ProfileSpec::Kind::one_tiny: return "one_tiny";
    case ProfileSpec::Kind::one_huge: return "one_huge";
    case ProfileSpec::Kind::explicit_list: return "explicit";
  }
  return "unknown";
}

inline VarianceProfile materialize_profile(const ProfileSpec& spec, std::size_t n) {
  if (n == 0) throw std::domain_error("materialize_profile: n must be >= 1");
  auto require_positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::domain_error(std::string("materialize_profile: ") + what + " must be finite and > 0");
    }
  };
  std::vector<double> s(n, 1.0);
  switch (spec.kind) {
    case ProfileSpec::Kind::constant:
      require_positive(spec.first, "sigma");
      std::fill(s.begin(), s.end(), spec.first);
      break;
    case ProfileSpec::Kind::geometric:
      require_positive(spec.first, "sigma0");
      require_positive(spec.second, "ratio");
      for (std::size_t i = 0; i < n; ++i) s[i] = spec.first * std::pow(spec.second, static_cast<double>(i));
      break;
    case ProfileSpec::Kind::polynomial:
      require_positive(spec.first, "exponent");
      for (std::size_t i = 0; i < n; ++i) s[i] = std::pow(static_cast<double>(i + 1), spec.first);
      break;
    case ProfileSpec::Kind::one_tiny:
      require_positive(spec.first, "epsilon");
      s.front() = spec.first;
      break;
    case ProfileSpec::Kind::one_huge:
      require_positive(spec.first, "magnitude");
      s.back() = spec.first;
      break;
    case ProfileSpec::Kind::explicit_list:
      if (spec.sigmas.size() != n) throw std::domain_error("materialize_profile: explicit list length != n");
      for (double x : spec.sigmas) require_positive(x, "sigma");
      s = spec.sigmas;
      break;
  }
  return VarianceProfile(std::move(s));
}

struct SimulationConfig {
  Family family = Family::gaussian();
  ProfileSpec profile = ProfileSpec::constant(1.0);
  std::size_t n = 1;
  double theta = 0.0;
  std::vector<double> deltas{0.1};
  std::size_t trials = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw std::domain_error("SimulationConfig: n must be >= 1");
    if (trials < 1) throw std::domain_error("SimulationConfig: trials must be >= 1");
    if (!std::isfinite(theta)) throw std::domain_error("SimulationConfig: theta must be finite");
    if (deltas.empty()) throw std::domain_error("SimulationConfig: deltas must be non-empty");
    for (double d : deltas) {
      if (!(d > 0.0 && d < 1.0)) throw std::domain_error("SimulationConfig: every delta must lie in (0, 1)");
    }
    if (family.kind == FamilyKind::student_t && !(family.nu > 0.0)) {
      throw std::domain_error("SimulationConfig: student_t needs nu > 0");
    }
    (void)materialize_profile(profile, n);
  }
};

// Writes theta + sigma_i * Z_i into `out`, with Z_i driven by the uniform at
// counter (trial_index, i) under `seed`.
inline void fill_observations(const Family& family, double theta, std::span<const double> sigmas,
                              std::uint64_t seed, std::uint64_t trial_index, std::span<double> out) {
  const CounterStream stream(seed);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    out[i] = theta + sigmas[i] * unit_quantile(family, stream.uniform(trial_index, i));
  }
}

inline Dataset generate_dataset(const Family& family, double theta, const VarianceProfile& profile,
                                std::uint64_t seed, std::uint64_t trial_index) {
  std::vector<double> values(profile.size());
  fill_observations(family, theta, profile.sigmas(), seed, trial_index, values);
  return Dataset(std::move(values), std::vector<double>(profile.sigmas().begin(), profile.sigmas().end()), theta);
}

// |estimate - theta| per trial, indexed by trial.
struct TrialErrors {
  std::vector<double> median;
  std::vector<double> mean;
  std::vector<double> mle;
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Each trial is a pure function of (config, trial index) and writes only its
// own slot, so the result does not depend on the thread count.
inline TrialErrors run_trials(const SimulationConfig& config, unsigned threads = 1) {
  config.validate();
  const VarianceProfile profile = materialize_profile(config.profile, config.n);
  const std::size_t trials = config.trials;
  TrialErrors errors;
  errors.median.assign(trials, 0.0);
  errors.mean.assign(trials, 0.0);
  errors.mle.assign(trials, 0.0);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> buffer(profile.size());
    for (std::size_t t = begin; t < end; ++t) {
      fill_observations(config.family, config.theta, profile.sigmas(), config.seed, t, buffer);
      errors.mean[t] = std::fabs(empirical_mean(buffer) - config.theta);
      errors.mle[t] = std::fabs(mle_oracle(buffer, profile.sigmas()) - config.theta);
      errors.median[t] = std::fabs(empirical_median_inplace(buffer) - config.theta);
    }
  };

  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), trials);
  if (workers <= 1) {
    work(0, trials);
    return errors;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
  }
  return errors;
}

enum class Verdict { consistent, violated, inapplicable };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::violated: return "violated";
    case Verdict::inapplicable: return "inapplicable";
  }
  return "unknown";
}

inline constexpr double kCoverageAlpha = 0.01;  // 99% Clopper-Pearson

struct CoverageRow {
  BoundName bound = BoundName::mean;
  double delta = 0.0;
  double bound_value = 0.0;
  std::size_t trim_index = 0;  // j / k_t of the bound
  long long trials = 0;
  long long exceedances = 0;
  double empirical = 0.0;
  Interval ci;
  Verdict verdict = Verdict::inapplicable;
  std::string note;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;

  [[nodiscard]] bool any_violated() const noexcept {
    return std::any_of(rows.begin(), rows.end(), [](const CoverageRow& r) { return r.verdict == Verdict::violated; });
  }

  [[nodiscard]] const CoverageRow* find(BoundName bound, double delta) const noexcept {
    for (const auto& r : rows) {
      if (r.bound == bound && r.delta == delta) return &r;
    }
    return nullptr;
  }
};

namespace detail {

inline std::optional<std::string> family_blocks(BoundName bound, const Family& family) {
  if (family.kind == FamilyKind::gaussian) return std::nullopt;
  switch (bound) {
    case BoundName::median_upper: return std::nullopt;
    case BoundName::mean:
    case BoundName::mle:
      if (!family.has_finite_variance()) return "undefined variance for " + describe(family);
      return "Gaussian-tail bound; family is " + describe(family);
    default: return "Gaussian-only bound; family is " + describe(family);
  }
}

}  // namespace detail

// Tallies, for every bound and delta, how often the matching estimator error
// crosses the bound. Upper bounds count |err| > value and are violated when
// the whole CI lies above delta; the lower bound counts |err| >= value and is
// violated when the whole CI lies below delta.
inline CoverageReport coverage_from_errors(const SimulationConfig& config, const VarianceProfile& profile,
                                           const TrialErrors& errors) {
  const double c_family = constant_c_for(config.family);
  CoverageReport report;
  for (double delta : config.deltas) {
    const BoundReport bounds[] = {
        mean_deviation_bound(profile, delta),
        mle_deviation_bound(profile, delta),
        median_upper_bound(profile, delta, c_family),
        median_upper_bound_gaussian(profile, delta),
        median_lower_bound_gaussian(profile, delta),
        xia_bound(profile, delta),
    };
    for (const BoundReport& b : bounds) {
      CoverageRow row;
      row.bound = b.name;
      row.delta = delta;
      row.bound_value = b.value;
      row.trim_index = b.trim_index;
      row.trials = static_cast<long long>(errors.median.size());
      row.note = b.note;

      const std::vector<double>& err = b.name == BoundName::mean  ? errors.mean
                                       : b.name == BoundName::mle ? errors.mle
                                                                  : errors.median;
      const bool lower = is_lower_bound(b.name);
      if (std::isfinite(b.value)) {
        for (double e : err) row.exceedances += lower ? (e >= b.value) : (e > b.value);
      }
      row.empirical = static_cast<double>(row.exceedances) / static_cast<double>(row.trials);
      row.ci = clopper_pearson(row.exceedances, row.trials, kCoverageAlpha);

      const auto blocked = detail::family_blocks(b.name, config.family);
      if (blocked) {
        row.verdict = Verdict::inapplicable;
        row.note = *blocked;
      } else if (!b.applicable) {
        row.verdict = Verdict::inapplicable;
      } else if (lower) {
        row.verdict = row.ci.high < delta ? Verdict::violated : Verdict::consistent;
      } else {
        row.verdict = row.ci.low > delta ? Verdict::violated : Verdict::consistent;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

inline CoverageReport run_coverage(const SimulationConfig& config, unsigned threads = 1) {
  const VarianceProfile profile = materialize_profile(config.profile, config.n);
  return coverage_from_errors(config, profile, run_trials(config, threads));
}

struct QuantileRow {
  std::string estimator;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
};

// Inverse empirical distribution function: the ceil(q m)-th smallest value.
inline double empirical_quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::domain_error("empirical_quantile: empty sample");
  const auto m = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * m));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

inline QuantileRow quantile_row(std::string name, std::vector<double> errors) {
  std::sort(errors.begin(), errors.end());
  return {std::move(name), empirical_quantile_sorted(errors, 0.5), empirical_quantile_sorted(errors, 0.9),
          empirical_quantile_sorted(errors, 0.99)};
}

inline std::vector<QuantileRow> quantiles_from_errors(const TrialErrors& errors) {
  return {quantile_row("median", errors.median), quantile_row("mean", errors.mean),
          quantile_row("mle_oracle", errors.mle)};
}

inline std::vector<QuantileRow> run_estimator_comparison(const SimulationConfig& config, unsigned threads = 1) {
  return quantiles_from_errors(run_trials(config, threads));
}

struct ExperimentResult {
  CoverageReport coverage;
  std::vector<QuantileRow> quantiles;
};

// Coverage and quantile tables from one shared pass over the trials.
inline ExperimentResult run_experiment(const SimulationConfig& config, unsigned threads = 1) {
  const VarianceProfile profile = materialize_profile(config.profile, config.n);
  const TrialErrors errors = run_trials(config, threads);
  return {coverage_from_errors(config, profile, errors), quantiles_from_errors(errors)};
}

}  // namespace hetmed
