#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "hetmed/simulation.hpp"

using Catch::Matchers::WithinRel;
using namespace hetmed;

namespace {

SimulationConfig small_config() {
  SimulationConfig c;
  c.family = Family::gaussian();
  c.profile = ProfileSpec::geometric(1.0, 1.01);
  c.n = 101;
  c.deltas = {0.05, 0.1};
  c.trials = 400;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("profile materialization") {
  const auto geo = materialize_profile(ProfileSpec::geometric(2.0, 1.5), 3);
  CHECK(geo[0] == 2.0);
  CHECK(geo[1] == 3.0);
  CHECK(geo[2] == 4.5);
  const auto poly = materialize_profile(ProfileSpec::polynomial(2.0), 3);
  CHECK(poly[2] == 9.0);
  const auto tiny = materialize_profile(ProfileSpec::one_tiny(1e-3), 4);
  CHECK(tiny.smallest() == 1e-3);
  CHECK(tiny.largest() == 1.0);
  const auto huge = materialize_profile(ProfileSpec::one_huge(1e6), 4);
  CHECK(huge.largest() == 1e6);
  CHECK(huge[2] == 1.0);
  CHECK(materialize_profile(ProfileSpec::explicit_list({3.0, 1.0}), 2)[0] == 1.0);

  CHECK_THROWS_AS(materialize_profile(ProfileSpec::constant(1.0), 0), std::domain_error);
  CHECK_THROWS_AS(materialize_profile(ProfileSpec::constant(-1.0), 3), std::domain_error);
  CHECK_THROWS_AS(materialize_profile(ProfileSpec::explicit_list({1.0}), 2), std::domain_error);
  CHECK(kind_name(ProfileSpec::Kind::explicit_list) == "explicit");
}

TEST_CASE("config validation") {
  SimulationConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.deltas = {};
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = small_config();
  c.deltas = {1.0};
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = small_config();
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = small_config();
  c.theta = NAN;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
}

TEST_CASE("datasets are reproducible per (seed, trial)") {
  const auto profile = materialize_profile(ProfileSpec::polynomial(1.0), 50);
  const Dataset a = generate_dataset(Family::laplace(), 2.0, profile, 99, 5);
  const Dataset b = generate_dataset(Family::laplace(), 2.0, profile, 99, 5);
  const Dataset c = generate_dataset(Family::laplace(), 2.0, profile, 99, 6);
  REQUIRE(a.size() == 50);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  CHECK(a.true_location() == 2.0);
}

TEST_CASE("degenerate scales concentrate at theta") {
  const auto profile = materialize_profile(ProfileSpec::constant(1e-12), 20);
  const Dataset d = generate_dataset(Family::gaussian(), 3.0, profile, 1, 0);
  for (double x : d.values()) CHECK(std::fabs(x - 3.0) < 1e-10);
}

TEST_CASE("large gaussian sample mean is within 4 standard errors") {
  const std::size_t n = 1000000;
  const auto profile = materialize_profile(ProfileSpec::constant(1.0), n);
  const Dataset d = generate_dataset(Family::gaussian(), 0.0, profile, 2024, 0);
  CHECK(std::fabs(empirical_mean(d)) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("trial errors do not depend on the thread count") {
  const SimulationConfig c = small_config();
  const TrialErrors one = run_trials(c, 1);
  const TrialErrors three = run_trials(c, 3);
  const TrialErrors many = run_trials(c, 64);
  CHECK(one.median == three.median);
  CHECK(one.mean == three.mean);
  CHECK(one.mle == many.mle);
  CHECK(one.median == many.median);
}

TEST_CASE("coverage report rows and verdicts") {
  const SimulationConfig c = small_config();
  const CoverageReport report = run_coverage(c, 2);
  CHECK(report.rows.size() == 6 * c.deltas.size());
  CHECK_FALSE(report.any_violated());
  const CoverageRow* cor1 = report.find(BoundName::median_upper_gaussian, 0.1);
  REQUIRE(cor1 != nullptr);
  CHECK(cor1->trials == 400);
  CHECK(cor1->exceedances == 0);
  CHECK(cor1->verdict == Verdict::consistent);
  CHECK(report.find(BoundName::devroye, 0.1) == nullptr);

  // the report is bit-identical across thread counts
  const CoverageReport again = run_coverage(c, 1);
  REQUIRE(again.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(again.rows[i].exceedances == report.rows[i].exceedances);
    CHECK(std::memcmp(&again.rows[i].ci, &report.rows[i].ci, sizeof(Interval)) == 0);
  }
}

TEST_CASE("a single trial gives a wide interval and no violation") {
  SimulationConfig c = small_config();
  c.trials = 1;
  const CoverageReport report = run_coverage(c);
  CHECK_FALSE(report.any_violated());
  for (const auto& r : report.rows) {
    CHECK(r.ci.high - r.ci.low > 0.99);
  }
}

TEST_CASE("a deliberately tiny bound is flagged as violated") {
  // Errors far larger than the bound: the upper-bound check must fire.
  SimulationConfig c = small_config();
  c.theta = 0.0;
  const VarianceProfile profile = materialize_profile(c.profile, c.n);
  TrialErrors errors;
  errors.median.assign(c.trials, 100.0);
  errors.mean.assign(c.trials, 100.0);
  errors.mle.assign(c.trials, 100.0);
  const CoverageReport report = coverage_from_errors(c, profile, errors);
  CHECK(report.find(BoundName::mean, 0.1)->verdict == Verdict::violated);
  CHECK(report.find(BoundName::median_upper_gaussian, 0.05)->verdict == Verdict::violated);
  // errors of zero make the lower bound fail instead
  errors.median.assign(c.trials, 0.0);
  const CoverageReport low = coverage_from_errors(c, profile, errors);
  CHECK(low.find(BoundName::median_lower_gaussian, 0.1)->verdict == Verdict::violated);
}

TEST_CASE("non-gaussian families mark gaussian-only rows inapplicable") {
  SimulationConfig c = small_config();
  c.family = Family::cauchy();
  const CoverageReport report = run_coverage(c);
  CHECK(report.find(BoundName::mean, 0.1)->verdict == Verdict::inapplicable);
  CHECK(report.find(BoundName::mle, 0.1)->verdict == Verdict::inapplicable);
  CHECK(report.find(BoundName::median_upper_gaussian, 0.1)->verdict == Verdict::inapplicable);
  CHECK(report.find(BoundName::median_lower_gaussian, 0.1)->verdict == Verdict::inapplicable);
  CHECK(report.find(BoundName::xia, 0.1)->verdict == Verdict::inapplicable);
  const CoverageRow* thm1 = report.find(BoundName::median_upper, 0.1);
  CHECK(thm1->verdict == Verdict::consistent);
  CHECK(report.find(BoundName::mean, 0.1)->note.find("undefined variance") != std::string::npos);
}

TEST_CASE("empirical quantiles use the inverse empirical cdf") {
  const std::vector<double> sorted{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(empirical_quantile_sorted(sorted, 0.5) == 5);
  CHECK(empirical_quantile_sorted(sorted, 0.9) == 9);
  CHECK(empirical_quantile_sorted(sorted, 0.99) == 10);
  CHECK(empirical_quantile_sorted(sorted, 0.0) == 1);
  const auto row = quantile_row("x", {3, 1, 2});
  CHECK(row.q50 == 2);
  CHECK(row.q99 == 3);
}

TEST_CASE("median deviation matches its asymptotic scale") {
  // For n = 1001 unit Gaussians the median's sd is ~ sqrt(pi / (2n)).
  SimulationConfig c;
  c.profile = ProfileSpec::constant(1.0);
  c.n = 1001;
  c.trials = 2000;
  c.seed = 3;
  const TrialErrors e = run_trials(c);
  double sq = 0.0;
  for (double x : e.median) sq += x * x;
  const double sd = std::sqrt(sq / static_cast<double>(e.median.size()));
  CHECK_THAT(sd, WithinRel(std::sqrt(std::numbers::pi / (2.0 * 1001)), 0.1));
}
