#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli_error.hpp"
#include "config.hpp"
#include "csv_io.hpp"
#include "hetmed/hetmed.hpp"

namespace hetmed::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string display(double x) {
  if (std::isnan(x)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "hetmed";
  for (const auto& a : args) s += " " + a;
  return s;
}

// Manifest without timestamps, for files that must be byte-stable.
std::string manifest_comment(const json& manifest) {
  json stable = manifest;
  stable.erase("started");
  stable.erase("finished");
  return "# manifest " + stable.dump();
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
  std::string input;
  bool json_output = false;
  bool require_mle = false;
};

int cmd_estimate(const EstimateOptions& opt, const std::string& command, std::ostream& out) {
  const std::string started = utc_timestamp();
  const Observations obs = read_observations(opt.input);
  if (opt.require_mle && !obs.sigmas) {
    throw CliError(kMissingData, "--mle needs a 'sigma' column in '" + opt.input + "'");
  }
  const double mean = empirical_mean(obs.values);
  const double median = empirical_median(obs.values);
  std::optional<double> mle;
  if (obs.sigmas) mle = mle_oracle(obs.values, *obs.sigmas);

  const json config = {{"input", opt.input}, {"json", opt.json_output}, {"mle", opt.require_mle}};
  const json manifest = make_manifest(command, config, nullptr, started, utc_timestamp());
  if (opt.json_output) {
    json doc = {{"n", obs.values.size()}, {"mean", mean}, {"median", median},
                {"mle", mle ? json(*mle) : json(nullptr)}, {"manifest", manifest}};
    out << doc.dump(2) << '\n';
    return kSuccess;
  }
  out << manifest_comment(manifest) << '\n';
  out << "n       " << obs.values.size() << '\n';
  out << "mean    " << display(mean) << '\n';
  out << "median  " << display(median) << '\n';
  out << "mle     " << (mle ? display(*mle) + "  (oracle, uses the sigma column)" : std::string("- (no sigma column)"))
      << '\n';
  return kSuccess;
}

// ------------------------------------------------------------------ bounds

struct BoundsOptions {
  std::string profile_spec;
  std::string sigmas_path;
  double delta = 0.1;
  std::optional<double> beta;
  std::string family = "gaussian";
  bool json_output = false;
};

int cmd_bounds(const BoundsOptions& opt, const std::string& command, std::ostream& out) {
  const std::string started = utc_timestamp();
  if (opt.profile_spec.empty() == opt.sigmas_path.empty()) {
    throw CliError(kInputError, "give exactly one of --profile or --sigmas");
  }
  if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw CliError(kInputError, "--delta must lie in (0, 1)");
  if (opt.beta && !(*opt.beta > 0.0)) throw CliError(kInputError, "--beta must be > 0");

  std::optional<VarianceProfile> profile;
  json profile_echo;
  if (!opt.profile_spec.empty()) {
    const auto [spec, n] = parse_profile_spec(opt.profile_spec);
    profile.emplace(materialize_profile(spec, n));
    profile_echo = {{"spec", to_json(spec)}, {"n", n}};
  } else {
    profile.emplace(read_profile_file(opt.sigmas_path));
    profile_echo = {{"sigmas_file", opt.sigmas_path}, {"n", profile->size()}};
  }
  const Family family = parse_family(opt.family);
  const double c_const = constant_c_for(family);
  const std::vector<BoundReport> reports = compare_all(*profile, opt.delta, opt.beta, c_const);

  const json config = {{"profile", profile_echo},
                       {"delta", opt.delta},
                       {"beta", opt.beta ? json(*opt.beta) : json(nullptr)},
                       {"family", to_json(family)},
                       {"c_const", c_const}};
  const json manifest = make_manifest(command, config, nullptr, started, utc_timestamp());

  if (opt.json_output) {
    json rows = json::array();
    for (const auto& r : reports) {
      rows.push_back({{"bound_name", std::string(wire_name(r.name))},
                      {"value", number_or_null(r.value)},
                      {"delta", r.delta},
                      {"trim_index", r.trim_index},
                      {"applicable", r.applicable},
                      {"applicability_note", r.note}});
    }
    out << json{{"bounds", rows}, {"manifest", manifest}}.dump(2) << '\n';
    return kSuccess;
  }
  out << manifest_comment(manifest) << '\n';
  out << std::left << std::setw(20) << "bound" << std::setw(18) << "value" << std::setw(8) << "j" << std::setw(12)
      << "applicable"
      << "note\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(20) << wire_name(r.name) << std::setw(18) << display(r.value) << std::setw(8)
        << r.trim_index << std::setw(12) << (r.applicable ? "yes" : "no") << r.note << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
};

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError(kIoError, "cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw CliError(kIoError, "failed writing '" + path.string() + "'");
}

std::string coverage_csv(const CoverageReport& report, const json& manifest) {
  std::ostringstream os;
  os << manifest_comment(manifest) << '\n';
  os << "bound_name,delta,bound_value,trials,exceedances,empirical,ci_low,ci_high,verdict\n";
  for (const auto& r : report.rows) {
    os << wire_name(r.bound) << ',' << format_full(r.delta) << ',' << format_full(r.bound_value) << ',' << r.trials
       << ',' << r.exceedances << ',' << format_full(r.empirical) << ',' << format_full(r.ci.low) << ','
       << format_full(r.ci.high) << ',' << verdict_name(r.verdict) << '\n';
  }
  return os.str();
}

std::string quantiles_csv(const std::vector<QuantileRow>& rows, const json& manifest) {
  std::ostringstream os;
  os << manifest_comment(manifest) << '\n';
  os << "estimator,q50,q90,q99\n";
  for (const auto& r : rows) {
    os << r.estimator << ',' << format_full(r.q50) << ',' << format_full(r.q90) << ',' << format_full(r.q99) << '\n';
  }
  return os.str();
}

int cmd_simulate(const SimulateOptions& opt, const std::string& command, std::ostream& out) {
  const std::string started = utc_timestamp();
  std::ifstream in(opt.config_path);
  if (!in) throw CliError(kIoError, "cannot open '" + opt.config_path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError(kInputError, "config is not valid JSON: " + std::string(e.what()));
  }
  const SimulationConfig config = parse_simulation_config(doc);
  const ExperimentResult result = run_experiment(config, resolve_threads(opt.threads));

  const fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError(kIoError, "cannot create '" + dir.string() + "': " + ec.message());

  // Embedded copies carry everything needed to rerun; only manifest.json has
  // wall-clock timestamps.
  const json config_echo = to_json(config);
  const json stable = make_manifest(command, config_echo, config.seed, "", "");
  write_text_file(dir / "coverage.csv", coverage_csv(result.coverage, stable));
  write_text_file(dir / "quantiles.csv", quantiles_csv(result.quantiles, stable));
  const json manifest = make_manifest(command, config_echo, config.seed, started, utc_timestamp());
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  out << std::left << std::setw(20) << "bound" << std::setw(8) << "delta" << std::setw(16) << "value" << std::setw(12)
      << "exceed" << std::setw(32) << "99% CI" << "verdict\n";
  for (const auto& r : result.coverage.rows) {
    std::ostringstream ci;
    ci << '[' << display(r.ci.low) << ", " << display(r.ci.high) << ']';
    out << std::left << std::setw(20) << wire_name(r.bound) << std::setw(8) << display(r.delta) << std::setw(16)
        << display(r.bound_value) << std::setw(12) << (std::to_string(r.exceedances) + "/" + std::to_string(r.trials))
        << std::setw(32) << ci.str() << verdict_name(r.verdict) << '\n';
  }
  out << '\n' << std::setw(12) << "estimator" << std::setw(16) << "q50" << std::setw(16) << "q90" << "q99\n";
  for (const auto& q : result.quantiles) {
    out << std::setw(12) << q.estimator << std::setw(16) << display(q.q50) << std::setw(16) << display(q.q90)
        << display(q.q99) << '\n';
  }
  out << "wrote " << (dir / "coverage.csv").string() << ", " << (dir / "quantiles.csv").string() << ", "
      << (dir / "manifest.json").string() << '\n';
  return result.coverage.any_violated() ? kCheckFailed : kSuccess;
}

// ------------------------------------------------------------------ verify

struct VerifyOptions {
  std::vector<std::size_t> n_list{20, 40, 60, 100, 200};
  std::vector<double> delta_list{0.05, 0.1, 0.25};
  std::string p_mode = "half";
  std::size_t cases = 0;  // 0 -> per-subcommand default
  std::size_t max_n = 0;
  std::size_t grid = 1000;
  std::uint64_t seed = 7;
  bool verbose = false;
};

std::size_t or_default(std::size_t v, std::size_t fallback) { return v == 0 ? fallback : v; }

int verify_lemma1(const VerifyOptions& opt, std::ostream& out) {
  for (std::size_t n : opt.n_list) {
    if (n == 0) throw CliError(kInputError, "--n-list entries must be >= 1");
    for (double d : opt.delta_list) {
      if (!(d > std::exp(-static_cast<double>(n)) && d < 1.0)) {
        throw CliError(kInputError, "delta " + display(d) + " outside (exp(-n), 1) for n = " + std::to_string(n));
      }
    }
  }
  const BernoulliMode mode = opt.p_mode == "random" ? BernoulliMode::random : BernoulliMode::half;
  const Lemma1Suite suite = run_lemma1_suite(opt.n_list, opt.delta_list, mode, or_default(opt.cases, 50), opt.seed);
  out << "lemma1: P(S >= E[S] + c sqrt(n log(2/delta))) >= delta/2, c = 0.3 (and 1 - 1/sqrt2)\n";
  for (const auto& c : suite.cases) {
    const auto& r = c.result;
    out << "n=" << r.n << " delta=" << display(r.delta) << " case=" << c.case_index << " E[S]=" << display(r.mean)
        << " threshold=" << display(r.stated.threshold) << " k=" << r.stated.k_min
        << " tail=" << display(r.stated.tail) << " target=" << display(r.stated.target)
        << " margin=" << display(r.stated.margin) << (r.stated.holds ? " holds" : " FAILS")
        << " | c=0.2929 tail=" << display(r.exact.tail) << (r.exact.holds ? " holds" : " FAILS")
        << (r.report_only ? " [report-only: delta > 1/4]" : "") << '\n';
  }
  const std::size_t failures = suite.failures();
  out << "lemma1: " << suite.cases.size() << " cases, " << failures << " failure(s)\n";
  return failures == 0 ? kSuccess : kCheckFailed;
}

int verify_lemma2(const VerifyOptions& opt, std::ostream& out) {
  const std::size_t max_n = or_default(opt.max_n, 31);
  const Lemma2Suite suite = run_lemma2_suite(or_default(opt.cases, 100000), max_n, opt.seed);
  out << "lemma2: median >= t  <=>  D(t) >= B(t); " << suite.instances << " instances, n <= " << max_n << ", "
      << suite.ties_at_data_point << " with t on a data point, " << suite.disagreements << " disagreement(s)\n";
  if (suite.first_disagreement) out << "first disagreement at case " << *suite.first_disagreement << '\n';
  return suite.disagreements == 0 ? kSuccess : kCheckFailed;
}

int verify_cor2(const VerifyOptions& opt, std::ostream& out) {
  if (opt.grid < 2) throw CliError(kInputError, "--grid must be >= 2");
  const Corollary2Suite suite = run_corollary2_suite(or_default(opt.cases, 100), opt.grid, opt.seed);
  out << "cor2: min_i P(X_i >= t) on t in [0, sqrt(2 pi)/4 sigma_1]\n";
  for (std::size_t i = 0; i < suite.per_profile_p_min.size(); ++i) {
    if (opt.verbose || suite.per_profile_p_min[i] < constants::bernoulli_band_low - kCorollary2Tolerance) {
      out << "profile=" << i << " min_p=" << display(suite.per_profile_p_min[i])
          << " margin=" << display(suite.per_profile_p_min[i] - constants::bernoulli_band_low) << '\n';
    }
  }
  out << "cor2: " << suite.profiles << " profiles x " << suite.grid_points
      << " grid points, worst min_p=" << display(suite.worst_p_min) << ", violations=" << suite.grid_violations
      << "; at t = sigma_1 largest p_1=" << display(suite.witness_p_at_sigma1)
      << " (non-vacuity failures: " << suite.vacuity_failures << ")\n";
  return suite.grid_violations == 0 && suite.vacuity_failures == 0 ? kSuccess : kCheckFailed;
}

int verify_dominance(const VerifyOptions& opt, std::ostream& out) {
  const std::size_t max_n = or_default(opt.max_n, 2000);
  if (max_n < 4) throw CliError(kInputError, "--max-n must be >= 4");
  const DominanceSuite suite = run_dominance_suite(or_default(opt.cases, 10000), max_n, opt.seed);
  out << "dominance: sqrt(n) / sum_{i>ceil(sqrt n)} 1/sigma_i <= 2 sqrt2 sqrt(sum sigma_i^2) / n\n";
  if (opt.verbose) {
    for (std::size_t i = 0; i < suite.ratios.size(); ++i) {
      out << "case=" << i << " n=" << suite.sizes[i] << " ratio=" << display(suite.ratios[i]) << '\n';
    }
  }
  for (const auto& f : suite.failures) {
    out << "FAIL case=" << f.case_index << " n=" << f.n << " lhs=" << display(f.result.lhs)
        << " rhs=" << display(f.result.rhs) << " ratio=" << display(f.result.ratio) << '\n';
  }
  out << "dominance: " << suite.cases << " profiles, n in [4, " << max_n << "], worst ratio "
      << display(suite.worst_ratio) << " (n=" << suite.worst_n << "), " << suite.failures.size()
      << " failure(s); trimming from i = ceil(sqrt n) instead: " << suite.failures_inclusive_range
      << " failure(s)\n";
  return suite.failures.empty() ? kSuccess : kCheckFailed;
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json make_manifest(const std::string& command, const json& config, const json& seed, const std::string& started,
                   const std::string& finished) {
  return {{"command", command},
          {"config", config},
          {"seed", seed},
          {"artifact_version", kArtifactVersion},
          {"started", started},
          {"finished", finished}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Median-based location estimation for heteroscedastic data: estimators, deviation bounds, "
               "exact verification and Monte Carlo coverage."};
  app.name("hetmed");
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Mean, median and (with a sigma column) oracle MLE of a CSV");
  estimate->add_option("input", est.input, "CSV with header 'value' or 'value,sigma'")->required();
  estimate->add_flag("--json", est.json_output, "Emit one JSON object");
  estimate->add_flag("--mle", est.require_mle, "Require the sigma column (exit 4 if absent)");

  BoundsOptions bnd;
  double beta_value = 0.0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate every deviation bound for a scale profile");
  auto* profile_opt = bounds->add_option("--profile", bnd.profile_spec, "e.g. constant:1,n=1000 or geometric:1,1.2,n=50");
  bounds->add_option("--sigmas", bnd.sigmas_path, "File with one scale per line")->excludes(profile_opt);
  bounds->add_option("--delta", bnd.delta, "Confidence parameter in (0, 1)")->required();
  auto* beta_opt = bounds->add_option("--beta", beta_value, "Tail constant for the heavy-tail bound");
  bounds->add_option("--family", bnd.family, "gaussian | laplace | cauchy | student_t[:nu]")->capture_default_str();
  bounds->add_flag("--json", bnd.json_output, "Emit JSON");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage and estimator comparison from a JSON config");
  simulate->add_option("config", sim.config_path, "JSON experiment config")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = hardware)")
      ->envname("HETMED_THREADS")
      ->capture_default_str();

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "Exact and randomized verification suites");
  verify->require_subcommand(1);
  auto add_common = [&ver](CLI::App* sub) {
    sub->add_option("--seed", ver.seed, "Seed")->capture_default_str();
    sub->add_flag("--verbose", ver.verbose, "Print every case");
  };
  auto* v_lemma1 = verify->add_subcommand("lemma1", "Exact Poisson-binomial anticoncentration check");
  v_lemma1->add_option("--n-list", ver.n_list, "Comma-separated n values")->delimiter(',')->capture_default_str();
  v_lemma1->add_option("--delta-list", ver.delta_list, "Comma-separated deltas")->delimiter(',')->capture_default_str();
  v_lemma1->add_option("--p-mode", ver.p_mode, "half | random")
      ->check(CLI::IsMember({"half", "random"}))
      ->capture_default_str();
  v_lemma1->add_option("--cases", ver.cases, "Random draws per (n, delta) in random mode [50]");
  add_common(v_lemma1);
  auto* v_lemma2 = verify->add_subcommand("lemma2", "Median / counting equivalence on random instances");
  v_lemma2->add_option("--cases", ver.cases, "Instances [100000]");
  v_lemma2->add_option("--max-n", ver.max_n, "Largest sample size [31]");
  add_common(v_lemma2);
  auto* v_cor2 = verify->add_subcommand("cor2", "Bernoulli band check below sqrt(2 pi)/4 sigma_1");
  v_cor2->add_option("--grid", ver.grid, "Grid points per profile")->capture_default_str();
  v_cor2->add_option("--cases", ver.cases, "Random profiles [100]");
  add_common(v_cor2);
  auto* v_dom = verify->add_subcommand("dominance", "Trimmed median scale vs mean scale on random profiles");
  v_dom->add_option("--cases", ver.cases, "Random profiles [10000]");
  v_dom->add_option("--max-n", ver.max_n, "Largest n [2000]");
  add_common(v_dom);

  std::vector<const char*> argv{"hetmed"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }
  if (*beta_opt) bnd.beta = beta_value;

  const std::string command = join_args(args);
  try {
    if (*estimate) return cmd_estimate(est, command, out);
    if (*bounds) return cmd_bounds(bnd, command, out);
    if (*simulate) return cmd_simulate(sim, command, out);
    if (*v_lemma1) return verify_lemma1(ver, out);
    if (*v_lemma2) return verify_lemma2(ver, out);
    if (*v_cor2) return verify_cor2(ver, out);
    if (*v_dom) return verify_dominance(ver, out);
  } catch (const CliError& e) {
    err << "hetmed: " << e.what() << '\n';
    return e.code();
  } catch (const std::domain_error& e) {
    err << "hetmed: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "hetmed: unexpected error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace hetmed::cli
