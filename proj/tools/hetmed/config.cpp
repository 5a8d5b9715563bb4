#include "config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "cli_error.hpp"

namespace hetmed::cli {
namespace {

using nlohmann::json;

class SchemaErrors {
 public:
  void add(std::string msg) { messages_.push_back(std::move(msg)); }

  void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.count(key)) add("unknown key '" + where + key + "'");
    }
  }

  void throw_if_any() const {
    if (messages_.empty()) return;
    std::ostringstream os;
    os << "config schema violation:";
    for (const auto& m : messages_) os << "\n  - " << m;
    throw CliError(kInputError, os.str());
  }

 private:
  std::vector<std::string> messages_;
};

double number_field(const json& obj, const std::string& key, const std::string& where, SchemaErrors& errors) {
  if (!obj.contains(key)) {
    errors.add("missing key '" + where + key + "'");
    return 0.0;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    errors.add("key '" + where + key + "' must be a number");
    return 0.0;
  }
  return v.get<double>();
}

std::uint64_t unsigned_field(const json& obj, const std::string& key, SchemaErrors& errors) {
  if (!obj.contains(key)) {
    errors.add("missing key '" + key + "'");
    return 0;
  }
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    errors.add("key '" + key + "' must be a non-negative integer");
    return 0;
  }
  return v.get<std::uint64_t>();
}

Family family_from_json(const json& v, SchemaErrors& errors) {
  try {
    if (v.is_string()) return parse_family(v.get<std::string>());
    if (v.is_object()) {
      errors.check_keys(v, "family.", {"name", "nu"});
      if (!v.contains("name") || !v.at("name").is_string()) {
        errors.add("key 'family.name' must be a string");
        return Family::gaussian();
      }
      const auto name = v.at("name").get<std::string>();
      if (name == "student_t") {
        double nu = 3.0;
        if (v.contains("nu")) nu = number_field(v, "nu", "family.", errors);
        return Family::student_t(nu);
      }
      if (v.contains("nu")) errors.add("key 'family.nu' only applies to student_t");
      return parse_family(name);
    }
  } catch (const CliError& e) {
    errors.add(e.what());
    return Family::gaussian();
  } catch (const std::domain_error& e) {
    errors.add(e.what());
    return Family::gaussian();
  }
  errors.add("key 'family' must be a string or an object");
  return Family::gaussian();
}

ProfileSpec profile_from_json(const json& v, SchemaErrors& errors) {
  if (!v.is_object() || !v.contains("kind") || !v.at("kind").is_string()) {
    errors.add("key 'profile' must be an object with a string 'kind'");
    return ProfileSpec::constant(1.0);
  }
  const auto kind = v.at("kind").get<std::string>();
  const std::string where = "profile.";
  if (kind == "constant") {
    errors.check_keys(v, where, {"kind", "sigma"});
    return ProfileSpec::constant(number_field(v, "sigma", where, errors));
  }
  if (kind == "geometric") {
    errors.check_keys(v, where, {"kind", "sigma0", "ratio"});
    const double s0 = number_field(v, "sigma0", where, errors);
    return ProfileSpec::geometric(s0, number_field(v, "ratio", where, errors));
  }
  if (kind == "polynomial") {
    errors.check_keys(v, where, {"kind", "exponent"});
    return ProfileSpec::polynomial(number_field(v, "exponent", where, errors));
  }
  if (kind == "one_tiny") {
    errors.check_keys(v, where, {"kind", "epsilon"});
    return ProfileSpec::one_tiny(number_field(v, "epsilon", where, errors));
  }
  if (kind == "one_huge") {
    errors.check_keys(v, where, {"kind", "magnitude"});
    return ProfileSpec::one_huge(number_field(v, "magnitude", where, errors));
  }
  if (kind == "explicit") {
    errors.check_keys(v, where, {"kind", "sigmas"});
    std::vector<double> sigmas;
    if (!v.contains("sigmas") || !v.at("sigmas").is_array()) {
      errors.add("key 'profile.sigmas' must be an array of numbers");
    } else {
      for (const auto& x : v.at("sigmas")) {
        if (!x.is_number()) {
          errors.add("key 'profile.sigmas' must contain only numbers");
          break;
        }
        sigmas.push_back(x.get<double>());
      }
    }
    return ProfileSpec::explicit_list(std::move(sigmas));
  }
  errors.add("unknown profile kind '" + kind + "'");
  return ProfileSpec::constant(1.0);
}

double parse_number_token(const std::string& token, const std::string& context) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw CliError(kInputError, "invalid number '" + token + "' in " + context);
  }
  return x;
}

}  // namespace

Family parse_family(const std::string& text) {
  if (text == "gaussian") return Family::gaussian();
  if (text == "laplace") return Family::laplace();
  if (text == "cauchy") return Family::cauchy();
  if (text == "student_t") return Family::student_t();
  if (text.rfind("student_t:", 0) == 0) {
    const double nu = parse_number_token(text.substr(10), "family '" + text + "'");
    if (!(nu > 0.0)) throw CliError(kInputError, "student_t needs nu > 0");
    return Family::student_t(nu);
  }
  throw CliError(kInputError, "unsupported family '" + text + "'");
}

std::pair<ProfileSpec, std::size_t> parse_profile_spec(const std::string& text) {
  const std::string context = "profile spec '" + text + "'";
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CliError(kInputError, context + ": expected '<kind>:<params>,n=<N>'");
  const std::string kind = text.substr(0, colon);

  std::vector<double> params;
  std::optional<std::size_t> n;
  std::stringstream ss(text.substr(colon + 1));
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.rfind("n=", 0) == 0) {
      const double v = parse_number_token(token.substr(2), context);
      if (!(v >= 1.0) || v != std::floor(v)) throw CliError(kInputError, context + ": n must be a positive integer");
      n = static_cast<std::size_t>(v);
    } else {
      params.push_back(parse_number_token(token, context));
    }
  }
  if (!n) throw CliError(kInputError, context + ": missing n=<N>");

  auto expect = [&](std::size_t count) {
    if (params.size() != count) {
      throw CliError(kInputError, context + ": kind '" + kind + "' takes " + std::to_string(count) + " parameter(s)");
    }
  };
  ProfileSpec spec;
  if (kind == "constant") {
    expect(1);
    spec = ProfileSpec::constant(params[0]);
  } else if (kind == "geometric") {
    expect(2);
    spec = ProfileSpec::geometric(params[0], params[1]);
  } else if (kind == "polynomial") {
    expect(1);
    spec = ProfileSpec::polynomial(params[0]);
  } else if (kind == "one_tiny") {
    expect(1);
    spec = ProfileSpec::one_tiny(params[0]);
  } else if (kind == "one_huge") {
    expect(1);
    spec = ProfileSpec::one_huge(params[0]);
  } else {
    throw CliError(kInputError, context + ": unknown kind '" + kind + "'");
  }
  try {
    (void)materialize_profile(spec, *n);
  } catch (const std::domain_error& e) {
    throw CliError(kInputError, context + ": " + e.what());
  }
  return {spec, *n};
}

SimulationConfig parse_simulation_config(const json& doc) {
  SchemaErrors errors;
  if (!doc.is_object()) throw CliError(kInputError, "config must be a JSON object");
  errors.check_keys(doc, "", {"family", "profile", "n", "theta", "deltas", "trials", "seed"});

  SimulationConfig config;
  if (doc.contains("family")) {
    config.family = family_from_json(doc.at("family"), errors);
  } else {
    errors.add("missing key 'family'");
  }
  if (doc.contains("profile")) {
    config.profile = profile_from_json(doc.at("profile"), errors);
  } else {
    errors.add("missing key 'profile'");
  }
  config.n = static_cast<std::size_t>(unsigned_field(doc, "n", errors));
  config.trials = static_cast<std::size_t>(unsigned_field(doc, "trials", errors));
  config.seed = unsigned_field(doc, "seed", errors);
  if (doc.contains("theta")) config.theta = number_field(doc, "theta", "", errors);

  config.deltas.clear();
  if (!doc.contains("deltas") || !doc.at("deltas").is_array()) {
    errors.add("key 'deltas' must be an array of numbers");
  } else {
    for (const auto& d : doc.at("deltas")) {
      if (!d.is_number()) {
        errors.add("key 'deltas' must contain only numbers");
        break;
      }
      config.deltas.push_back(d.get<double>());
    }
  }
  errors.throw_if_any();

  try {
    config.validate();
  } catch (const std::domain_error& e) {
    throw CliError(kInputError, std::string("config schema violation: ") + e.what());
  }
  return config;
}

nlohmann::json to_json(const Family& family) {
  if (family.kind == FamilyKind::student_t) return {{"name", "student_t"}, {"nu", family.nu}};
  return family_name(family.kind);
}

nlohmann::json to_json(const ProfileSpec& spec) {
  json j = {{"kind", kind_name(spec.kind)}};
  switch (spec.kind) {
    case ProfileSpec::Kind::constant: j["sigma"] = spec.first; break;
    case ProfileSpec::Kind::geometric:
      j["sigma0"] = spec.first;
      j["ratio"] = spec.second;
      break;
    case ProfileSpec::Kind::polynomial: j["exponent"] = spec.first; break;
    case ProfileSpec::Kind::one_tiny: j["epsilon"] = spec.first; break;
    case ProfileSpec::Kind::one_huge: j["magnitude"] = spec.first; break;
    case ProfileSpec::Kind::explicit_list: j["sigmas"] = spec.sigmas; break;
  }
  return j;
}

nlohmann::json to_json(const SimulationConfig& config) {
  return {{"family", to_json(config.family)}, {"profile", to_json(config.profile)},
          {"n", config.n},                    {"theta", config.theta},
          {"deltas", config.deltas},          {"trials", config.trials},
          {"seed", config.seed}};
}

}  // namespace hetmed::cli
