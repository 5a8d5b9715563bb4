#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include <json.hpp>

#include "hetmed/distributions.hpp"
#include "hetmed/simulation.hpp"

namespace hetmed::cli {

// Strict reader for the simulate config. Every unknown key, at any level, is
// collected and reported in one kInputError.
//
//   {"family": "gaussian" | {"name": "student_t", "nu": 3},
//    "profile": {"kind": "constant", "sigma": 1},
//    "n": 1001, "theta": 0, "deltas": [0.1], "trials": 20000, "seed": 7}
SimulationConfig parse_simulation_config(const nlohmann::json& doc);

// Fully resolved echo of a config (defaults included).
nlohmann::json to_json(const SimulationConfig& config);
nlohmann::json to_json(const Family& family);
nlohmann::json to_json(const ProfileSpec& spec);

// "gaussian", "laplace", "cauchy", "student_t" (nu = 3) or "student_t:<nu>".
Family parse_family(const std::string& text);

// "<kind>:<p1>[,<p2>],n=<N>", e.g. "constant:1,n=1000" or "geometric:1,1.2,n=1001".
std::pair<ProfileSpec, std::size_t> parse_profile_spec(const std::string& text);

}  // namespace hetmed::cli
