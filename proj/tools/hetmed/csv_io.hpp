#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hetmed::cli {

struct Observations {
  std::vector<double> values;
  std::optional<std::vector<double>> sigmas;  // present iff the header has a sigma column
};

// CSV with header `value` or `value,sigma`; '#' starts a comment line and
// blank lines are skipped. Missing file -> kIoError; malformed header or row
// -> kInputError naming the 1-based line number.
Observations read_observations(const std::filesystem::path& path);

// One strictly positive real per line; an optional non-numeric header line
// and '#' comments are allowed.
std::vector<double> read_profile_file(const std::filesystem::path& path);

// Shortest round-trip representation (17 significant digits); "nan" for NaN.
std::string format_full(double x);

}  // namespace hetmed::cli
