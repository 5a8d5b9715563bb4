#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli_error.hpp"

namespace hetmed::cli {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double x = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, x);
  if (ec != std::errc{} || ptr != end || !std::isfinite(x)) return std::nullopt;
  return x;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kIoError, "cannot open '" + path.string() + "'");
  return in;
}

bool skippable(const std::string& line) { return line.empty() || line.front() == '#'; }

}  // namespace

Observations read_observations(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  Observations obs;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t columns = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() == 1 && fields[0] == "value") {
        columns = 1;
      } else if (fields.size() == 2 && fields[0] == "value" && fields[1] == "sigma") {
        columns = 2;
        obs.sigmas.emplace();
      } else {
        throw CliError(kInputError, "line " + std::to_string(line_no) + ": expected header 'value' or 'value,sigma'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != columns) {
      throw CliError(kInputError, "row " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                                      " field(s), got " + std::to_string(fields.size()));
    }
    const auto value = parse_real(fields[0]);
    if (!value) throw CliError(kInputError, "row " + std::to_string(line_no) + ": malformed value '" + fields[0] + "'");
    obs.values.push_back(*value);
    if (columns == 2) {
      const auto sigma = parse_real(fields[1]);
      if (!sigma || !(*sigma > 0.0)) {
        throw CliError(kInputError, "row " + std::to_string(line_no) + ": sigma must be a positive real, got '" +
                                        fields[1] + "'");
      }
      obs.sigmas->push_back(*sigma);
    }
  }
  if (!have_header) throw CliError(kInputError, "missing header row in '" + path.string() + "'");
  if (obs.values.empty()) throw CliError(kInputError, "no observations in '" + path.string() + "'");
  return obs;
}

std::vector<double> read_profile_file(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<double> sigmas;
  std::string raw;
  std::size_t line_no = 0;
  bool first_data_line = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (skippable(line)) continue;
    const auto x = parse_real(line);
    if (!x) {
      if (first_data_line) {  // header such as "sigma"
        first_data_line = false;
        continue;
      }
      throw CliError(kInputError, "line " + std::to_string(line_no) + ": malformed scale '" + line + "'");
    }
    first_data_line = false;
    if (!(*x > 0.0)) throw CliError(kInputError, "line " + std::to_string(line_no) + ": scale must be > 0");
    sigmas.push_back(*x);
  }
  if (sigmas.empty()) throw CliError(kInputError, "no scales in '" + path.string() + "'");
  return sigmas;
}

std::string format_full(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace hetmed::cli
