#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "hetmed/numeric.hpp"

namespace hetmed {

enum class FamilyKind { gaussian, laplace, student_t, cauchy };

// Unit-scale symmetric family, centred at zero. X = theta + sigma * Z.
struct Family {
  FamilyKind kind = FamilyKind::gaussian;
  double nu = 3.0;  // degrees of freedom, student_t only

  static Family gaussian() { return {FamilyKind::gaussian, 0.0}; }
  static Family laplace() { return {FamilyKind::laplace, 0.0}; }
  static Family cauchy() { return {FamilyKind::cauchy, 0.0}; }
  static Family student_t(double nu = 3.0) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw std::domain_error("student_t: nu must be finite and > 0");
    return {FamilyKind::student_t, nu};
  }

  [[nodiscard]] bool has_finite_variance() const noexcept {
    switch (kind) {
      case FamilyKind::gaussian:
      case FamilyKind::laplace: return true;
      case FamilyKind::student_t: return nu > 2.0;
      case FamilyKind::cauchy: return false;
    }
    return false;
  }

  friend bool operator==(const Family&, const Family&) = default;
};

inline std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::laplace: return "laplace";
    case FamilyKind::student_t: return "student_t";
    case FamilyKind::cauchy: return "cauchy";
  }
  return "unknown";
}

inline std::string describe(const Family& f) {
  if (f.kind == FamilyKind::student_t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "student_t(%g)", f.nu);
    return buf;
  }
  return family_name(f.kind);
}

inline double unit_density(const Family& f, double x) {
  switch (f.kind) {
    case FamilyKind::gaussian: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case FamilyKind::laplace: return 0.5 * std::exp(-std::fabs(x));
    case FamilyKind::cauchy: return 1.0 / (std::numbers::pi * (1.0 + x * x));
    case FamilyKind::student_t: {
      const double nu = f.nu;
      const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                              0.5 * std::log(nu * std::numbers::pi);
      return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
    }
  }
  throw std::domain_error("unit_density: unsupported family");
}

// Inverse distribution function of the unit family, u in (0, 1).
// Laplace and Cauchy are closed form; Gaussian uses normal_quantile
// (~1e-15 absolute); Student-t delegates to Boost.Math.
inline double unit_quantile(const Family& f, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("unit_quantile: u must lie in (0, 1)");
  switch (f.kind) {
    case FamilyKind::gaussian: return normal_quantile(u);
    case FamilyKind::laplace: return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
    case FamilyKind::cauchy: return std::tan(std::numbers::pi * (u - 0.5));
    case FamilyKind::student_t:
      return boost::math::quantile(boost::math::students_t_distribution<double>(f.nu), u);
  }
  throw std::domain_error("unit_quantile: unsupported family");
}

// Constant C with P(0 <= Z <= t) >= C t on [0, 1]. For a symmetric unimodal
// unit density this is f(1), since f is non-increasing on [0, 1].
inline double constant_c_for(const Family& f) {
  if (f.kind == FamilyKind::student_t && !(f.nu > 0.0)) {
    throw std::domain_error("constant_c_for: student_t needs nu > 0");
  }
  return unit_density(f, 1.0);
}

}  // namespace hetmed
