#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "flocksim/errors.hpp"

namespace flocksim {

enum class KernelKind { smooth_default, constant_one, table };

// Communication weight phi(r) for the alignment force: positive, nonincreasing
// and normalized so that max(|phi|, |phi'|) <= 1.
//
// The default kernel phi(r) = (1 + r^2)^(-1/2) satisfies the normalization
// analytically: |phi| <= 1 and |phi'| = r (1 + r^2)^(-3/2) peaks at
// 2 / (3 sqrt 3) ~ 0.385. Table kernels interpolate linearly between samples
// and extend by the last value; their bounds are checked numerically.
class Kernel {
 public:
  static Kernel smooth_default() { return Kernel(KernelKind::smooth_default); }
  static Kernel constant_one() { return Kernel(KernelKind::constant_one); }

  static Kernel table(std::vector<std::pair<double, double>> samples) {
    Kernel k(KernelKind::table);
    std::sort(samples.begin(), samples.end());
    k.table_ = std::move(samples);
    if (k.table_.size() < 2) throw ConfigError("table kernel needs >= 2 samples");
    if (k.table_.front().first != 0.0)
      throw ConfigError("table kernel must start at r = 0");
    return k;
  }

  KernelKind kind() const { return kind_; }

  double phi(double r) const {
    if (r < 0) throw ArgumentError("kernel evaluated at negative radius");
    switch (kind_) {
      case KernelKind::smooth_default:
        return 1.0 / std::sqrt(1.0 + r * r);
      case KernelKind::constant_one:
        return 1.0;
      case KernelKind::table:
        return table_phi(r);
    }
    return 0.0;
  }

  double dphi(double r) const {
    if (r < 0) throw ArgumentError("kernel evaluated at negative radius");
    switch (kind_) {
      case KernelKind::smooth_default: {
        const double s = 1.0 + r * r;
        return -r / (s * std::sqrt(s));
      }
      case KernelKind::constant_one:
        return 0.0;
      case KernelKind::table:
        return table_slope(r);
    }
    return 0.0;
  }

  // Checks positivity, monotonicity and the <= 1 normalization on a log-spaced
  // sample (plus every table node). Throws ConfigError with the violated
  // constraint spelled out.
  void validate(double r_hi = 1e3) const {
    std::vector<double> rs{0.0};
    for (int i = 0; i <= 4096; ++i)
      rs.push_back(1e-6 * std::pow(r_hi / 1e-6, i / 4096.0));
    if (kind_ == KernelKind::table)
      for (const auto& [r, p] : table_) rs.push_back(r);
    std::sort(rs.begin(), rs.end());

    double prev = phi(rs.front());
    for (double r : rs) {
      const double p = phi(r);
      if (!(p > 0)) throw ConfigError("kernel violates phi > 0 at r = " + std::to_string(r));
      if (p > prev + 1e-12)
        throw ConfigError("kernel violates monotonicity (nonincreasing) at r = " +
                          std::to_string(r));
      if (p > 1.0 + 1e-12)
        throw ConfigError("kernel violates max|phi| <= 1 at r = " + std::to_string(r));
      if (std::abs(dphi(r)) > 1.0 + 1e-12)
        throw ConfigError("kernel violates max|phi'| <= 1 at r = " + std::to_string(r));
      prev = p;
    }
  }

  std::vector<std::pair<double, double>> table_samples() const { return table_; }

 private:
  explicit Kernel(KernelKind kind) : kind_(kind) {}

  double table_phi(double r) const {
    if (r >= table_.back().first) return table_.back().second;
    auto it = std::upper_bound(table_.begin(), table_.end(), std::make_pair(r, 1e300));
    const auto& [r1, p1] = *it;
    const auto& [r0, p0] = *(it - 1);
    const double t = (r - r0) / (r1 - r0);
    return p0 + t * (p1 - p0);
  }

  double table_slope(double r) const {
    if (r >= table_.back().first) return 0.0;
    auto it = std::upper_bound(table_.begin(), table_.end(), std::make_pair(r, 1e300));
    const auto& [r1, p1] = *it;
    const auto& [r0, p0] = *(it - 1);
    return (p1 - p0) / (r1 - r0);
  }

  KernelKind kind_;
  std::vector<std::pair<double, double>> table_;
};

}  // namespace flocksim
