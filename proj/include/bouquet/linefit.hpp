#pragma once

#include <cstddef>
#include <span>

namespace bouquet {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// 1 when the ys are constant.
  double r_squared = 1.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs two distinct xs.
inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  const double k = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  LineFit out;
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / k;
  const double ss_tot = syy - sy * sy / k;
  const double ss_reg = out.slope * (sxy - sx * sy / k);
  out.r_squared = ss_tot > 1e-300 ? ss_reg / ss_tot : 1.0;
  return out;
}

}  // namespace bouquet
