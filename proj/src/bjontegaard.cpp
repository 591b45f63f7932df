#include "pgr/bjontegaard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "pgr/errors.hpp"

namespace pgr {

RateCurve::RateCurve(std::vector<RatePoint> points) : points_(std::move(points)) {
  for (const RatePoint& p : points_) {
    if (!(p.bpp > 0.0) || !std::isfinite(p.bpp)) throw ValidationError("bpp must be finite and > 0");
    if (!std::isfinite(p.metric)) throw ValidationError("metric must be finite");
  }
  std::sort(points_.begin(), points_.end(),
            [](const RatePoint& a, const RatePoint& b) { return a.bpp < b.bpp; });
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].bpp > points_[i - 1].bpp)) {
      throw ValidationError("rate curve bpp values must be distinct");
    }
  }
}

double LogRateCubic::operator()(double log_rate) const {
  const double t = (log_rate - center) / half_span;
  return coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3]));
}

double LogRateCubic::integral(double a, double b) const {
  auto antiderivative = [&](double x) {
    const double t = (x - center) / half_span;
    const double poly =
        t * (coeffs[0] + t * (coeffs[1] / 2.0 + t * (coeffs[2] / 3.0 + t * coeffs[3] / 4.0)));
    return poly * half_span;
  };
  return antiderivative(b) - antiderivative(a);
}

LogRateCubic fit_log_rate_cubic(const RateCurve& curve) {
  const auto& pts = curve.points();
  if (pts.size() < 4) {
    throw ArityError("a cubic fit needs at least 4 rate points, got " + std::to_string(pts.size()));
  }
  LogRateCubic fit;
  fit.log_min = std::log10(pts.front().bpp);
  fit.log_max = std::log10(pts.back().bpp);
  fit.center = 0.5 * (fit.log_min + fit.log_max);
  fit.half_span = 0.5 * (fit.log_max - fit.log_min);

  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (std::log10(pts[static_cast<std::size_t>(i)].bpp) - fit.center) / fit.half_span;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    a(i, 3) = t * t * t;
    y(i) = pts[static_cast<std::size_t>(i)].metric;
  }
  const Eigen::Vector4d c = a.colPivHouseholderQr().solve(y);
  for (int k = 0; k < 4; ++k) fit.coeffs[static_cast<std::size_t>(k)] = c(k);
  return fit;
}

double bd_metric(const RateCurve& anchor, const RateCurve& test) {
  const LogRateCubic fa = fit_log_rate_cubic(anchor);
  const LogRateCubic ft = fit_log_rate_cubic(test);
  const double lo = std::max(fa.log_min, ft.log_min);
  const double hi = std::min(fa.log_max, ft.log_max);
  if (!(hi > lo)) throw DomainError("rate curves do not overlap in log10(bpp)");
  return (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
}

}  // namespace pgr
