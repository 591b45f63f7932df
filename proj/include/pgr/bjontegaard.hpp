#pragma once

#include <array>
#include <vector>

namespace pgr {

struct RatePoint {
  double bpp = 0.0;
  double metric = 0.0;
};

/// Rate/quality samples sorted by strictly increasing bpp (> 0).
class RateCurve {
 public:
  RateCurve() = default;
  // Sorts by bpp; throws ValidationError on non-positive or repeated bpp.
  explicit RateCurve(std::vector<RatePoint> points);

  const std::vector<RatePoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<RatePoint> points_;
};

/// Cubic metric(log10 bpp), stored in a normalized variable
/// t = (log10(bpp) - center) / half_span for conditioning.
struct LogRateCubic {
  std::array<double, 4> coeffs{};  // c0 + c1 t + c2 t^2 + c3 t^3
  double center = 0.0;
  double half_span = 1.0;
  double log_min = 0.0;
  double log_max = 0.0;

  double operator()(double log_rate) const;
  // Integral over [a, b] in log10(bpp).
  double integral(double a, double b) const;
};

// Least-squares cubic fit (exact interpolation with four points).
LogRateCubic fit_log_rate_cubic(const RateCurve& curve);

/// Bjontegaard delta of the metric: mean vertical gap (test - anchor)
/// between the fitted cubics over the shared log10(bpp) interval.
/// ArityError with fewer than four points per curve; DomainError when
/// the rate ranges do not overlap.
double bd_metric(const RateCurve& anchor, const RateCurve& test);

}  // namespace pgr
