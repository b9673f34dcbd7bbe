#pragma once

// Modified hypocycloid plane curves:
//
//   x(t) = -(a+b) sin t - (a+b) sin(k t)
//   y(t) =  (a+b) cos t + (a+b) cos(k t),     k = (a+b)/b
//
// Both amplitude terms use (a+b); this is not the classical hypocycloid.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace batik {

inline constexpr int kDefaultDenominatorLimit = 100;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(Point2, Point2) = default;
};

using Polyline2 = std::vector<Point2>;

class CurveSpec {
 public:
  /// Throws std::invalid_argument unless a > 0, b > 0 (both finite), samples >= 2
  /// and theta_max > 0. When theta_max is omitted the curve is traced to its
  /// closure period, or 100 turns if it does not close with denominator <= 100.
  /// When samples is omitted, 1000 per 2*pi of theta_max are used.
  CurveSpec(double a, double b, std::optional<std::size_t> samples = std::nullopt,
            std::optional<double> theta_max = std::nullopt);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t samples() const noexcept { return samples_; }
  double theta_max() const noexcept { return theta_max_; }
  /// k = (a+b)/b.
  double frequency_ratio() const noexcept { return (a_ + b_) / b_; }

 private:
  double a_;
  double b_;
  std::size_t samples_;
  double theta_max_;
};

Point2 evaluate_curve(const CurveSpec& spec, double theta);

/// 2*pi*q when k = (a+b)/b is within 1e-9 of some p/q with q <= denom_limit
/// (found through continued-fraction convergents), otherwise nullopt.
std::optional<double> closure_period(double a, double b, int denom_limit = kDefaultDenominatorLimit);

/// Points at theta_i = i * theta_max / (samples - 1).
Polyline2 sample_curve(const CurveSpec& spec);

/// p -> M p + t, with M stored row-major.
struct Affine2 {
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};
  Point2 t{};

  static Affine2 identity() { return {}; }
  static Affine2 rotation(double radians);
  static Affine2 scaling(double sx, double sy);
  /// [1 kx; ky 1]
  static Affine2 shear(double kx, double ky);
  static Affine2 translation(double dx, double dy);

  Point2 apply(Point2 p) const noexcept {
    return {m[0] * p.x + m[1] * p.y + t.x, m[2] * p.x + m[3] * p.y + t.y};
  }

  /// (lhs * rhs).apply(p) == lhs.apply(rhs.apply(p)).
  friend Affine2 operator*(const Affine2& lhs, const Affine2& rhs);
};

Polyline2 apply_affine(const Polyline2& poly, const Affine2& transform);

/// SVG 1.1 document with one <path> per polyline. The viewBox is the bounding
/// box plus a 5% margin per side, with y pointing up as in the curve's frame.
/// Stroke colors cycle when fewer colors than polylines are given.
/// Throws std::invalid_argument for an empty list or an empty polyline.
std::string to_svg(std::span<const Polyline2> polylines, std::span<const std::string> stroke_colors = {});

/// Writes to_svg(...) to `path`. Throws IoError when the file cannot be written.
void export_svg(std::span<const Polyline2> polylines, std::span<const std::string> stroke_colors,
                const std::filesystem::path& path);

/// JSON array of [x, y] pairs.
std::string polyline_to_json(const Polyline2& poly);

}  // namespace batik
