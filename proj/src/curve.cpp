#include "batik/curve.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "batik/io_error.hpp"

namespace batik {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kOpenCurveTurns = 100;
constexpr double kSamplesPerTurn = 1000.0;

// Fixed-point text with trailing zeros trimmed; "-0" is written as "0".
std::string svg_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

bool is_hex_color(const std::string& s) {
  if (s.size() != 7 || s[0] != '#') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

CurveSpec::CurveSpec(double a, double b, std::optional<std::size_t> samples, std::optional<double> theta_max)
    : a_(a), b_(b) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("curve parameter a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("curve parameter b must be positive");
  if (theta_max) {
    if (!(*theta_max > 0.0) || !std::isfinite(*theta_max)) throw std::invalid_argument("theta_max must be positive");
    theta_max_ = *theta_max;
  } else {
    theta_max_ = closure_period(a, b).value_or(kTwoPi * kOpenCurveTurns);
  }
  if (samples) {
    if (*samples < 2) throw std::invalid_argument("a curve needs at least 2 samples");
    samples_ = *samples;
  } else {
    samples_ = static_cast<std::size_t>(std::ceil(kSamplesPerTurn * theta_max_ / kTwoPi)) + 1;
  }
}

Point2 evaluate_curve(const CurveSpec& spec, double theta) {
  const double amplitude = spec.a() + spec.b();
  const double k = spec.frequency_ratio();
  return {-amplitude * std::sin(theta) - amplitude * std::sin(k * theta),
          amplitude * std::cos(theta) + amplitude * std::cos(k * theta)};
}

std::optional<double> closure_period(double a, double b, int denom_limit) {
  if (!(a > 0.0) || !(b > 0.0) || denom_limit < 1) return std::nullopt;
  const double k = (a + b) / b;
  // Convergents h/q of the continued fraction of k.
  double x = k;
  double h_prev = 1.0, h_prev2 = 0.0;
  double q_prev = 0.0, q_prev2 = 1.0;
  for (int iter = 0; iter < 64; ++iter) {
    const double term = std::floor(x);
    const double h = term * h_prev + h_prev2;
    const double q = term * q_prev + q_prev2;
    if (q > denom_limit) break;
    if (std::abs(k - h / q) < 1e-9) return kTwoPi * q;
    const double frac = x - term;
    if (frac < std::numeric_limits<double>::epsilon()) break;
    x = 1.0 / frac;
    h_prev2 = h_prev;
    h_prev = h;
    q_prev2 = q_prev;
    q_prev = q;
  }
  return std::nullopt;
}

Polyline2 sample_curve(const CurveSpec& spec) {
  Polyline2 out;
  out.reserve(spec.samples());
  const double step = spec.theta_max() / static_cast<double>(spec.samples() - 1);
  for (std::size_t i = 0; i < spec.samples(); ++i) {
    // The last sample lands exactly on theta_max.
    const double theta = i + 1 == spec.samples() ? spec.theta_max() : static_cast<double>(i) * step;
    out.push_back(evaluate_curve(spec, theta));
  }
  return out;
}

Affine2 Affine2::rotation(double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return {{c, -s, s, c}, {}};
}

Affine2 Affine2::scaling(double sx, double sy) { return {{sx, 0.0, 0.0, sy}, {}}; }

Affine2 Affine2::shear(double kx, double ky) { return {{1.0, kx, ky, 1.0}, {}}; }

Affine2 Affine2::translation(double dx, double dy) { return {{1.0, 0.0, 0.0, 1.0}, {dx, dy}}; }

Affine2 operator*(const Affine2& l, const Affine2& r) {
  Affine2 out;
  out.m = {l.m[0] * r.m[0] + l.m[1] * r.m[2], l.m[0] * r.m[1] + l.m[1] * r.m[3],
           l.m[2] * r.m[0] + l.m[3] * r.m[2], l.m[2] * r.m[1] + l.m[3] * r.m[3]};
  out.t = l.apply(r.t);
  return out;
}

Polyline2 apply_affine(const Polyline2& poly, const Affine2& transform) {
  Polyline2 out;
  out.reserve(poly.size());
  for (const Point2& p : poly) out.push_back(transform.apply(p));
  return out;
}

std::string to_svg(std::span<const Polyline2> polylines, std::span<const std::string> stroke_colors) {
  if (polylines.empty()) throw std::invalid_argument("no polylines to export");
  for (const std::string& c : stroke_colors) {
    if (!is_hex_color(c)) throw std::invalid_argument("stroke color must be #rrggbb: '" + c + "'");
  }
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const Polyline2& poly : polylines) {
    if (poly.empty()) throw std::invalid_argument("cannot export an empty polyline");
    for (const Point2& p : poly) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("non-finite polyline point");
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  // SVG y grows downward; flip so the curve keeps its orientation.
  double width = max_x - min_x, height = max_y - min_y;
  if (width <= 0.0) width = 1.0;
  if (height <= 0.0) height = 1.0;
  const double mx = 0.05 * width, my = 0.05 * height;
  const double vb_x = min_x - mx, vb_y = -max_y - my, vb_w = width + 2 * mx, vb_h = height + 2 * my;
  const double stroke = 0.002 * std::max(vb_w, vb_h);

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + svg_number(vb_x) + " " +
         svg_number(vb_y) + " " + svg_number(vb_w) + " " + svg_number(vb_h) + "\">\n";
  for (std::size_t i = 0; i < polylines.size(); ++i) {
    const std::string color = stroke_colors.empty() ? "#000000" : stroke_colors[i % stroke_colors.size()];
    svg += "  <path fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + svg_number(stroke) +
           "\" stroke-linejoin=\"round\" d=\"";
    const Polyline2& poly = polylines[i];
    for (std::size_t k = 0; k < poly.size(); ++k) {
      svg += k == 0 ? "M" : " L";
      svg += svg_number(poly[k].x) + "," + svg_number(-poly[k].y);
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void export_svg(std::span<const Polyline2> polylines, std::span<const std::string> stroke_colors,
                const std::filesystem::path& path) {
  const std::string svg = to_svg(polylines, stroke_colors);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << svg;
  if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

std::string polyline_to_json(const Polyline2& poly) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Point2& p : poly) arr.push_back({p.x, p.y});
  return arr.dump();
}

}  // namespace batik
