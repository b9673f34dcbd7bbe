#include "batik/spherical.hpp"

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

constexpr double kSeamTolerance = 1e-9;

void check_phi_min(double phi_min) {
  if (!(phi_min > 0.0) || !(phi_min <= std::numbers::pi / 2)) {
    throw std::invalid_argument("phi_min must lie in (0, pi/2]");
  }
}

Point3 lift_point(Point2 c, double phi) {
  const double r = std::hypot(c.x, c.y);
  return {c.x * r, c.y * r, r * (std::cos(phi) / std::sin(phi))};
}

}  // namespace

LiftSample lift(const CurveSpec& spec, double theta, double phi, double phi_min) {
  check_phi_min(phi_min);
  if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  if (!(phi >= phi_min && phi <= std::numbers::pi - phi_min)) {
    throw std::out_of_range("phi must lie in [phi_min, pi - phi_min]");
  }
  return {theta, phi, lift_point(evaluate_curve(spec, theta), phi)};
}

double sphere_identity_residual(const LiftSample& s, const CurveSpec& spec) {
  const Point2 c = evaluate_curve(spec, s.theta);
  const double r2 = c.x * c.x + c.y * c.y;
  const double cot = std::cos(s.phi) / std::sin(s.phi);
  const double lhs = dot(s.point, s.point);
  const double rhs = r2 * (r2 + cot * cot);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

SurfaceMesh mesh_lift(const CurveSpec& spec, std::size_t n_theta, std::size_t n_phi, double phi_min, bool weld) {
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("mesh needs n_theta >= 2 and n_phi >= 2");
  check_phi_min(phi_min);
  if (n_theta * n_phi > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("mesh too large");
  }
  const double theta_max = spec.theta_max();
  const double phi_span = std::numbers::pi - 2.0 * phi_min;

  std::vector<Point2> curve(n_theta);
  for (std::size_t i = 0; i < n_theta; ++i) {
    const double theta = i + 1 == n_theta ? theta_max : theta_max * static_cast<double>(i) / (n_theta - 1);
    curve[i] = evaluate_curve(spec, theta);
  }
  const Point2 gap{curve.back().x - curve.front().x, curve.back().y - curve.front().y};
  // Welding a two-row grid would collapse every quad.
  const bool welded = weld && n_theta > 2 && std::hypot(gap.x, gap.y) < kSeamTolerance;
  const std::size_t rows = welded ? n_theta - 1 : n_theta;

  SurfaceMesh mesh;
  mesh.n_theta = n_theta;
  mesh.n_phi = n_phi;
  mesh.seam_welded = welded;
  mesh.vertices.reserve(rows * n_phi);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < n_phi; ++j) {
      const double phi = j + 1 == n_phi ? std::numbers::pi - phi_min
                                        : phi_min + phi_span * static_cast<double>(j) / (n_phi - 1);
      mesh.vertices.push_back(lift_point(curve[i], phi));
    }
  }
  mesh.quads.reserve((n_theta - 1) * (n_phi - 1));
  for (std::size_t i = 0; i + 1 < n_theta; ++i) {
    const std::size_t next = (i + 1) % rows;
    for (std::size_t j = 0; j + 1 < n_phi; ++j) {
      const auto at = [n_phi](std::size_t row, std::size_t col) {
        return static_cast<std::uint32_t>(row * n_phi + col);
      };
      mesh.quads.push_back({at(i, j), at(next, j), at(next, j + 1), at(i, j + 1)});
    }
  }
  return mesh;
}

std::string to_obj(const SurfaceMesh& mesh) {
  if (mesh.vertices.empty()) throw std::invalid_argument("cannot export an empty mesh");
  std::string out;
  out.reserve(mesh.vertices.size() * 48 + mesh.quads.size() * 32);
  char buf[128];
  for (const Point3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out += buf;
  }
  for (const auto& q : mesh.quads) {
    std::snprintf(buf, sizeof buf, "f %u %u %u %u\n", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1);
    out += buf;
  }
  return out;
}

void export_obj(const SurfaceMesh& mesh, const std::filesystem::path& path) {
  const std::string text = to_obj(mesh);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

std::string mesh_to_json(const SurfaceMesh& mesh) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const Point3& v : mesh.vertices) vertices.push_back({v.x, v.y, v.z});
  nlohmann::json quads = nlohmann::json::array();
  for (const auto& q : mesh.quads) quads.push_back({q[0], q[1], q[2], q[3]});
  return nlohmann::json{{"n_theta", mesh.n_theta},
                        {"n_phi", mesh.n_phi},
                        {"seam_welded", mesh.seam_welded},
                        {"vertices", std::move(vertices)},
                        {"quads", std::move(quads)}}
      .dump();
}

}  // namespace batik
