#pragma once

// Lifting a plane curve onto a surface through spherical coordinates.
//
// With (cx, cy) the curve point at theta, r = |(cx, cy)| and rho = r / sin(phi):
//   x = cx rho sin(phi) = cx r
//   y = cy rho sin(phi) = cy r
//   z = rho cos(phi)    = r cot(phi)
// so every lifted point satisfies x^2 + y^2 + z^2 = r^2 (cx^2 + cy^2 + cot^2 phi).

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "batik/curve.hpp"
#include "batik/geometry.hpp"

namespace batik {

/// cot(phi) diverges at the poles; lifts stay within [phi_min, pi - phi_min].
inline constexpr double kDefaultPhiMin = 1e-2;

struct LiftSample {
  double theta = 0.0;
  double phi = 0.0;
  Point3 point;
};

/// Throws std::out_of_range when phi lies outside [phi_min, pi - phi_min], and
/// std::invalid_argument when phi_min is not in (0, pi/2].
LiftSample lift(const CurveSpec& spec, double theta, double phi, double phi_min = kDefaultPhiMin);

/// |LHS - RHS| / max(1, |RHS|) of the sphere identity above, with the curve
/// point recomputed from `spec` at the sample's theta.
double sphere_identity_residual(const LiftSample& sample, const CurveSpec& spec);

struct SurfaceMesh {
  std::vector<Point3> vertices;
  /// Vertex indices, counter-clockwise in (theta, phi) parameter space.
  std::vector<std::array<std::uint32_t, 4>> quads;
  std::size_t n_theta = 0;
  std::size_t n_phi = 0;
  /// The last theta row was merged into the first because the curve closes.
  bool seam_welded = false;
};

/// Grid over theta in [0, theta_max] x phi in [phi_min, pi - phi_min]; vertex
/// (i, j) is at index i * n_phi + j. When `weld` is set and the curve closes
/// over theta_max (endpoint gap < 1e-9), the duplicate last row is dropped and
/// the final quad strip reuses the first row.
/// Throws std::invalid_argument when n_theta or n_phi is below 2.
SurfaceMesh mesh_lift(const CurveSpec& spec, std::size_t n_theta, std::size_t n_phi,
                      double phi_min = kDefaultPhiMin, bool weld = true);

/// Wavefront OBJ text: "v x y z" lines then "f i j k l" lines, 1-based.
/// Throws std::invalid_argument for a mesh without vertices.
std::string to_obj(const SurfaceMesh& mesh);
void export_obj(const SurfaceMesh& mesh, const std::filesystem::path& path);

/// {"n_theta", "n_phi", "seam_welded", "vertices": [[x,y,z],...], "quads": [[i,j,k,l],...]} (0-based).
std::string mesh_to_json(const SurfaceMesh& mesh);

}  // namespace batik
