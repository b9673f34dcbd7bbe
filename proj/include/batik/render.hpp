#pragma once

// Two-color ray casting of implicit surfaces f(x, y, z) = 0.
//
// Camera: orthographic, looking along -z, y up. The image plane spans
// [-h, h] world units along its shorter side with h = 1 / zoom; pixels are
// square. Rays start on the clipping ball and march its chord in uniform
// steps; a sign change of f is refined by bisection.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "batik/expr.hpp"
#include "batik/geometry.hpp"
#include "batik/image.hpp"
#include "batik/kernels.hpp"
#include "batik/program.hpp"

namespace batik {

inline constexpr unsigned kDefaultMarchSteps = 512;
inline constexpr unsigned kMaxMarchSteps = 1u << 16;
inline constexpr double kBisectionTolerance = 1e-9;
inline constexpr int kMaxBisections = 80;
inline constexpr double kAmbientFloor = 0.15;

enum class Shading { Flat, Lit };

std::optional<Shading> parse_shading(std::string_view name);
std::string_view shading_name(Shading s);

struct Scene {
  Expr equation = Expr::constant(0.0);
  ParamBinding params;
  double zoom = 1.0;
  std::size_t width = 256;
  std::size_t height = 256;
  Rgb front{0xd9, 0x8c, 0x1f};
  Rgb back{0x5a, 0x2e, 0x12};
  Rgb background{0xf5, 0xeb, 0xd7};
  unsigned steps = kDefaultMarchSteps;
  Shading shading = Shading::Flat;
  /// 2x2 samples per pixel, averaged; output may then hold blended colors.
  bool supersample = false;

  /// Half-extent of the image plane along its shorter side: 1 / zoom.
  double half_extent() const { return 1.0 / zoom; }
  /// sqrt(2) * max(1, 1 / zoom): circumscribes the visible square and never
  /// shrinks below the unit ball, so zooming in keeps unit-scale surfaces.
  double clip_radius() const;
  /// World size of one pixel.
  double pixel_size() const;

  /// Throws std::invalid_argument when zoom is not a positive finite number,
  /// a dimension or the step count is out of range, colors repeat, or a free
  /// parameter of the equation is unbound.
  void validate() const;
};

struct Ray {
  Point3 origin;
  Vec3 direction;  // unit length
};

struct Hit {
  double t = 0.0;
  Point3 point;
  /// Unit normal facing the viewer; zero when the gradient vanishes.
  Vec3 normal;
  /// The gradient points toward the viewer (grad f . direction < 0).
  bool front_facing = true;
  /// |grad f| < 1e-12 at the hit; shaded flat with the front color.
  bool degenerate = false;
};

/// Ray through the center of pixel (px, py). Throws std::out_of_range outside the image.
Ray camera_ray(const Scene& scene, std::size_t px, std::size_t py);
/// Ray through image-plane position (u, v) in pixel units; (px + 0.5, py + 0.5) is a pixel center.
Ray camera_ray_at(const Scene& scene, double u, double v);

/// Marches and refines one ray at a time over a compiled program. Holds
/// scratch buffers, so one instance must not be shared between threads.
class Tracer {
 public:
  /// `program` must outlive the tracer.
  Tracer(const Program& program, double clip_radius, unsigned steps,
         kernels::Backend backend = kernels::default_backend());

  struct Result {
    std::optional<Hit> hit;
    /// Evaluation failed along the ray (division by zero or NaN).
    bool eval_error = false;
  };

  /// Smallest-t root of f along the ray inside the clipping ball.
  Result trace(const Ray& ray);

 private:
  double f_at(const Ray& ray, double t);
  /// Whether one of the first `count` samples of the current chunk divides by zero.
  bool divides_by_zero_before(std::size_t count);
  Result refine(const Ray& ray, double lo, double f_lo, double hi, double f_hi);

  const Program* program_;
  double clip_radius_;
  unsigned steps_;
  kernels::BatchEvaluator evaluator_;
  std::vector<double> t_, x_, y_, z_, f_;
  std::vector<double> registers_;
};

/// Convenience wrapper compiling the scene's program for a single ray.
std::optional<Hit> first_hit(const Scene& scene, const Ray& ray);

/// Background for no hit; otherwise the front or back color, scaled by the
/// Lambert factor max(0.15, n . -direction) in lit mode.
Rgb shade(const std::optional<Hit>& hit, const Scene& scene, const Vec3& ray_direction);

struct RenderOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  std::optional<kernels::Backend> backend;
};

struct RenderStats {
  std::size_t pixels = 0;
  std::size_t hits = 0;
  std::size_t eval_errors = 0;
  double wall_ms = 0.0;
  unsigned threads = 1;
  kernels::Backend backend = kernels::Backend::Scalar;
};

struct RenderResult {
  Image image;
  RenderStats stats;
};

/// Deterministic: the image depends only on the scene, not on thread count or
/// backend. Pixels whose ray hits an evaluation error get the background color
/// and are counted in stats.eval_errors. Throws std::invalid_argument for an
/// invalid scene.
RenderResult render_scene(const Scene& scene, const RenderOptions& options = {});

}  // namespace batik
