#include "batik/render.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace batik {
namespace {

constexpr std::size_t kChunk = 64;
constexpr std::size_t kMaxDimension = 1u << 15;
constexpr double kDegenerateGradient = 1e-12;

struct PixelSample {
  Rgb color;
  bool hit = false;
  bool error = false;
};

std::uint8_t scale_channel(std::uint8_t c, double factor) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c * factor, 0.0, 255.0)));
}

}  // namespace

std::optional<Shading> parse_shading(std::string_view name) {
  if (name == "flat") return Shading::Flat;
  if (name == "lit") return Shading::Lit;
  return std::nullopt;
}

std::string_view shading_name(Shading s) { return s == Shading::Flat ? "flat" : "lit"; }

double Scene::clip_radius() const { return std::numbers::sqrt2 * std::max(1.0, 1.0 / zoom); }

double Scene::pixel_size() const {
  return 2.0 * half_extent() / static_cast<double>(std::min(width, height));
}

void Scene::validate() const {
  if (!(zoom > 0.0) || !std::isfinite(zoom) || !std::isfinite(1.0 / zoom)) {
    throw std::invalid_argument("zoom must be a positive finite number");
  }
  if (width < 1 || height < 1 || width > kMaxDimension || height > kMaxDimension) {
    throw std::invalid_argument("image dimensions must lie in [1, " + std::to_string(kMaxDimension) + "]");
  }
  if (steps < 1 || steps > kMaxMarchSteps) {
    throw std::invalid_argument("steps must lie in [1, " + std::to_string(kMaxMarchSteps) + "]");
  }
  if (front == back || front == background || back == background) {
    throw std::invalid_argument("front, back and background colors must be distinct");
  }
  for (const std::string& name : free_parameters(equation)) {
    const auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("parameter '" + name + "' is not bound");
    if (!std::isfinite(it->second)) throw std::invalid_argument("parameter '" + name + "' must be finite");
  }
}

Ray camera_ray_at(const Scene& scene, double u, double v) {
  const double s = scene.pixel_size();
  const double x = (u - 0.5 * static_cast<double>(scene.width)) * s;
  const double y = (0.5 * static_cast<double>(scene.height) - v) * s;
  return {{x, y, scene.clip_radius()}, {0.0, 0.0, -1.0}};
}

Ray camera_ray(const Scene& scene, std::size_t px, std::size_t py) {
  if (px >= scene.width || py >= scene.height) throw std::out_of_range("pixel outside the image");
  return camera_ray_at(scene, static_cast<double>(px) + 0.5, static_cast<double>(py) + 0.5);
}

Tracer::Tracer(const Program& program, double clip_radius, unsigned steps, kernels::Backend backend)
    : program_(&program),
      clip_radius_(clip_radius),
      steps_(steps),
      evaluator_(program, backend),
      t_(kChunk),
      x_(kChunk),
      y_(kChunk),
      z_(kChunk),
      f_(kChunk),
      registers_(program.register_count()) {
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  if (!(clip_radius > 0.0)) throw std::invalid_argument("clip radius must be positive");
}

double Tracer::f_at(const Ray& ray, double t) {
  return program_->evaluate({ray.origin.x + t * ray.direction.x, ray.origin.y + t * ray.direction.y,
                             ray.origin.z + t * ray.direction.z},
                            registers_);
}

Tracer::Result Tracer::trace(const Ray& ray) {
  // Chord of the ray inside the clipping ball.
  const double b = dot(ray.origin, ray.direction);
  const double c = dot(ray.origin, ray.origin) - clip_radius_ * clip_radius_;
  const double disc = b * b - c;
  if (!(disc > 0.0)) return {};
  const double root = std::sqrt(disc);
  const double t_enter = std::max(0.0, -b - root);
  const double t_exit = -b + root;
  if (!(t_exit > t_enter)) return {};
  const double dt = (t_exit - t_enter) / steps_;

  const std::size_t samples = std::size_t{steps_} + 1;
  double prev_t = 0.0, prev_f = 0.0;
  bool have_prev = false, prev_negative = false;
  for (std::size_t base = 0; base < samples; base += kChunk) {
    const std::size_t n = std::min(kChunk, samples - base);
    for (std::size_t k = 0; k < n; ++k) t_[k] = t_enter + static_cast<double>(base + k) * dt;
    if (base + n == samples) t_[n - 1] = t_exit;
    for (std::size_t k = 0; k < n; ++k) x_[k] = ray.origin.x + t_[k] * ray.direction.x;
    for (std::size_t k = 0; k < n; ++k) y_[k] = ray.origin.y + t_[k] * ray.direction.y;
    for (std::size_t k = 0; k < n; ++k) z_[k] = ray.origin.z + t_[k] * ray.direction.z;
    const std::span<double> out(f_.data(), n);
    const bool ok = evaluator_.run({x_.data(), n}, {y_.data(), n}, {z_.data(), n}, out);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = f_[k];
      const bool negative = f < 0.0;
      // One branch covers a root at a sample, a sign change and NaN.
      if ((have_prev && negative != prev_negative) || f == 0.0 || f != f) {
        if (std::isnan(f)) return {std::nullopt, true};
        if (!ok && divides_by_zero_before(k + 1)) return {std::nullopt, true};
        return f == 0.0 ? refine(ray, t_[k], f, t_[k], f) : refine(ray, prev_t, prev_f, t_[k], f);
      }
      prev_t = t_[k];
      prev_f = f;
      prev_negative = negative;
      have_prev = true;
    }
    // A division by zero anywhere before the first root poisons the ray.
    if (!ok) return {std::nullopt, true};
  }
  return {};
}

bool Tracer::divides_by_zero_before(std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    try {
      (void)program_->evaluate({x_[k], y_[k], z_[k]}, registers_);
    } catch (const EvalError&) {
      return true;
    }
  }
  return false;
}

Tracer::Result Tracer::refine(const Ray& ray, double lo, double f_lo, double hi, double f_hi) {
  try {
    for (int iter = 0; iter < kMaxBisections && hi - lo >= kBisectionTolerance; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = f_at(ray, mid);
      if (std::isnan(f_mid)) return {std::nullopt, true};
      if (f_mid == 0.0) {
        lo = hi = mid;
        f_lo = f_hi = 0.0;
        break;
      }
      if ((f_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
        f_hi = f_mid;
      }
    }
    Hit hit;
    hit.t = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
    hit.point = ray.origin + hit.t * ray.direction;
    const ValueGradient vg = program_->evaluate_with_gradient(hit.point);
    const double length = norm(vg.grad);
    if (!std::isfinite(length)) return {std::nullopt, true};
    if (length < kDegenerateGradient) {
      hit.degenerate = true;
      hit.front_facing = true;
      return {hit, false};
    }
    hit.front_facing = dot(vg.grad, ray.direction) < 0.0;
    const Vec3 n = (1.0 / length) * vg.grad;
    hit.normal = hit.front_facing ? n : -n;
    return {hit, false};
  } catch (const EvalError&) {
    return {std::nullopt, true};
  }
}

std::optional<Hit> first_hit(const Scene& scene, const Ray& ray) {
  const Program program = Program::compile(scene.equation, scene.params);
  Tracer tracer(program, scene.clip_radius(), scene.steps);
  return tracer.trace(ray).hit;
}

Rgb shade(const std::optional<Hit>& hit, const Scene& scene, const Vec3& ray_direction) {
  if (!hit) return scene.background;
  if (hit->degenerate) return scene.front;
  const Rgb base = hit->front_facing ? scene.front : scene.back;
  if (scene.shading == Shading::Flat) return base;
  const double factor = std::max(kAmbientFloor, dot(hit->normal, -ray_direction));
  return {scale_channel(base.r, factor), scale_channel(base.g, factor), scale_channel(base.b, factor)};
}

RenderResult render_scene(const Scene& scene, const RenderOptions& options) {
  scene.validate();
  const auto start = std::chrono::steady_clock::now();
  const kernels::Backend backend = options.backend.value_or(kernels::default_backend());
  if (!kernels::backend_supported(backend)) {
    throw std::invalid_argument("backend '" + std::string(kernels::backend_name(backend)) + "' is not supported here");
  }
  const Program program = Program::compile(scene.equation, scene.params);

  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, scene.height));

  RenderResult result{Image(scene.width, scene.height, scene.background), {}};
  std::atomic<std::size_t> next_row{0};
  std::atomic<std::size_t> hits{0}, errors{0};

  std::vector<Tracer> tracers;
  tracers.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) tracers.emplace_back(program, scene.clip_radius(), scene.steps, backend);

  static constexpr double kSubOffsets[2] = {0.25, 0.75};
  const auto worker = [&](Tracer& tracer) {
    std::size_t local_hits = 0, local_errors = 0;
    const auto sample = [&](double u, double v) {
      const Ray ray = camera_ray_at(scene, u, v);
      const Tracer::Result r = tracer.trace(ray);
      if (r.eval_error) return PixelSample{scene.background, false, true};
      return PixelSample{shade(r.hit, scene, ray.direction), r.hit.has_value(), false};
    };
    for (std::size_t y = next_row++; y < scene.height; y = next_row++) {
      for (std::size_t x = 0; x < scene.width; ++x) {
        PixelSample px;
        if (!scene.supersample) {
          px = sample(static_cast<double>(x) + 0.5, static_cast<double>(y) + 0.5);
        } else {
          unsigned r = 0, g = 0, b = 0;
          for (double dv : kSubOffsets) {
            for (double du : kSubOffsets) {
              const PixelSample s = sample(static_cast<double>(x) + du, static_cast<double>(y) + dv);
              r += s.color.r;
              g += s.color.g;
              b += s.color.b;
              px.hit = px.hit || s.hit;
              px.error = px.error || s.error;
            }
          }
          px.color = {static_cast<std::uint8_t>((r + 2) / 4), static_cast<std::uint8_t>((g + 2) / 4),
                      static_cast<std::uint8_t>((b + 2) / 4)};
        }
        result.image.at(x, y) = px.color;
        local_hits += px.hit ? 1 : 0;
        local_errors += px.error ? 1 : 0;
      }
    }
    hits += local_hits;
    errors += local_errors;
  };

  if (threads <= 1) {
    worker(tracers[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker, std::ref(tracers[i]));
  }

  result.stats.pixels = scene.width * scene.height;
  result.stats.hits = hits;
  result.stats.eval_errors = errors;
  result.stats.threads = threads;
  result.stats.backend = backend;
  result.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace batik
