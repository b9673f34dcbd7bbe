#include <cstdlib>
#include <stdexcept>
#include <string>

#include "backends.hpp"
#include "batik/kernels.hpp"

namespace batik::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(BATIK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend resolve_default() {
  if (const char* env = std::getenv("BATIK_SIMD"); env != nullptr && *env != '\0') {
    if (auto named = parse_backend(env); named && backend_supported(*named)) return *named;
  }
  if (backend_supported(Backend::Avx2)) return Backend::Avx2;
  if (backend_supported(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

}  // namespace

std::string_view backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
    case Backend::Scalar:
      break;
  }
  return "scalar";
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  if (name == "neon") return Backend::Neon;
  return std::nullopt;
}

bool backend_supported(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
    case Backend::Neon:
#if defined(BATIK_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> supported_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (backend_supported(b)) out.push_back(b);
  }
  return out;
}

Backend default_backend() {
  static const Backend backend = resolve_default();
  return backend;
}

std::size_t scratch_size(Backend, const Program& program) noexcept {
  // Register file plus one uniformity byte per register, rounded up to doubles.
  return (kBlock + 1) * program.register_count();
}

bool evaluate_batch(Backend backend, const Program& program, const double* x, const double* y,
                    const double* z, double* out, std::size_t n, std::span<double> scratch) {
  if (scratch.size() < scratch_size(backend, program)) throw std::invalid_argument("scratch too small");
  if (!backend_supported(backend)) {
    throw std::invalid_argument("backend '" + std::string(backend_name(backend)) + "' is not available");
  }
  if (n == 0) return true;
  switch (backend) {
#if defined(BATIK_HAVE_AVX2)
    case Backend::Avx2:
      return avx2::evaluate_batch(program, x, y, z, out, n, scratch.data());
#endif
#if defined(BATIK_HAVE_NEON)
    case Backend::Neon:
      return neon::evaluate_batch(program, x, y, z, out, n, scratch.data());
#endif
    default:
      break;
  }
  return scalar::evaluate_batch(program, x, y, z, out, n, scratch.data());
}

BatchEvaluator::BatchEvaluator(const Program& program, Backend backend)
    : program_(&program), backend_(backend), scratch_(scratch_size(backend, program)) {
  if (!backend_supported(backend)) {
    throw std::invalid_argument("backend '" + std::string(backend_name(backend)) + "' is not available");
  }
}

bool BatchEvaluator::run(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                         std::span<double> out) {
  if (y.size() != x.size() || z.size() != x.size() || out.size() != x.size()) {
    throw std::invalid_argument("batch spans differ in length");
  }
  return evaluate_batch(backend_, *program_, x.data(), y.data(), z.data(), out.data(), x.size(), scratch_);
}

}  // namespace batik::kernels
