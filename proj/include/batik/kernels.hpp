#pragma once

// Batched evaluation of a Program over structure-of-arrays point sets.
//
// Three backends share one contract: the scalar reference, AVX2 (4 doubles per
// op) and NEON (2 doubles per op). Each performs the same IEEE operations in
// the same order per point, so all backends return bit-identical values. The
// renderer relies on that for deterministic output regardless of the CPU.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "batik/program.hpp"

namespace batik::kernels {

enum class Backend : std::uint8_t { Scalar, Avx2, Neon };

std::string_view backend_name(Backend backend) noexcept;
std::optional<Backend> parse_backend(std::string_view name) noexcept;

/// Compiled into this binary and supported by the running CPU.
bool backend_supported(Backend backend) noexcept;
std::vector<Backend> supported_backends();

/// Widest supported backend, unless BATIK_SIMD names a supported one.
/// Resolved once per process.
Backend default_backend();

/// Doubles of scratch memory `evaluate_batch` needs for this program.
std::size_t scratch_size(Backend backend, const Program& program) noexcept;

/// out[i] = f(x[i], y[i], z[i]) for i < n. Returns false if any point divided
/// by zero; those outputs hold the IEEE quotient (inf or nan).
/// `scratch` must hold at least scratch_size(backend, program) doubles.
bool evaluate_batch(Backend backend, const Program& program, const double* x, const double* y,
                    const double* z, double* out, std::size_t n, std::span<double> scratch);

/// Owns scratch for repeated batches over one program.
class BatchEvaluator {
 public:
  BatchEvaluator(const Program& program, Backend backend);

  Backend backend() const noexcept { return backend_; }

  /// All spans must have the same length.
  bool run(std::span<const double> x, std::span<const double> y, std::span<const double> z,
           std::span<double> out);

 private:
  const Program* program_;
  Backend backend_;
  std::vector<double> scratch_;
};

}  // namespace batik::kernels
