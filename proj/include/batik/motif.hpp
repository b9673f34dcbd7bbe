#pragma once

// Batik motifs from rendered surfaces: the preset catalog, Fibonacci-scaled
// repetition, grid tiling and palette substitution.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "batik/image.hpp"
#include "batik/render.hpp"

namespace batik {

struct ParamSpec {
  std::string name;
  double value = 0.0;
  double min = 0.0;
  double max = 1.0;
};

struct Preset {
  std::string name;
  std::string title;
  /// Equation text exactly as published.
  std::string equation;
  std::vector<ParamSpec> params;
  double zoom = 1.0;
  Rgb front;
  Rgb back;
  Rgb background;

  /// Scene at the given size with the preset's defaults.
  Scene scene(std::size_t width = 512, std::size_t height = 512) const;
};

class UnknownPresetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<Preset>& preset_catalog();
/// Throws UnknownPresetError naming the available presets.
const Preset& find_preset(std::string_view name);
/// Comma-separated catalog names.
std::string preset_names();

/// JSON array; each entry holds name, title, equation, params {name: value},
/// ranges {name: [min, max]}, zoom and colors {front, back, background}.
std::string catalog_to_json();

/// The Fibonacci numbers F_1..F_n (1, 1, 2, 3, 5, ...). Throws for n outside [1, 40].
std::vector<std::size_t> fibonacci(std::size_t n);

struct Placement {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;
};

struct FibonacciLayout {
  Image image;
  /// Copy i has size (F_i * unit_w, F_i * unit_h).
  std::vector<Placement> copies;
  std::size_t unit_w = 0;
  std::size_t unit_h = 0;
};

/// Copies of `tile` sized F_1..F_n, attached in turn to the right, bottom,
/// left and top of the growing arrangement (a Fibonacci spiral), which is
/// centered on the canvas. The unit cell keeps the tile's aspect ratio and is
/// the largest that fits, with each side rounded down to whole pixels. Copies
/// are nearest-neighbor resampled; uncovered canvas takes `background`
/// (default: the tile's top-left pixel).
/// Throws std::invalid_argument when n is outside [1, 40], the canvas is empty
/// or the largest copy cannot get at least one pixel per unit.
FibonacciLayout fibonacci_layout(const Image& tile, std::size_t n, std::size_t canvas_w, std::size_t canvas_h,
                                 std::optional<Rgb> background = std::nullopt);

/// rows x cols repetition, (rows * tile_h) tall and (cols * tile_w) wide.
/// With `mirror`, copies where row + col is odd are flipped horizontally.
/// Throws std::invalid_argument when rows or cols is zero.
Image grid_tile(const Image& tile, std::size_t rows, std::size_t cols, bool mirror);

using Palette = std::map<Rgb, Rgb>;

/// Substitutes every pixel color through `mapping`. Throws std::invalid_argument
/// when a color present in the image is missing from the mapping, or when two
/// present colors map to the same color (classes must stay distinct).
Image apply_palette(const Image& img, const Palette& mapping);

/// Distinct colors and their pixel counts.
std::map<Rgb, std::size_t> histogram(const Image& img);

enum class LayoutMode { Fibonacci, Grid };

std::optional<LayoutMode> parse_layout_mode(std::string_view name);
std::string_view layout_mode_name(LayoutMode mode);

struct MotifLayout {
  LayoutMode mode = LayoutMode::Grid;
  /// Fibonacci: number of copies. Grid: copies per side.
  std::size_t count = 1;
  bool mirror = false;
  /// Fibonacci canvas; zero means 2x the tile in each direction.
  std::size_t canvas_w = 0;
  std::size_t canvas_h = 0;
};

/// Applies `layout` to `tile`. Throws std::invalid_argument for count 0 or an
/// output larger than `max_pixels`.
Image compose_motif(const Image& tile, const MotifLayout& layout, std::size_t max_pixels = 2048 * 2048 * 4);

}  // namespace batik
