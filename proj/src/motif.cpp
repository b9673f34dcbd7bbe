#include "batik/motif.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace batik {
namespace {

constexpr std::size_t kMaxFibonacciCount = 40;

// Sogan browns, indigo and soga-wedel tones used across the catalog.
constexpr Rgb kSoga{0xb5, 0x65, 0x1d};
constexpr Rgb kSogaDark{0x3b, 0x1f, 0x0e};
constexpr Rgb kCream{0xf3, 0xe5, 0xc0};
constexpr Rgb kIndigo{0x1f, 0x3a, 0x68};
constexpr Rgb kIndigoPale{0x7a, 0x9c, 0xc6};
constexpr Rgb kIvory{0xfa, 0xf6, 0xee};
constexpr Rgb kMadder{0x9e, 0x2a, 0x2b};
constexpr Rgb kOchre{0xe0, 0xa4, 0x3a};

std::vector<Preset> build_catalog() {
  const auto a = [](double value) { return std::vector<ParamSpec>{{"a", value, 0.0, 1.0}}; };
  return {
      {"poke-planet", "Poke Planet Ball",
       "((x^2+y^2+z^2-100))*((x^4+y^4-2)*(x^3+y^3-4)*(x^4+y^4-8)*(x^3+y^3-16)*(x^4+y^4-32)*(x^3+y^3+36))",
       {}, 0.04, kMadder, kSogaDark, kCream},
      {"ding-dong", "Ding Dong", "x^2+y^2+z^3-z^2", {}, 0.5, kSoga, kSogaDark, kCream},
      {"atom-fish", "Atom Fish", "(x^2+y^2+z^3-z^2)*((x-y)(x+y)-a)((x+y)(x-y)+a)=0", a(0.02), 0.91, kIndigo,
       kIndigoPale, kIvory},
      {"ring-blaster", "Ring Blaster", "((x^2+y^2-1)^2+(y^2+z^2-1)^2-a)*((x-y)(x+y)-a)((x+y)(x-y)+a)=0", a(0.02),
       0.47, kOchre, kSogaDark, kIvory},
      {"cylinder-cross", "Cylinder Cross", "(x^2+y^2-1)^2+(z^2+(y+3-6*b)^2-1)^2-0.01*a=0",
       {{"a", 0.26, 0.0, 1.0}, {"b", 0.56, 0.0, 1.0}}, 0.71, kIndigo, kMadder, kCream},
      {"fig8-pair", "Cubic Pair", "(x^2+y^2+z^2+2*x*y*z-1)*((x-1)^2+(y-1)^2+(z-1)^2+2*(x-1)*(y-1)*(z-1)-2)=0", {},
       0.3, kSoga, kIndigo, kCream},
      {"fig8-scaled", "Cubic and Dilate", "(x^2+y^2+z^2+2*x*y*z-1)*((x/2)^2+(y/2)^2+(z/2)^2-2*x/2*y/2*z/2-1)=0", {},
       0.25, kMadder, kSoga, kIvory},
      {"fig8-family", "Cubic Family",
       "(x^2+y^2+z^2+2*x*y*z-1)*((x/2)^2+(y/2)^2+(z/2)^2-2*x/2*y/2*z/2-1)*((x/3)^2+(y/3)^2+(z/3)^2-2*x/3*y/"
       "3*z/3-1)*((x/5)^2+(y/5)^2+(z/5)^2-2*x/5*y/5*z/5-1)=0",
       {}, 0.1, kIndigo, kOchre, kIvory},
  };
}

// Nearest-neighbor copy of `tile` into the (w x h) rectangle at (x0, y0).
void blit_scaled(const Image& tile, Image& dst, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) {
  for (std::size_t dy = 0; dy < h; ++dy) {
    const std::size_t sy = (2 * dy + 1) * tile.height() / (2 * h);
    for (std::size_t dx = 0; dx < w; ++dx) {
      const std::size_t sx = (2 * dx + 1) * tile.width() / (2 * w);
      dst.at(x0 + dx, y0 + dy) = tile.at(sx, sy);
    }
  }
}

void check_output_size(std::size_t w, std::size_t h, std::size_t max_pixels) {
  if (w == 0 || h == 0 || w > max_pixels / h) throw std::invalid_argument("motif output exceeds the size limit");
}

}  // namespace

Scene Preset::scene(std::size_t width, std::size_t height) const {
  Scene s;
  s.equation = parse(equation);
  for (const ParamSpec& p : params) s.params[p.name] = p.value;
  s.zoom = zoom;
  s.width = width;
  s.height = height;
  s.front = front;
  s.back = back;
  s.background = background;
  return s;
}

const std::vector<Preset>& preset_catalog() {
  static const std::vector<Preset> catalog = build_catalog();
  return catalog;
}

std::string preset_names() {
  std::string out;
  for (const Preset& p : preset_catalog()) {
    if (!out.empty()) out += ", ";
    out += p.name;
  }
  return out;
}

const Preset& find_preset(std::string_view name) {
  for (const Preset& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  throw UnknownPresetError("unknown preset '" + std::string(name) + "'; available: " + preset_names());
}

std::string catalog_to_json() {
  nlohmann::json out = nlohmann::json::array();
  for (const Preset& p : preset_catalog()) {
    nlohmann::json params = nlohmann::json::object(), ranges = nlohmann::json::object();
    for (const ParamSpec& s : p.params) {
      params[s.name] = s.value;
      ranges[s.name] = {s.min, s.max};
    }
    out.push_back({{"name", p.name},
                   {"title", p.title},
                   {"equation", p.equation},
                   {"params", params},
                   {"ranges", ranges},
                   {"zoom", p.zoom},
                   {"colors", {{"front", to_hex(p.front)}, {"back", to_hex(p.back)}, {"background", to_hex(p.background)}}}});
  }
  return out.dump(2);
}

std::vector<std::size_t> fibonacci(std::size_t n) {
  if (n < 1 || n > kMaxFibonacciCount) throw std::invalid_argument("Fibonacci count must lie in [1, 40]");
  std::vector<std::size_t> f{1};
  if (n > 1) f.push_back(1);
  while (f.size() < n) f.push_back(f[f.size() - 1] + f[f.size() - 2]);
  return f;
}

FibonacciLayout fibonacci_layout(const Image& tile, std::size_t n, std::size_t canvas_w, std::size_t canvas_h,
                                 std::optional<Rgb> background) {
  if (tile.empty()) throw std::invalid_argument("tile is empty");
  if (canvas_w == 0 || canvas_h == 0) throw std::invalid_argument("canvas is empty");
  const std::vector<std::size_t> fib = fibonacci(n);

  // Spiral in unit squares: square i is attached right, below, left, above in turn.
  struct Cell {
    long long x, y;
    long long side;
  };
  std::vector<Cell> cells{{0, 0, 1}};
  long long x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  for (std::size_t i = 1; i < n; ++i) {
    const auto s = static_cast<long long>(fib[i]);
    Cell c{};
    switch (i % 4) {
      case 1: c = {x1, y0, s}; break;
      case 2: c = {x0, y1, s}; break;
      case 3: c = {x0 - s, y0, s}; break;
      default: c = {x0, y0 - s, s}; break;
    }
    cells.push_back(c);
    x0 = std::min(x0, c.x);
    y0 = std::min(y0, c.y);
    x1 = std::max(x1, c.x + s);
    y1 = std::max(y1, c.y + s);
  }
  const auto span_w = static_cast<double>(x1 - x0), span_h = static_cast<double>(y1 - y0);

  // Largest unit cell with the tile's aspect that fits, floored to whole pixels.
  const double tw = static_cast<double>(tile.width()), th = static_cast<double>(tile.height());
  const double scale = std::min(static_cast<double>(canvas_w) / (span_w * tw), static_cast<double>(canvas_h) / (span_h * th));
  FibonacciLayout out;
  out.unit_w = static_cast<std::size_t>(std::floor(scale * tw));
  out.unit_h = static_cast<std::size_t>(std::floor(scale * th));
  // Rounding the product can overshoot by one unit; shrink until it fits.
  while (out.unit_w > 0 && out.unit_w * static_cast<std::size_t>(span_w) > canvas_w) --out.unit_w;
  while (out.unit_h > 0 && out.unit_h * static_cast<std::size_t>(span_h) > canvas_h) --out.unit_h;
  if (out.unit_w < 1 || out.unit_h < 1) {
    throw std::invalid_argument("canvas " + std::to_string(canvas_w) + "x" + std::to_string(canvas_h) +
                                " is too small for " + std::to_string(n) + " Fibonacci copies");
  }

  const std::size_t used_w = out.unit_w * static_cast<std::size_t>(span_w);
  const std::size_t used_h = out.unit_h * static_cast<std::size_t>(span_h);
  const std::size_t off_x = (canvas_w - used_w) / 2, off_y = (canvas_h - used_h) / 2;
  out.image = Image(canvas_w, canvas_h, background.value_or(tile.at(0, 0)));
  for (const Cell& c : cells) {
    Placement p;
    p.x = off_x + static_cast<std::size_t>(c.x - x0) * out.unit_w;
    p.y = off_y + static_cast<std::size_t>(c.y - y0) * out.unit_h;
    p.width = static_cast<std::size_t>(c.side) * out.unit_w;
    p.height = static_cast<std::size_t>(c.side) * out.unit_h;
    blit_scaled(tile, out.image, p.x, p.y, p.width, p.height);
    out.copies.push_back(p);
  }
  return out;
}

Image grid_tile(const Image& tile, std::size_t rows, std::size_t cols, bool mirror) {
  if (tile.empty()) throw std::invalid_argument("tile is empty");
  if (rows == 0 || cols == 0) throw std::invalid_argument("grid needs at least one row and column");
  const std::size_t tw = tile.width(), th = tile.height();
  Image out(cols * tw, rows * th);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const bool flip = mirror && (r + c) % 2 == 1;
      for (std::size_t y = 0; y < th; ++y) {
        for (std::size_t x = 0; x < tw; ++x) {
          out.at(c * tw + x, r * th + y) = tile.at(flip ? tw - 1 - x : x, y);
        }
      }
    }
  }
  return out;
}

std::map<Rgb, std::size_t> histogram(const Image& img) {
  std::map<Rgb, std::size_t> h;
  for (Rgb p : img.pixels()) ++h[p];
  return h;
}

Image apply_palette(const Image& img, const Palette& mapping) {
  std::set<Rgb> targets;
  for (const auto& [color, count] : histogram(img)) {
    const auto it = mapping.find(color);
    if (it == mapping.end()) throw std::invalid_argument("palette does not cover color " + to_hex(color));
    if (!targets.insert(it->second).second) {
      throw std::invalid_argument("palette maps two image colors to " + to_hex(it->second));
    }
  }
  Image out = img;
  for (Rgb& p : out.pixels()) p = mapping.at(p);
  return out;
}

std::optional<LayoutMode> parse_layout_mode(std::string_view name) {
  if (name == "fib" || name == "fibonacci") return LayoutMode::Fibonacci;
  if (name == "grid") return LayoutMode::Grid;
  return std::nullopt;
}

std::string_view layout_mode_name(LayoutMode mode) { return mode == LayoutMode::Fibonacci ? "fib" : "grid"; }

Image compose_motif(const Image& tile, const MotifLayout& layout, std::size_t max_pixels) {
  if (layout.count == 0) throw std::invalid_argument("layout count must be at least 1");
  if (layout.mode == LayoutMode::Grid) {
    if (layout.count > std::numeric_limits<std::size_t>::max() / std::max(tile.width(), tile.height())) {
      throw std::invalid_argument("motif output exceeds the size limit");
    }
    check_output_size(layout.count * tile.width(), layout.count * tile.height(), max_pixels);
    return grid_tile(tile, layout.count, layout.count, layout.mirror);
  }
  const std::size_t w = layout.canvas_w != 0 ? layout.canvas_w : 2 * tile.width();
  const std::size_t h = layout.canvas_h != 0 ? layout.canvas_h : 2 * tile.height();
  check_output_size(w, h, max_pixels);
  return fibonacci_layout(tile, layout.count, w, h).image;
}

}  // namespace batik
