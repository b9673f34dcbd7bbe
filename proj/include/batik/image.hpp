#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace batik {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend constexpr bool operator==(Rgb, Rgb) = default;
  friend constexpr auto operator<=>(Rgb, Rgb) = default;
};

/// "#rrggbb" (case-insensitive) or nullopt.
std::optional<Rgb> parse_hex_color(std::string_view text);
/// Lowercase "#rrggbb".
std::string to_hex(Rgb c);

/// Row-major RGB grid; pixel (x, y) has y = 0 at the top row.
class Image {
 public:
  Image() = default;
  /// Throws std::invalid_argument when either dimension is zero or the pixel
  /// count overflows.
  Image(std::size_t width, std::size_t height, Rgb fill = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  Rgb& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  Rgb at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  const std::vector<Rgb>& pixels() const noexcept { return pixels_; }
  std::vector<Rgb>& pixels() noexcept { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Rgb> pixels_;
};

enum class ImageFormat { Png, Ppm };

std::optional<ImageFormat> parse_image_format(std::string_view name);
/// "png" or "ppm", the inverse of parse_image_format.
std::string_view format_name(ImageFormat f);
std::string_view content_type(ImageFormat f);

/// Binary PPM: "P6\n<w> <h>\n255\n" followed by w*h*3 bytes.
std::string encode_ppm(const Image& img);
/// Reads a P6 file with maxval 255; comments in the header are allowed.
/// Throws std::invalid_argument on malformed input.
Image decode_ppm(std::string_view data);

/// 8-bit RGB, non-interlaced PNG.
std::string encode_png(const Image& img);
/// Any PNG, converted to 8-bit RGB. Throws std::invalid_argument on malformed data.
Image decode_png(std::string_view data);

std::string encode_image(const Image& img, ImageFormat format);

/// Throws IoError when the file cannot be written, std::invalid_argument for an empty image.
void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format);
/// Reads a PPM or PNG file, picked by its signature. Throws IoError or std::invalid_argument.
Image read_image(const std::filesystem::path& path);

}  // namespace batik
