#include "batik/image.hpp"

#include <png.h>

#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>

#include "batik/io_error.hpp"

namespace batik {
namespace {

constexpr std::uint64_t kMaxDecodedPixels = std::uint64_t{1} << 28;

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Header token reader for PPM; skips whitespace and '#' comments.
class PpmHeader {
 public:
  explicit PpmHeader(std::string_view data) : data_(data) {}

  std::size_t number() {
    skip();
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(data_.data() + pos_, data_.data() + data_.size(), value);
    if (ec != std::errc{} || end == data_.data() + pos_) throw std::invalid_argument("malformed PPM header");
    pos_ = static_cast<std::size_t>(end - data_.data());
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_start() {
    if (pos_ >= data_.size() || std::isspace(static_cast<unsigned char>(data_[pos_])) == 0) {
      throw std::invalid_argument("malformed PPM header");
    }
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < data_.size()) {
      if (std::isspace(static_cast<unsigned char>(data_[pos_])) != 0) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view data_;
  std::size_t pos_ = 2;
};

void check_encodable(const Image& img) {
  if (img.empty()) throw std::invalid_argument("cannot encode an empty image");
}

}  // namespace

std::optional<Rgb> parse_hex_color(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') return std::nullopt;
  int v[6];
  for (int i = 0; i < 6; ++i) {
    v[i] = hex_digit(text[1 + i]);
    if (v[i] < 0) return std::nullopt;
  }
  return Rgb{static_cast<std::uint8_t>(v[0] * 16 + v[1]), static_cast<std::uint8_t>(v[2] * 16 + v[3]),
             static_cast<std::uint8_t>(v[4] * 16 + v[5])};
}

std::string to_hex(Rgb c) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s = "#";
  for (std::uint8_t v : {c.r, c.g, c.b}) {
    s += kDigits[v >> 4];
    s += kDigits[v & 15];
  }
  return s;
}

Image::Image(std::size_t width, std::size_t height, Rgb fill) : width_(width), height_(height) {
  if (width == 0 || height == 0) throw std::invalid_argument("image dimensions must be positive");
  if (width > std::numeric_limits<std::size_t>::max() / 3 / height) {
    throw std::invalid_argument("image dimensions overflow");
  }
  pixels_.assign(width * height, fill);
}

std::optional<ImageFormat> parse_image_format(std::string_view name) {
  if (name == "png") return ImageFormat::Png;
  if (name == "ppm") return ImageFormat::Ppm;
  return std::nullopt;
}

std::string_view format_name(ImageFormat f) { return f == ImageFormat::Png ? "png" : "ppm"; }

std::string_view content_type(ImageFormat f) {
  return f == ImageFormat::Png ? "image/png" : "image/x-portable-pixmap";
}

std::string encode_ppm(const Image& img) {
  check_encodable(img);
  std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + img.pixels().size() * 3);
  char* dst = out.data() + header;
  for (Rgb p : img.pixels()) {
    *dst++ = static_cast<char>(p.r);
    *dst++ = static_cast<char>(p.g);
    *dst++ = static_cast<char>(p.b);
  }
  return out;
}

Image decode_ppm(std::string_view data) {
  if (data.size() < 2 || data.substr(0, 2) != "P6") throw std::invalid_argument("not a binary PPM (P6)");
  PpmHeader header(data);
  const std::size_t w = header.number(), h = header.number(), maxval = header.number();
  if (maxval != 255) throw std::invalid_argument("only 8-bit PPM is supported");
  const std::size_t start = header.raster_start();
  const std::size_t raster = data.size() - std::min(start, data.size());
  if (w == 0 || h == 0 || w > raster / 3 / h || w * h * 3 != raster) {
    throw std::invalid_argument("PPM raster size mismatch");
  }
  Image img(w, h);
  const auto* src = reinterpret_cast<const std::uint8_t*>(data.data() + start);
  for (Rgb& p : img.pixels()) {
    p = {src[0], src[1], src[2]};
    src += 3;
  }
  return img;
}

std::string encode_png(const Image& img) {
  check_encodable(img);
  if (img.width() > 0x7fffffff / 3 || img.height() > 0x7fffffff) throw std::invalid_argument("image too large for PNG");
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width());
  desc.height = static_cast<png_uint_32>(img.height());
  desc.format = PNG_FORMAT_RGB;
  static_assert(sizeof(Rgb) == 3);
  const void* raster = img.pixels().data();
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, raster, 0, nullptr)) {
    throw std::runtime_error(std::string("PNG encoding failed: ") + desc.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, raster, 0, nullptr)) {
    throw std::runtime_error(std::string("PNG encoding failed: ") + desc.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::string_view data) {
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, data.data(), data.size())) {
    throw std::invalid_argument(std::string("malformed PNG: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  if (static_cast<std::uint64_t>(desc.width) * desc.height > kMaxDecodedPixels) {
    png_image_free(&desc);
    throw std::invalid_argument("PNG dimensions exceed the decoder limit");
  }
  Image img;
  try {
    img = Image(desc.width, desc.height);
  } catch (...) {
    png_image_free(&desc);
    throw;
  }
  if (!png_image_finish_read(&desc, nullptr, img.pixels().data(), 0, nullptr)) {
    throw std::invalid_argument(std::string("malformed PNG: ") + desc.message);
  }
  return img;
}

std::string encode_image(const Image& img, ImageFormat format) {
  return format == ImageFormat::Png ? encode_png(img) : encode_ppm(img);
}

void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
  const std::string bytes = encode_image(img, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
    return decode_png(bytes);
  }
  return decode_ppm(bytes);
}

}  // namespace batik
