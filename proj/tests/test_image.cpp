#include <doctest.h>

#include <filesystem>
#include <random>

#include "batik/image.hpp"
#include "batik/io_error.hpp"

using namespace batik;

namespace {

Image noise(std::size_t w, std::size_t h, unsigned seed) {
  std::mt19937 rng(seed);
  Image img(w, h);
  for (Rgb& p : img.pixels()) {
    p = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
  }
  return img;
}

}  // namespace

TEST_CASE("hex colors") {
  CHECK(parse_hex_color("#FF8000") == Rgb{255, 128, 0});
  CHECK(parse_hex_color("#0a0b0c") == Rgb{10, 11, 12});
  CHECK_FALSE(parse_hex_color("ff8000").has_value());
  CHECK_FALSE(parse_hex_color("#ff800").has_value());
  CHECK_FALSE(parse_hex_color("#gg8000").has_value());
  CHECK(to_hex({255, 128, 0}) == "#ff8000");
  CHECK(parse_hex_color(to_hex({1, 2, 3})) == Rgb{1, 2, 3});
}

TEST_CASE("image construction") {
  CHECK_THROWS_AS(Image(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(Image(3, 0), std::invalid_argument);
  const Image img(3, 2, {1, 2, 3});
  CHECK(img.pixels().size() == 6);
  CHECK(img.at(2, 1) == Rgb{1, 2, 3});
}

TEST_CASE("PPM encoding") {
  const std::string one = encode_ppm(Image(1, 1, {7, 8, 9}));
  CHECK(one == std::string("P6\n1 1\n255\n\x07\x08\x09", 14));
  CHECK(one.size() - one.find("255\n") - 4 == 3);

  const Image img = noise(17, 9, 1);
  CHECK(decode_ppm(encode_ppm(img)) == img);
  CHECK(decode_ppm(std::string("P6 # comment\n1 1\n255\n\x01\x02\x03", 24)) == Image(1, 1, {1, 2, 3}));

  CHECK_THROWS_AS(encode_ppm(Image{}), std::invalid_argument);
  CHECK_THROWS_AS(decode_ppm("P3\n1 1\n255\n1 2 3"), std::invalid_argument);
  CHECK_THROWS_AS(decode_ppm("P6\n2 1\n255\nabc"), std::invalid_argument);
  CHECK_THROWS_AS(decode_ppm("P6\n1 1\n65535\nabcdef"), std::invalid_argument);
  CHECK_THROWS_AS(decode_ppm("P6\n99999999 99999999\n255\nabc"), std::invalid_argument);
  CHECK_THROWS_AS(decode_ppm("P6"), std::invalid_argument);
}

TEST_CASE("PNG round trip") {
  const Image img = noise(31, 7, 2);
  const std::string png = encode_png(img);
  CHECK(png.substr(1, 3) == "PNG");
  CHECK(decode_png(png) == img);
  CHECK_THROWS_AS(decode_png("not a png"), std::invalid_argument);
  CHECK_THROWS_AS(decode_png(png.substr(0, png.size() / 2)), std::invalid_argument);
}

TEST_CASE("image files") {
  const auto dir = std::filesystem::temp_directory_path();
  const Image img = noise(5, 4, 3);
  for (ImageFormat f : {ImageFormat::Ppm, ImageFormat::Png}) {
    const auto path = dir / ("batik_test_image." + std::string(format_name(f)));
    write_image(img, path, f);
    CHECK(read_image(path) == img);
    std::filesystem::remove(path);
    CHECK(parse_image_format(format_name(f)) == f);
  }
  CHECK_THROWS_AS(write_image(img, dir / "no-such-dir" / "x.ppm", ImageFormat::Ppm), IoError);
  CHECK_THROWS_AS(read_image(dir / "no-such-file.ppm"), IoError);
  CHECK_FALSE(parse_image_format("gif").has_value());
}
