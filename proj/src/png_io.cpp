#include "skinseg/png_io.hpp"

#include <cstring>
#include <png.h>

namespace skinseg {
namespace {

struct PngImage {
  png_image image;

  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_pixels(const std::string& path, png_uint_32 format,
                                      int& width, int& height) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str()))
    throw Error(ErrorCode::Io, "cannot read PNG " + path + ": " + png.image.message);
  png.image.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr))
    throw Error(ErrorCode::Io, "cannot decode PNG " + path + ": " + png.image.message);
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  return buf;
}

void write_pixels(const std::string& path, png_uint_32 format, int width, int height,
                  const void* data) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, data, 0, nullptr))
    throw Error(ErrorCode::Io, "cannot write PNG " + path + ": " + png.image.message);
}

}  // namespace

RgbImage read_png_rgb(const std::string& path) {
  int w = 0, h = 0;
  // Read with alpha so libpng never composites; the alpha byte is discarded.
  const auto buf = read_pixels(path, PNG_FORMAT_RGBA, w, h);
  RgbImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i)
    img[i] = {buf[4 * i], buf[4 * i + 1], buf[4 * i + 2]};
  return img;
}

ScalarPlane read_png_gray(const std::string& path) {
  int w = 0, h = 0;
  const auto buf = read_pixels(path, PNG_FORMAT_GA, w, h);
  ScalarPlane plane(w, h);
  for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = buf[2 * i];
  return plane;
}

void write_png_gray(const std::string& path, const ScalarPlane& plane) {
  write_pixels(path, PNG_FORMAT_GRAY, plane.width(), plane.height(), plane.values().data());
}

void write_png_rgb(const std::string& path, const RgbImage& img) {
  static_assert(sizeof(Rgb) == 3);
  write_pixels(path, PNG_FORMAT_RGB, img.width(), img.height(), img.values().data());
}

}  // namespace skinseg
