#pragma once

#include <string>

#include "skinseg/image.hpp"

namespace skinseg {

/// 8-bit PNG of any colour type; alpha is dropped, grey expands to RGB.
RgbImage read_png_rgb(const std::string& path);
ScalarPlane read_png_gray(const std::string& path);

void write_png_gray(const std::string& path, const ScalarPlane& plane);
void write_png_rgb(const std::string& path, const RgbImage& img);

}  // namespace skinseg
