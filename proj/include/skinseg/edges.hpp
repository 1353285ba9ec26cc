#pragma once

#include <vector>

#include "skinseg/image.hpp"

namespace skinseg {

struct CannyParams {
  double sigma = 1.4;
  double low = 40.0;    // on the unnormalised 3x3 Sobel magnitude scale
  double high = 100.0;

  void validate() const;
};

/// Smoothed Sobel gradient magnitude per pixel. The one-pixel frame is 0.
Grid<double> gradient_magnitude(const ScalarPlane& gray, double sigma);

EdgeMap canny(const ScalarPlane& gray, const CannyParams& p);

EdgeMap image_edges(const RgbImage& img, const CannyParams& p);

}  // namespace skinseg
