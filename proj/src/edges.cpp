#include "skinseg/edges.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "skinseg/colorspace.hpp"

namespace skinseg {
namespace {

// Smoothing and Sobel run on integers so mirrored inputs give bit-identical
// gradients; the magnitude is rescaled by the kernel mass afterwards.
constexpr double kKernelScale = 256.0;

struct Gradients {
  int width = 0, height = 0;
  std::vector<std::int64_t> gx, gy;
  std::vector<double> mag;  // true (rescaled) magnitude
};

std::vector<std::int64_t> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<std::int64_t> k(2 * radius + 1);
  for (int j = -radius; j <= radius; ++j)
    k[j + radius] = std::llround(kKernelScale * std::exp(-(j * j) / (2.0 * sigma * sigma)));
  return k;
}

Gradients compute_gradients(const ScalarPlane& gray, double sigma) {
  const int w = gray.width(), h = gray.height();
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  std::int64_t mass = 0;
  for (auto v : kernel) mass += v;

  std::vector<std::int64_t> tmp(static_cast<std::size_t>(w) * h);
  std::vector<std::int64_t> sm(tmp.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int j = -radius; j <= radius; ++j)
        acc += kernel[j + radius] * gray.at(std::clamp(x + j, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int j = -radius; j <= radius; ++j)
        acc += kernel[j + radius] * tmp[static_cast<std::size_t>(std::clamp(y + j, 0, h - 1)) * w + x];
      sm[static_cast<std::size_t>(y) * w + x] = acc;
    }

  Gradients g;
  g.width = w;
  g.height = h;
  g.gx.assign(tmp.size(), 0);
  g.gy.assign(tmp.size(), 0);
  g.mag.assign(tmp.size(), 0.0);
  const double norm = static_cast<double>(mass) * static_cast<double>(mass);
  auto s = [&](int x, int y) { return sm[static_cast<std::size_t>(y) * w + x]; };
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      const std::int64_t gx = (s(x + 1, y - 1) + 2 * s(x + 1, y) + s(x + 1, y + 1)) -
                              (s(x - 1, y - 1) + 2 * s(x - 1, y) + s(x - 1, y + 1));
      const std::int64_t gy = (s(x - 1, y + 1) + 2 * s(x, y + 1) + s(x + 1, y + 1)) -
                              (s(x - 1, y - 1) + 2 * s(x, y - 1) + s(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      g.gx[i] = gx;
      g.gy[i] = gy;
      const double fx = static_cast<double>(gx), fy = static_cast<double>(gy);
      g.mag[i] = std::sqrt(fx * fx + fy * fy) / norm;
    }
  return g;
}

}  // namespace

void CannyParams::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "canny sigma must be > 0");
  if (!(low >= 0.0 && low <= high))
    throw Error(ErrorCode::InvalidArgument, "canny thresholds need 0 <= low <= high");
}

Grid<double> gradient_magnitude(const ScalarPlane& gray, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "canny sigma must be > 0");
  Gradients g = compute_gradients(gray, sigma);
  return Grid<double>(g.width, g.height, std::move(g.mag));
}

EdgeMap canny(const ScalarPlane& gray, const CannyParams& p) {
  p.validate();
  const int w = gray.width(), h = gray.height();
  if (w < 3 || h < 3)
    throw Error(ErrorCode::InvalidArgument, "edge detection needs at least a 3x3 plane");
  const Gradients g = compute_gradients(gray, p.sigma);
  auto at = [&](int x, int y) { return g.mag[static_cast<std::size_t>(y) * w + x]; };

  // 0 = suppressed, 1 = weak, 2 = strong.
  std::vector<std::uint8_t> level(g.mag.size(), 0);
  constexpr double kTan22 = 0.41421356237309503;
  constexpr double kTan67 = 2.4142135623730949;
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = g.mag[i];
      if (m < p.low || m == 0.0) continue;
      const double ax = std::abs(static_cast<double>(g.gx[i]));
      const double ay = std::abs(static_cast<double>(g.gy[i]));
      int dx, dy;
      if (ay <= kTan22 * ax) {
        dx = 1, dy = 0;
      } else if (ay > kTan67 * ax) {
        dx = 0, dy = 1;
      } else if ((g.gx[i] > 0) == (g.gy[i] > 0)) {
        dx = 1, dy = 1;
      } else {
        dx = -1, dy = 1;
      }
      // Strict on the trailing side, inclusive on the leading side, so a
      // plateau of two equal maxima keeps exactly one pixel.
      if (!(m > at(x - dx, y - dy) && m >= at(x + dx, y + dy))) continue;
      level[i] = m >= p.high ? 2 : 1;
    }

  EdgeMap edges(w, h, 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < level.size(); ++i)
    if (level[i] == 2) {
      edges[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (level[j] == 1 && !edges[j]) {
          edges[j] = 1;
          stack.push_back(j);
        }
      }
  }
  return edges;
}

EdgeMap image_edges(const RgbImage& img, const CannyParams& p) {
  return canny(luminance_gray(img), p);
}

}  // namespace skinseg
