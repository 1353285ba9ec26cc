#include <doctest.h>

#include <cmath>
#include <random>

#include "skinseg/colorspace.hpp"
#include "skinseg/edges.hpp"

#include "test_util.hpp"

using namespace skinseg;

namespace {

ScalarPlane step_plane() {
  ScalarPlane p(16, 16, 0);
  for (int y = 0; y < 16; ++y)
    for (int x = 8; x < 16; ++x) p.at(x, y) = 255;
  return p;
}

// Horizontal-only profile of the step after Gaussian smoothing, computed in
// floating point from the normalised kernel.
std::vector<double> smoothed_step_profile(double sigma) {
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> k;
  double mass = 0;
  for (int j = -radius; j <= radius; ++j) {
    k.push_back(std::llround(256.0 * std::exp(-(j * j) / (2 * sigma * sigma))));
    mass += k.back();
  }
  std::vector<double> out(16);
  for (int x = 0; x < 16; ++x) {
    double acc = 0;
    for (int j = -radius; j <= radius; ++j) {
      const int xx = std::clamp(x + j, 0, 15);
      acc += k[j + radius] * (xx >= 8 ? 255.0 : 0.0);
    }
    out[x] = acc / mass;
  }
  return out;
}

ScalarPlane random_plane(std::mt19937& rng, int w, int h) {
  ScalarPlane p(w, h);
  // Blocks plus noise so there are edges of many strengths.
  const int block = 3 + rng() % 6;
  std::vector<int> level((w / block + 1) * (h / block + 1));
  for (auto& v : level) v = rng() % 256;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int v = level[(y / block) * (w / block + 1) + x / block] + static_cast<int>(rng() % 21) - 10;
      p.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  return p;
}

}  // namespace

TEST_CASE("constant plane has no edges") {
  for (int v : {0, 77, 255}) {
    const EdgeMap e = canny(ScalarPlane(12, 9, static_cast<std::uint8_t>(v)), {});
    for (auto b : e.values()) CHECK(b == 0);
  }
}

TEST_CASE("step image gradient matches a direct evaluation") {
  const auto s = smoothed_step_profile(1.4);
  const Grid<double> mag = gradient_magnitude(step_plane(), 1.4);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      // Rows are constant, so Sobel-x reduces to 4 * (s[x+1] - s[x-1]).
      const bool interior = x > 0 && y > 0 && x < 15 && y < 15;
      const double want = interior ? 4 * (s[x + 1] - s[x - 1]) : 0.0;
      CHECK(mag.at(x, y) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("step image yields one vertical line") {
  const EdgeMap e = canny(step_plane(), {});
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      INFO("x=", x, " y=", y);
      CHECK(e.at(x, y) == (x == 7 && y >= 1 && y <= 14 ? 1 : 0));
    }
  // The mirrored step keeps a single line too.
  ScalarPlane mirrored = step_plane();
  for (auto& v : mirrored.values()) v = static_cast<std::uint8_t>(255 - v);
  int count = 0;
  for (auto b : values_of(canny(mirrored, {}))) count += b;
  CHECK(count == 14);
}

TEST_CASE("black and white split image") {
  RgbImage img(16, 16, Rgb{0, 0, 0});
  for (int y = 0; y < 16; ++y)
    for (int x = 8; x < 16; ++x) img.at(x, y) = {255, 255, 255};
  CHECK(image_edges(img, {}) == canny(step_plane(), {}));
}

TEST_CASE("chroma-only variation gives no edges") {
  // Both colours have luma 128 after rounding.
  RgbImage img(16, 16, Rgb{128, 128, 128});
  const Rgb other{194, 100, 100};
  REQUIRE(rgb_to_ycbcr(other).y == 128);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 8; ++x) img.at(x, y) = other;
  for (auto b : values_of(image_edges(img, {}))) CHECK(b == 0);
  for (auto b : values_of(image_edges(RgbImage(10, 10, Rgb{40, 90, 200}), {}))) CHECK(b == 0);
}

TEST_CASE("weak response without a strong neighbour is dropped") {
  // A faint step: magnitude between low and high everywhere along it.
  ScalarPlane faint(16, 16, 100);
  for (int y = 0; y < 16; ++y)
    for (int x = 8; x < 16; ++x) faint.at(x, y) = 140;
  const Grid<double> mag = gradient_magnitude(faint, 1.4);
  double peak = 0;
  for (auto v : mag.values()) peak = std::max(peak, v);
  REQUIRE(peak > 10);
  const CannyParams weak_only{1.4, peak * 0.5, peak * 1.5};
  for (auto b : values_of(canny(faint, weak_only))) CHECK(b == 0);
  const CannyParams strong{1.4, peak * 0.5, peak * 0.9};
  int n = 0;
  for (auto b : values_of(canny(faint, strong))) n += b;
  CHECK(n == 14);
}

TEST_CASE("edge map invariants on random planes") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarPlane p = random_plane(rng, 20 + rng() % 20, 20 + rng() % 20);
    const CannyParams params{1.0 + (rng() % 3) * 0.4, 20.0 + rng() % 40, 80.0 + rng() % 80};
    const EdgeMap e = canny(p, params);
    const Grid<double> mag = gradient_magnitude(p, params.sigma);
    const int w = p.width(), h = p.height();
    // Components by flood fill; each needs a strong pixel.
    std::vector<int> comp(e.size(), -1);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!e.at(x, y)) continue;
        CHECK(mag.at(x, y) >= params.low);
        CHECK((x > 0 && y > 0 && x < w - 1 && y < h - 1));
        if (comp[e.index(x, y)] >= 0) continue;
        bool strong = false;
        std::vector<std::pair<int, int>> stack{{x, y}};
        comp[e.index(x, y)] = 1;
        while (!stack.empty()) {
          auto [cx, cy] = stack.back();
          stack.pop_back();
          strong |= mag.at(cx, cy) >= params.high;
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const int nx = cx + dx, ny = cy + dy;
              if (e.contains(nx, ny) && e.at(nx, ny) && comp[e.index(nx, ny)] < 0) {
                comp[e.index(nx, ny)] = 1;
                stack.push_back({nx, ny});
              }
            }
        }
        CHECK(strong);
      }
    CHECK(canny(p, params) == e);
  }
}

TEST_CASE("raising the high threshold never adds edges") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 15; ++trial) {
    const ScalarPlane p = random_plane(rng, 32, 32);
    EdgeMap prev;
    bool first = true;
    for (double high : {60.0, 100.0, 160.0}) {
      const EdgeMap e = canny(p, {1.4, 40.0, high});
      if (!first)
        for (std::size_t i = 0; i < e.size(); ++i)
          if (e[i]) CHECK(prev[i]);
      prev = e;
      first = false;
    }
  }
}

TEST_CASE("canny preconditions") {
  CHECK_THROWS_AS(canny(ScalarPlane(2, 5), {}), Error);
  CHECK_THROWS_AS(canny(ScalarPlane(5, 5), {0.0, 1, 2}), Error);
  CHECK_THROWS_AS(canny(ScalarPlane(5, 5), {1.0, 3, 2}), Error);
}
