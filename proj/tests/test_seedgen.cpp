#include <doctest.h>

#include <random>

#include "skinseg/seedgen.hpp"

using namespace skinseg;

namespace {

constexpr Ternary W = Ternary::White, G = Ternary::Gray, B = Ternary::Black;

TernaryImage random_ternary(std::mt19937& rng, int w, int h) {
  TernaryImage t(w, h);
  const int bias = rng() % 3;
  for (auto& v : t.values()) {
    const int r = (rng() % 5 + bias) % 3;
    v = r == 0 ? W : r == 1 ? G : B;
  }
  return t;
}

// Neighbour score restated pixel by pixel.
double naive_score(const TernaryImage& t, int x, int y, double k) {
  double inner = 0, outer = 0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const Ternary v = t.at(x + dx, y + dy);
      const int s = v == W ? 1 : v == B ? -1 : 0;
      if (std::abs(dx) <= 1 && std::abs(dy) <= 1)
        inner += s;
      else
        outer += s;
    }
  return k * inner + outer;
}

SkinClusterModel box_model() {
  // Inner: a square around (Y, Cb, Cr) = (150, 110, 150); outer much wider.
  auto sq = [](int r0, int c0, int r1, int c1) {
    return Polygon{{{r0, c0}, {r1, c0}, {r1, c1}, {r0, c1}}};
  };
  std::array<PolygonPair, 3> planes{
      PolygonPair{sq(140, 100, 160, 120), sq(100, 80, 200, 140)},
      PolygonPair{sq(140, 140, 160, 160), sq(100, 120, 200, 180)},
      PolygonPair{sq(100, 140, 120, 160), sq(80, 120, 140, 180)},
  };
  return SkinClusterModel(planes, {});
}

}  // namespace

TEST_CASE("neighbour score examples") {
  TernaryImage all_white(5, 5, W);
  CHECK(neighbor_score(all_white, 2, 2, 2.0) == 32.0);
  TernaryImage all_black(5, 5, B);
  CHECK(neighbor_score(all_black, 2, 2, 2.0) == -32.0);

  // 3x3 ring: 5 white and 3 black; 5x5 ring: 10 gray and 6 black.
  TernaryImage t(5, 5, G);
  int inner = 0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      if (!dx && !dy) continue;
      t.at(2 + dx, 2 + dy) = inner++ < 5 ? W : B;
    }
  int outer = 0;
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x)
      if (x == 0 || y == 0 || x == 4 || y == 4) t.at(x, y) = outer++ < 6 ? B : G;
  CHECK(neighbor_score(t, 2, 2, 2.0) == -2.0);
  CHECK(naive_score(t, 2, 2, 2.0) == -2.0);

  CHECK_THROWS_AS(neighbor_score(t, 1, 2, 2.0), Error);
  CHECK_THROWS_AS(neighbor_score(t, 2, 3, 2.0), Error);
}

TEST_CASE("refinement examples") {
  const SeedParams p;
  TernaryImage white(7, 7, W);
  CHECK(refine_ternary(white, p) == white);

  TernaryImage isolated(5, 5, B);
  isolated.at(2, 2) = G;
  CHECK(refine_ternary(isolated, p).at(2, 2) == B);

  TernaryImage surrounded(5, 5, W);
  surrounded.at(2, 2) = G;
  CHECK(refine_ternary(surrounded, p).at(2, 2) == W);

  // Band between th1 and th2 leaves the pixel alone.
  TernaryImage neutral(5, 5, G);
  CHECK(refine_ternary(neutral, p) == neutral);
}

TEST_CASE("border pixels are copied") {
  std::mt19937 rng(1);
  const TernaryImage t = random_ternary(rng, 9, 7);
  const TernaryImage r = refine_ternary(t, {});
  for (int y = 0; y < t.height(); ++y)
    for (int x = 0; x < t.width(); ++x)
      if (x < 2 || y < 2 || x >= t.width() - 2 || y >= t.height() - 2)
        CHECK(r.at(x, y) == t.at(x, y));
  // Images too small for any interior pass through untouched.
  const TernaryImage tiny = random_ternary(rng, 4, 4);
  CHECK(refine_ternary(tiny, {}) == tiny);
}

TEST_CASE("refinement matches a per-pixel restatement") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const TernaryImage t = random_ternary(rng, 6 + rng() % 20, 6 + rng() % 20);
    const SeedParams p{0.5 + (rng() % 8) * 0.5, -1.0 - static_cast<double>(rng() % 10),
                       static_cast<double>(rng() % 10)};
    const TernaryImage r = refine_ternary(t, p);
    for (int y = 2; y < t.height() - 2; ++y)
      for (int x = 2; x < t.width() - 2; ++x) {
        Ternary want = t.at(x, y);
        if (want != W) {
          const double z = naive_score(t, x, y, p.k);
          if (z > p.th2) want = W;
          else if (z < p.th1) want = B;
        }
        CHECK(r.at(x, y) == want);
      }
  }
}

TEST_CASE("refinement monotone in thresholds") {
  std::mt19937 rng(23);
  const TernaryImage t = random_ternary(rng, 30, 30);
  auto count = [](const TernaryImage& img, Ternary v) {
    return std::count(img.values().begin(), img.values().end(), v);
  };
  long prev_white = -1;
  for (double th2 = -10; th2 <= 20; th2 += 2) {
    const long white = count(refine_ternary(t, {2.0, -30.0, th2}), W);
    if (prev_white >= 0) CHECK(white <= prev_white);
    prev_white = white;
  }
  long prev_black = -1;
  for (double th1 = -30; th1 <= 5; th1 += 2) {
    const long black = count(refine_ternary(t, {2.0, th1, 6.0}), B);
    if (prev_black >= 0) CHECK(black >= prev_black);
    prev_black = black;
  }
}

TEST_CASE("seed extraction") {
  CHECK(extract_seed(TernaryImage(3, 3, W)) == SkinMask(3, 3, 1));
  CHECK(extract_seed(TernaryImage(3, 3, G)) == SkinMask(3, 3, 0));
  TernaryImage checker(4, 4);
  SkinMask expect(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      checker.at(x, y) = (x + y) % 2 ? W : B;
      expect.at(x, y) = (x + y) % 2;
    }
  CHECK(extract_seed(checker) == expect);
}

TEST_CASE("ternary image from the model") {
  const SkinClusterModel model = box_model();
  // YCbCr (150,110,150) is T1; pick RGB that lands there and elsewhere.
  auto find_rgb = [&](TernaryClass want) {
    for (int r = 0; r < 256; r += 3)
      for (int g = 0; g < 256; g += 3)
        for (int b = 0; b < 256; b += 3) {
          const Rgb p{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                      static_cast<std::uint8_t>(b)};
          if (model.classify(rgb_to_ycbcr(p)) == want) return p;
        }
    FAIL("no pixel of the requested class");
    return Rgb{};
  };
  const Rgb t1 = find_rgb(TernaryClass::T1), t2 = find_rgb(TernaryClass::T2),
            t3 = find_rgb(TernaryClass::T3);
  CHECK(make_ternary(RgbImage(3, 2, t1), model) == TernaryImage(3, 2, W));
  CHECK(make_ternary(RgbImage(3, 2, t3), model) == TernaryImage(3, 2, B));
  const TernaryImage mixed = make_ternary(RgbImage(2, 1, std::vector<Rgb>{t1, t2}), model);
  CHECK(mixed[0] == W);
  CHECK(mixed[1] == G);
}

TEST_CASE("seed parameters are validated") {
  CHECK_THROWS_AS((SeedParams{0.0, -6, 6}.validate()), Error);
  CHECK_THROWS_AS((SeedParams{2.0, 6, 6}.validate()), Error);
  CHECK_NOTHROW(SeedParams{}.validate());
}
