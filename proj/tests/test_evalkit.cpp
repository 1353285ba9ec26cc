#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "skinseg/evalkit.hpp"

using namespace skinseg;

namespace {

constexpr Rgb kRed{255, 0, 0}, kBlack{0, 0, 0}, kBlue{0, 0, 255};

}  // namespace

TEST_CASE("ground truth colours") {
  const RgbImage img(4, 1, std::vector<Rgb>{kRed, {250, 5, 5}, kBlack, kBlue});
  const GroundTruth gt = load_ground_truth(img);
  CHECK(gt[0] == GtLabel::Skin);
  CHECK(gt[1] == GtLabel::Skin);
  CHECK(gt[2] == GtLabel::NonSkin);
  CHECK(gt[3] == GtLabel::Ignore);

  RgbImage green(3, 2, kBlack);
  green.at(2, 1) = {0, 255, 0};
  try {
    load_ground_truth(green);
    FAIL("green pixel accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedGroundTruth);
    CHECK(std::string(e.what()).find("(2, 1)") != std::string::npos);
  }
  // Just inside and just outside the tolerance around black.
  CHECK(load_ground_truth(RgbImage(1, 1, Rgb{0, 100, 0}))[0] == GtLabel::NonSkin);
  CHECK_THROWS_AS(load_ground_truth(RgbImage(1, 1, Rgb{0, 101, 0})), Error);
}

TEST_CASE("confusion counts") {
  const GroundTruth gt(4, 1, std::vector<GtLabel>{GtLabel::Skin, GtLabel::Skin, GtLabel::NonSkin,
                                                  GtLabel::Ignore});
  const SkinMask mask(4, 1, std::vector<std::uint8_t>{1, 0, 1, 1});
  const Confusion c = confusion(mask, gt);
  CHECK(c == Confusion{1, 1, 0, 1});
  const Metrics m = metrics(c);
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
  CHECK(m.f_score == 0.5);

  CHECK_THROWS_AS(confusion(SkinMask(3, 1), gt), Error);

  // Exact mask and empty mask.
  std::mt19937 rng(4);
  std::vector<GtLabel> labels(100);
  for (auto& l : labels) l = static_cast<GtLabel>(rng() % 3);
  const GroundTruth g(10, 10, labels);
  SkinMask exact(10, 10), none(10, 10);
  for (int i = 0; i < 100; ++i) exact[i] = labels[i] == GtLabel::Skin;
  const Confusion e = confusion(exact, g);
  CHECK(e.fp == 0);
  CHECK(e.fn == 0);
  const Confusion z = confusion(none, g);
  CHECK(z.tp == 0);
  CHECK(z.fp == 0);
  const auto scored = std::count_if(labels.begin(), labels.end(),
                                    [](GtLabel l) { return l != GtLabel::Ignore; });
  CHECK(z.tp + z.fp + z.tn + z.fn == static_cast<std::uint64_t>(scored));
}

TEST_CASE("confusion is additive over regions") {
  std::mt19937 rng(12);
  std::vector<GtLabel> labels(60);
  std::vector<std::uint8_t> bits(60);
  for (int i = 0; i < 60; ++i) {
    labels[i] = static_cast<GtLabel>(rng() % 3);
    bits[i] = rng() % 2;
  }
  const Confusion whole = confusion(SkinMask(6, 10, bits), GroundTruth(6, 10, labels));
  Confusion parts = confusion(SkinMask(6, 5, {bits.begin(), bits.begin() + 30}),
                              GroundTruth(6, 5, {labels.begin(), labels.begin() + 30}));
  parts += confusion(SkinMask(6, 5, {bits.begin() + 30, bits.end()}),
                     GroundTruth(6, 5, {labels.begin() + 30, labels.end()}));
  CHECK(parts == whole);
}

TEST_CASE("metrics edge cases") {
  const Metrics zero = metrics({0, 5, 5, 5});
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f_score == 0.0);
  const Metrics empty = metrics({});
  CHECK(empty.f_score == 0.0);
  for (double x : {0.25, 0.5, 1.0}) CHECK(f_score(x, x) == doctest::Approx(x).epsilon(1e-15));
  CHECK(f_score(0.85, 0.71) == doctest::Approx(0.7737).epsilon(0.0001 / 0.7737));
  CHECK(f_score(0.0, 0.0) == 0.0);
}

TEST_CASE("kovac examples") {
  CHECK(kovac_daylight({150, 80, 60}));
  CHECK_FALSE(kovac_daylight({95, 80, 60}));
  CHECK_FALSE(kovac_daylight({150, 140, 60}));
  CHECK(kovac_flashlight({230, 220, 180}));
  CHECK_FALSE(kovac_flashlight({230, 214, 180}));
  CHECK_FALSE(kovac_flashlight({220, 220, 180}));
}

TEST_CASE("kovac rules at every boundary") {
  // Walk each channel across the interesting values with the others fixed.
  const int bases[][3] = {{150, 80, 60}, {96, 41, 21}, {230, 220, 180}, {221, 211, 171},
                          {120, 104, 21}, {200, 186, 150}};
  for (const auto& base : bases)
    for (int ch = 0; ch < 3; ++ch)
      for (int v = 0; v < 256; ++v) {
        int p[3] = {base[0], base[1], base[2]};
        p[ch] = v;
        const Rgb rgb{static_cast<std::uint8_t>(p[0]), static_cast<std::uint8_t>(p[1]),
                      static_cast<std::uint8_t>(p[2])};
        CHECK(kovac_daylight(rgb) == oracle::daylight(p[0], p[1], p[2]));
        CHECK(kovac_flashlight(rgb) == oracle::flashlight(p[0], p[1], p[2]));
      }
}

TEST_CASE("kovac mask") {
  const RgbImage img(2, 1, std::vector<Rgb>{{150, 80, 60}, {95, 80, 60}});
  CHECK(kovac_mask(img, BaselineRule::Daylight) == SkinMask(2, 1, std::vector<std::uint8_t>{1, 0}));
  CHECK(kovac_mask(RgbImage(3, 3, Rgb{230, 220, 180}), BaselineRule::Flashlight) == SkinMask(3, 3, 1));
}

TEST_CASE("lut classifier") {
  const Rgb a{200, 150, 120}, b{40, 40, 200};
  const std::vector<Rgb> one{a};
  const LutModel single = LutModel::train(one);
  CHECK(single.classify(a, 1.0));
  CHECK_FALSE(single.classify(b, 1e-9));
  CHECK(single.classify(b, 0.0));

  const std::vector<Rgb> aab{a, a, b};
  const LutModel lut = LutModel::train(aab);
  CHECK(lut.probability(a) == doctest::Approx(2.0 / 3.0));
  CHECK(lut.probability(b) == doctest::Approx(1.0 / 3.0));
  CHECK(lut.classify(a, 0.5));
  CHECK_FALSE(lut.classify(b, 0.5));
  // Same quantisation cell as a.
  CHECK(lut.count({207, 151, 127}) == 2);
  CHECK(lut.count({208, 151, 127}) == 0);

  CHECK_THROWS_AS(lut.classify(a, 1.5), Error);
  CHECK_THROWS_AS(lut.classify(a, -0.1), Error);
  CHECK_THROWS_AS(LutModel::train(std::vector<Rgb>{}), Error);
  CHECK_THROWS_AS(LutModel::train(one, 24), Error);
}

TEST_CASE("lut monotone in theta and persistent") {
  std::mt19937 rng(31);
  std::vector<Rgb> px(3000);
  for (auto& p : px)
    p = {static_cast<std::uint8_t>(150 + rng() % 80), static_cast<std::uint8_t>(90 + rng() % 60),
         static_cast<std::uint8_t>(70 + rng() % 60)};
  const LutModel lut = LutModel::train(px, 16);
  for (int i = 0; i < 2000; ++i) {
    const Rgb q{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                static_cast<std::uint8_t>(rng())};
    bool prev = true;
    for (double theta : {0.0, 1e-4, 1e-3, 5e-3, 2e-2, 0.5, 1.0}) {
      const bool now = lut.classify(q, theta);
      CHECK((!now || prev));
      prev = now;
    }
  }
  const LutModel back = LutModel::from_json(lut.to_json());
  CHECK(back.to_json() == lut.to_json());
  CHECK(back.bins_per_channel() == 16);
  const auto path = std::filesystem::temp_directory_path() / "skinseg_lut_test.json";
  lut.save(path.string());
  CHECK(LutModel::load(path.string()).total() == 3000);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(LutModel::from_json("[]"), Error);
}

TEST_CASE("metrics table") {
  MetricsTable t;
  t.add("a", {1, 1, 0, 1});
  t.add("b,c", {4, 0, 6, 0});
  CHECK(t.pooled() == Confusion{5, 1, 6, 1});
  const Metrics mean = t.mean_over_images();
  CHECK(mean.f_score == doctest::Approx(0.75));
  const std::string csv = t.to_csv();
  CHECK(csv ==
        "image,tp,fp,tn,fn,precision,recall,f_score\n"
        "a,1,1,0,1,0.500000,0.500000,0.500000\n"
        "\"b,c\",4,0,6,0,1.000000,1.000000,1.000000\n"
        "ALL_POOLED,5,1,6,1,0.833333,0.833333,0.833333\n"
        "ALL_MEAN,5,1,6,1,0.750000,0.750000,0.750000\n");
  CHECK(MetricsTable().mean_over_images().f_score == 0.0);
}
