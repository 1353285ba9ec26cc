#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skinseg/image.hpp"

namespace skinseg {

enum class GtLabel : std::uint8_t { Skin, NonSkin, Ignore };
using GroundTruth = Grid<GtLabel>;

/// Largest RGB distance at which an annotation pixel still snaps to a
/// reference colour.
inline constexpr double kGtTolerance = 100.0;

/// Red = skin, black = non-skin, blue = ignore; nearest colour wins.
GroundTruth load_ground_truth(const RgbImage& img);

struct Confusion {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp, fp += o.fp, tn += o.tn, fn += o.fn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

Confusion confusion(const SkinMask& mask, const GroundTruth& gt);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

/// Divisions by zero yield 0.
Metrics metrics(const Confusion& c);
double f_score(double precision, double recall);

bool kovac_daylight(Rgb p);
bool kovac_flashlight(Rgb p);

// Skin-occurrence histogram over quantised RGB.
class LutModel {
 public:
  static constexpr std::string_view kFormat = "skinseg-lut";
  static constexpr std::string_view kVersion = "1";

  static LutModel train(std::span<const Rgb> skin_pixels, int bins_per_channel = 32);

  int bins_per_channel() const { return bins_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(Rgb p) const { return counts_[cell(p)]; }
  double probability(Rgb p) const;

  /// True iff the pixel's cell probability is at least theta (0 <= theta <= 1).
  bool classify(Rgb p, double theta) const;

  std::string to_json() const;
  static LutModel from_json(std::string_view text);
  void save(const std::string& path) const;
  static LutModel load(const std::string& path);

 private:
  std::size_t cell(Rgb p) const;

  int bins_ = 32;
  int shift_ = 3;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

enum class BaselineRule { Daylight, Flashlight };

SkinMask kovac_mask(const RgbImage& img, BaselineRule rule);
SkinMask lut_mask(const RgbImage& img, const LutModel& lut, double theta);

// Per-image rows plus the two corpus aggregates: confusions summed over all
// pixels, and metrics averaged over images.
class MetricsTable {
 public:
  void add(std::string image_id, const Confusion& c);

  std::size_t size() const { return rows_.size(); }
  Confusion pooled() const;
  Metrics mean_over_images() const;

  /// Header: image,tp,fp,tn,fn,precision,recall,f_score
  std::string to_csv() const;

 private:
  struct Row {
    std::string id;
    Confusion c;
  };
  std::vector<Row> rows_;
};

}  // namespace skinseg
