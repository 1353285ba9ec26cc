#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skinseg/colorspace.hpp"

namespace skinseg {

// The three chrominance planes of the cluster model. The first named
// component indexes rows (first point coordinate), the second columns.
enum class PlaneId : std::uint8_t { YCb = 0, YCr = 1, CbCr = 2 };

inline constexpr std::array<PlaneId, 3> kPlanes = {PlaneId::YCb, PlaneId::YCr,
                                                   PlaneId::CbCr};

std::string_view plane_name(PlaneId id);

struct BinPoint {
  int row = 0;
  int col = 0;

  friend bool operator==(const BinPoint&, const BinPoint&) = default;
  friend auto operator<=>(const BinPoint&, const BinPoint&) = default;
};

/// Projects a YCbCr triplet onto a plane's (row, col) bin.
BinPoint project(PlaneId plane, YCbCr c);

struct DensityMap {
  static constexpr int kSide = 256;

  PlaneId plane = PlaneId::YCb;
  std::vector<std::uint64_t> bins = std::vector<std::uint64_t>(kSide * kSide, 0);
  std::uint64_t total = 0;

  std::uint64_t at(int row, int col) const { return bins[row * kSide + col]; }
  std::uint64_t& at(int row, int col) { return bins[row * kSide + col]; }
};

using DensityMaps = std::array<DensityMap, 3>;

DensityMaps accumulate_density(std::span<const YCbCr> skin_pixels);

/// Convex polygon in bin coordinates, counter-clockwise (row as x, col as
/// y), starting at its lexicographically smallest vertex.
struct Polygon {
  std::vector<BinPoint> vertices;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct PolygonPair {
  Polygon inner;
  Polygon outer;

  friend bool operator==(const PolygonPair&, const PolygonPair&) = default;
};

struct TrainParams {
  double tau_in = 0.05;   // fraction of the (smoothed) peak density
  double tau_out = 1e-6;  // fraction of the total mass, floored at one count
  bool smoothing = true;  // 3x3 box filter before thresholding

  friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

/// Convex hull by monotone chain. Collinear points on edges are dropped.
/// Returns fewer than three vertices when the input has no three
/// non-collinear points.
std::vector<BinPoint> convex_hull(std::vector<BinPoint> points);

/// Inclusive: boundary points count as inside.
bool point_in_polygon(const Polygon& poly, BinPoint p);

PolygonPair estimate_polygons(const DensityMap& map, const TrainParams& params);

enum class TernaryClass : std::uint8_t { T1, T2, T3 };

class SkinClusterModel {
 public:
  static constexpr std::string_view kFormat = "skinseg-cluster-model";
  static constexpr std::string_view kVersion = "1";

  SkinClusterModel(std::array<PolygonPair, 3> planes, TrainParams params);

  static SkinClusterModel train(std::span<const YCbCr> skin_pixels,
                                const TrainParams& params);

  const PolygonPair& plane(PlaneId id) const {
    return planes_[static_cast<std::size_t>(id)];
  }
  const TrainParams& train_params() const { return params_; }

  TernaryClass classify(YCbCr c) const;

  std::string to_json() const;
  static SkinClusterModel from_json(std::string_view text);

  void save(const std::string& path) const;
  static SkinClusterModel load(const std::string& path);

  friend bool operator==(const SkinClusterModel& a, const SkinClusterModel& b) {
    return a.planes_ == b.planes_ && a.params_ == b.params_;
  }

 private:
  std::array<PolygonPair, 3> planes_;
  TrainParams params_;
  // Per plane, 256x256 membership: 0 outside, 1 outer only, 2 inner.
  std::array<std::vector<std::uint8_t>, 3> membership_;
};

TernaryClass classify_pixel(const SkinClusterModel& model, YCbCr c);

}  // namespace skinseg
