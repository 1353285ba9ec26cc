#include "skinseg/skinmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace skinseg {
namespace {

constexpr int kSide = DensityMap::kSide;

std::int64_t cross(BinPoint o, BinPoint a, BinPoint b) {
  return static_cast<std::int64_t>(a.row - o.row) * (b.col - o.col) -
         static_cast<std::int64_t>(a.col - o.col) * (b.row - o.row);
}

bool on_segment(BinPoint a, BinPoint b, BinPoint p) {
  return cross(a, b, p) == 0 && p.row >= std::min(a.row, b.row) &&
         p.row <= std::max(a.row, b.row) && p.col >= std::min(a.col, b.col) &&
         p.col <= std::max(a.col, b.col);
}

Polygon degenerate_square(std::span<const BinPoint> points) {
  double sr = 0.0, sc = 0.0;
  for (const auto& p : points) {
    sr += p.row;
    sc += p.col;
  }
  const int cr = static_cast<int>(std::round(sr / points.size()));
  const int cc = static_cast<int>(std::round(sc / points.size()));
  const int r0 = std::max(cr - 1, 0), r1 = std::min(cr + 1, kSide - 1);
  const int c0 = std::max(cc - 1, 0), c1 = std::min(cc + 1, kSide - 1);
  return Polygon{{{r0, c0}, {r1, c0}, {r1, c1}, {r0, c1}}};
}

Polygon hull_or_square(std::vector<BinPoint> points) {
  std::vector<BinPoint> hull = convex_hull(points);
  if (hull.size() >= 3) return Polygon{std::move(hull)};
  return degenerate_square(points);
}

std::vector<std::uint8_t> membership_grid(const PolygonPair& pair) {
  std::vector<std::uint8_t> grid(kSide * kSide, 0);
  for (int r = 0; r < kSide; ++r)
    for (int c = 0; c < kSide; ++c) {
      const BinPoint p{r, c};
      if (point_in_polygon(pair.inner, p))
        grid[r * kSide + c] = 2;
      else if (point_in_polygon(pair.outer, p))
        grid[r * kSide + c] = 1;
    }
  return grid;
}

void validate_params(const TrainParams& p) {
  if (!(p.tau_in > 0.0 && p.tau_in <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "tau_in must lie in (0, 1]");
  if (!(p.tau_out >= 0.0 && p.tau_out <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "tau_out must lie in [0, 1]");
}

void validate_polygon(const Polygon& poly, const char* what) {
  if (poly.vertices.size() < 3)
    throw Error(ErrorCode::ModelMalformed,
                std::string(what) + " polygon needs at least 3 vertices");
  for (const auto& v : poly.vertices)
    if (v.row < 0 || v.row >= kSide || v.col < 0 || v.col >= kSide)
      throw Error(ErrorCode::ModelMalformed,
                  std::string(what) + " polygon vertex outside [0,255]");
}

}  // namespace

std::string_view plane_name(PlaneId id) {
  switch (id) {
    case PlaneId::YCb: return "YCb";
    case PlaneId::YCr: return "YCr";
    case PlaneId::CbCr: return "CbCr";
  }
  return "?";
}

BinPoint project(PlaneId plane, YCbCr c) {
  switch (plane) {
    case PlaneId::YCb: return {c.y, c.cb};
    case PlaneId::YCr: return {c.y, c.cr};
    case PlaneId::CbCr: return {c.cb, c.cr};
  }
  return {};
}

DensityMaps accumulate_density(std::span<const YCbCr> skin_pixels) {
  if (skin_pixels.empty())
    throw Error(ErrorCode::EmptyTraining, "no skin pixels to train on");
  DensityMaps maps;
  for (PlaneId id : kPlanes) {
    DensityMap& m = maps[static_cast<std::size_t>(id)];
    m.plane = id;
    for (const YCbCr& c : skin_pixels) {
      const BinPoint p = project(id, c);
      ++m.at(p.row, p.col);
    }
    m.total = skin_pixels.size();
  }
  return maps;
}

std::vector<BinPoint> convex_hull(std::vector<BinPoint> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<BinPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  // Collinear input collapses to its two end points.
  hull.resize(k - 1);
  return hull;
}

bool point_in_polygon(const Polygon& poly, BinPoint p) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(v[j], v[i], p)) return true;
    if ((v[i].col > p.col) != (v[j].col > p.col)) {
      // Row coordinate where the edge crosses the line col = p.col.
      const std::int64_t num = static_cast<std::int64_t>(v[j].row - v[i].row) *
                               (p.col - v[i].col);
      const std::int64_t den = v[j].col - v[i].col;
      const std::int64_t lhs = static_cast<std::int64_t>(p.row - v[i].row) * den;
      if (den > 0 ? lhs < num : lhs > num) inside = !inside;
    }
  }
  return inside;
}

PolygonPair estimate_polygons(const DensityMap& map, const TrainParams& params) {
  validate_params(params);
  if (map.total == 0)
    throw Error(ErrorCode::EmptyTraining, "density map is empty");

  // With smoothing each score is the 3x3 neighbourhood sum, i.e. nine times
  // the box-filtered density.
  std::vector<std::uint64_t> score(kSide * kSide, 0);
  const double scale = params.smoothing ? 9.0 : 1.0;
  for (int r = 0; r < kSide; ++r)
    for (int c = 0; c < kSide; ++c) {
      if (!params.smoothing) {
        score[r * kSide + c] = map.at(r, c);
        continue;
      }
      std::uint64_t s = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr >= 0 && rr < kSide && cc >= 0 && cc < kSide) s += map.at(rr, cc);
        }
      score[r * kSide + c] = s;
    }

  const std::uint64_t peak = *std::max_element(score.begin(), score.end());
  const double inner_cut = params.tau_in * static_cast<double>(peak);
  const double outer_cut =
      scale * std::max(1.0, params.tau_out * static_cast<double>(map.total));

  std::vector<BinPoint> inner_pts, outer_pts;
  for (int r = 0; r < kSide; ++r)
    for (int c = 0; c < kSide; ++c) {
      const auto s = static_cast<double>(score[r * kSide + c]);
      if (s == 0.0) continue;
      if (s >= inner_cut) inner_pts.push_back({r, c});
      if (s >= outer_cut) outer_pts.push_back({r, c});
    }

  PolygonPair pair;
  pair.inner = hull_or_square(std::move(inner_pts));
  // The outer hull always encloses the inner polygon, which keeps the pair
  // nested even when the inner set fell back to a square.
  outer_pts.insert(outer_pts.end(), pair.inner.vertices.begin(),
                   pair.inner.vertices.end());
  pair.outer = hull_or_square(std::move(outer_pts));
  return pair;
}

SkinClusterModel::SkinClusterModel(std::array<PolygonPair, 3> planes,
                                   TrainParams params)
    : planes_(std::move(planes)), params_(params) {
  for (std::size_t i = 0; i < planes_.size(); ++i) {
    validate_polygon(planes_[i].inner, "inner");
    validate_polygon(planes_[i].outer, "outer");
    for (const auto& v : planes_[i].inner.vertices)
      if (!point_in_polygon(planes_[i].outer, v))
        throw Error(ErrorCode::ModelMalformed,
                    "inner polygon of plane " +
                        std::string(plane_name(kPlanes[i])) +
                        " is not nested in its outer polygon");
    membership_[i] = membership_grid(planes_[i]);
  }
}

SkinClusterModel SkinClusterModel::train(std::span<const YCbCr> skin_pixels,
                                         const TrainParams& params) {
  validate_params(params);
  const DensityMaps maps = accumulate_density(skin_pixels);
  std::array<PolygonPair, 3> planes;
  for (std::size_t i = 0; i < maps.size(); ++i)
    planes[i] = estimate_polygons(maps[i], params);
  return SkinClusterModel(std::move(planes), params);
}

TernaryClass SkinClusterModel::classify(YCbCr c) const {
  std::uint8_t level = 2;
  for (PlaneId id : kPlanes) {
    const BinPoint p = project(id, c);
    level = std::min(level,
                     membership_[static_cast<std::size_t>(id)][p.row * kSide + p.col]);
  }
  return level == 2 ? TernaryClass::T1 : level == 1 ? TernaryClass::T2
                                                    : TernaryClass::T3;
}

TernaryClass classify_pixel(const SkinClusterModel& model, YCbCr c) {
  return model.classify(c);
}

std::string SkinClusterModel::to_json() const {
  using nlohmann::json;
  auto vertices = [](const Polygon& poly) {
    json arr = json::array();
    for (const auto& v : poly.vertices) arr.push_back({v.row, v.col});
    return arr;
  };
  json planes = json::object();
  for (PlaneId id : kPlanes) {
    const PolygonPair& pair = plane(id);
    planes[std::string(plane_name(id))] = {{"inner", vertices(pair.inner)},
                                           {"outer", vertices(pair.outer)}};
  }
  json doc = {
      {"format", kFormat},
      {"version", kVersion},
      {"train_params",
       {{"tau_in", params_.tau_in},
        {"tau_out", params_.tau_out},
        {"smoothing", params_.smoothing}}},
      {"planes", planes},
  };
  return doc.dump(2) + "\n";
}

SkinClusterModel SkinClusterModel::from_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ModelMalformed, std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormat)
      throw Error(ErrorCode::ModelMalformed, "not a skin cluster model document");
    if (!doc.contains("version") || !doc["version"].is_string())
      throw Error(ErrorCode::ModelMalformed, "model version tag missing");
    const std::string version = doc["version"].get<std::string>();
    if (version != kVersion)
      throw Error(ErrorCode::ModelVersion, "unsupported model version '" + version + "'");

    TrainParams params;
    const json& tp = doc.at("train_params");
    params.tau_in = tp.at("tau_in").get<double>();
    params.tau_out = tp.at("tau_out").get<double>();
    params.smoothing = tp.at("smoothing").get<bool>();
    try {
      validate_params(params);
    } catch (const Error& e) {
      throw Error(ErrorCode::ModelMalformed, e.what());
    }

    const json& planes_doc = doc.at("planes");
    if (!planes_doc.is_object())
      throw Error(ErrorCode::ModelMalformed, "planes must be an object");
    auto polygon = [](const json& arr) {
      Polygon poly;
      for (const auto& v : arr) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
            !v[1].is_number_integer())
          throw Error(ErrorCode::ModelMalformed, "vertex must be an integer pair");
        poly.vertices.push_back({v[0].get<int>(), v[1].get<int>()});
      }
      return poly;
    };
    std::array<PolygonPair, 3> planes;
    for (PlaneId id : kPlanes) {
      const std::string name(plane_name(id));
      if (!planes_doc.contains(name))
        throw Error(ErrorCode::ModelMissingPlane, "model lacks plane " + name);
      const json& p = planes_doc[name];
      planes[static_cast<std::size_t>(id)] = {polygon(p.at("inner")),
                                              polygon(p.at("outer"))};
    }
    return SkinClusterModel(std::move(planes), params);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ModelMalformed, std::string("malformed model: ") + e.what());
  }
}

void SkinClusterModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << to_json();
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

SkinClusterModel SkinClusterModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace skinseg
