#include "skinseg/evalkit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace skinseg {

GroundTruth load_ground_truth(const RgbImage& img) {
  struct Ref {
    Rgb color;
    GtLabel label;
  };
  static constexpr Ref kRefs[] = {
      {{255, 0, 0}, GtLabel::Skin},
      {{0, 0, 0}, GtLabel::NonSkin},
      {{0, 0, 255}, GtLabel::Ignore},
  };
  GroundTruth gt(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const Rgb p = img.at(x, y);
      double best = 0.0;
      const Ref* nearest = nullptr;
      for (const Ref& r : kRefs) {
        const double dr = p.r - r.color.r, dg = p.g - r.color.g, db = p.b - r.color.b;
        const double d = std::sqrt(dr * dr + dg * dg + db * db);
        if (!nearest || d < best) best = d, nearest = &r;
      }
      if (best > kGtTolerance) {
        throw Error(ErrorCode::MalformedGroundTruth,
                    "ground-truth pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                        ") = (" + std::to_string(p.r) + "," + std::to_string(p.g) + "," +
                        std::to_string(p.b) + ") matches no reference colour");
      }
      gt.at(x, y) = nearest->label;
    }
  return gt;
}

Confusion confusion(const SkinMask& mask, const GroundTruth& gt) {
  require_same_shape(mask, gt, "mask vs ground truth");
  Confusion c;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool m = mask[i] != 0;
    switch (gt[i]) {
      case GtLabel::Skin: (m ? c.tp : c.fn) += 1; break;
      case GtLabel::NonSkin: (m ? c.fp : c.tn) += 1; break;
      case GtLabel::Ignore: break;
    }
  }
  return c;
}

double f_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

Metrics metrics(const Confusion& c) {
  Metrics m;
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.f_score = f_score(m.precision, m.recall);
  return m;
}

bool kovac_daylight(Rgb p) {
  const int r = p.r, g = p.g, b = p.b;
  const int mx = std::max({r, g, b}), mn = std::min({r, g, b});
  return r > 95 && g > 40 && b > 20 && mx - mn > 15 && std::abs(r - g) > 15 && r > g &&
         r > b;
}

bool kovac_flashlight(Rgb p) {
  const int r = p.r, g = p.g, b = p.b;
  return r > 220 && g > 210 && b > 170 && std::abs(r - g) < 15 && r > g && r > b;
}

LutModel LutModel::train(std::span<const Rgb> skin_pixels, int bins_per_channel) {
  if (skin_pixels.empty())
    throw Error(ErrorCode::EmptyTraining, "no skin pixels to train the LUT on");
  if (bins_per_channel < 1 || bins_per_channel > 256 ||
      !std::has_single_bit(static_cast<unsigned>(bins_per_channel)))
    throw Error(ErrorCode::InvalidArgument, "LUT bins must be a power of two <= 256");
  LutModel m;
  m.bins_ = bins_per_channel;
  m.shift_ = std::countr_zero(256u / static_cast<unsigned>(bins_per_channel));
  m.counts_.assign(static_cast<std::size_t>(m.bins_) * m.bins_ * m.bins_, 0);
  for (const Rgb& p : skin_pixels) ++m.counts_[m.cell(p)];
  m.total_ = skin_pixels.size();
  return m;
}

std::size_t LutModel::cell(Rgb p) const {
  const std::size_t r = p.r >> shift_, g = p.g >> shift_, b = p.b >> shift_;
  return (r * bins_ + g) * bins_ + b;
}

double LutModel::probability(Rgb p) const {
  return static_cast<double>(counts_[cell(p)]) / static_cast<double>(total_);
}

bool LutModel::classify(Rgb p, double theta) const {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "LUT theta must lie in [0, 1]");
  return probability(p) >= theta;
}

std::string LutModel::to_json() const {
  nlohmann::json doc = {
      {"format", kFormat}, {"version", kVersion}, {"bins", bins_},
      {"total", total_},   {"counts", counts_},
  };
  return doc.dump() + "\n";
}

LutModel LutModel::from_json(std::string_view text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    if (doc.value("format", "") != kFormat)
      throw Error(ErrorCode::ModelMalformed, "not a LUT document");
    if (doc.value("version", "") != kVersion)
      throw Error(ErrorCode::ModelVersion, "unsupported LUT version");
    LutModel m;
    m.bins_ = doc.at("bins").get<int>();
    if (m.bins_ < 1 || m.bins_ > 256 || !std::has_single_bit(static_cast<unsigned>(m.bins_)))
      throw Error(ErrorCode::ModelMalformed, "LUT bins must be a power of two <= 256");
    m.shift_ = std::countr_zero(256u / static_cast<unsigned>(m.bins_));
    m.counts_ = doc.at("counts").get<std::vector<std::uint64_t>>();
    m.total_ = doc.at("total").get<std::uint64_t>();
    if (m.counts_.size() != static_cast<std::size_t>(m.bins_) * m.bins_ * m.bins_)
      throw Error(ErrorCode::ModelMalformed, "LUT count grid has the wrong size");
    std::uint64_t sum = 0;
    for (auto v : m.counts_) sum += v;
    if (sum != m.total_ || m.total_ == 0)
      throw Error(ErrorCode::ModelMalformed, "LUT counts do not sum to total");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ModelMalformed, std::string("malformed LUT: ") + e.what());
  }
}

void LutModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << to_json();
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

LutModel LutModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

SkinMask kovac_mask(const RgbImage& img, BaselineRule rule) {
  SkinMask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    out[i] = (rule == BaselineRule::Daylight ? kovac_daylight(img[i])
                                             : kovac_flashlight(img[i]))
                 ? 1
                 : 0;
  return out;
}

SkinMask lut_mask(const RgbImage& img, const LutModel& lut, double theta) {
  SkinMask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = lut.classify(img[i], theta) ? 1 : 0;
  return out;
}

void MetricsTable::add(std::string image_id, const Confusion& c) {
  rows_.push_back({std::move(image_id), c});
}

Confusion MetricsTable::pooled() const {
  Confusion total;
  for (const auto& r : rows_) total += r.c;
  return total;
}

Metrics MetricsTable::mean_over_images() const {
  Metrics m;
  if (rows_.empty()) return m;
  for (const auto& r : rows_) {
    const Metrics x = metrics(r.c);
    m.precision += x.precision;
    m.recall += x.recall;
    m.f_score += x.f_score;
  }
  const double n = static_cast<double>(rows_.size());
  m.precision /= n;
  m.recall /= n;
  m.f_score /= n;
  return m;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string MetricsTable::to_csv() const {
  std::string out = "image,tp,fp,tn,fn,precision,recall,f_score\n";
  auto line = [&out](const std::string& id, const Confusion& c, const Metrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf, ",%llu,%llu,%llu,%llu,%.6f,%.6f,%.6f\n",
                  static_cast<unsigned long long>(c.tp), static_cast<unsigned long long>(c.fp),
                  static_cast<unsigned long long>(c.tn), static_cast<unsigned long long>(c.fn),
                  m.precision, m.recall, m.f_score);
    out += csv_field(id);
    out += buf;
  };
  for (const auto& r : rows_) line(r.id, r.c, metrics(r.c));
  const Confusion total = pooled();
  line("ALL_POOLED", total, metrics(total));
  line("ALL_MEAN", total, mean_over_images());
  return out;
}

}  // namespace skinseg
