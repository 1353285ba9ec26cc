#include "skinseg/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace skinseg {
namespace {

// Unit-step direction of a ray: per step the dominant axis moves by one and
// the minor axis by `slope` (rounded at each step).
struct RayDirection {
  bool x_major = true;
  int major_sign = 1;
  double minor_per_step = 0.0;  // signed, in image (y-down) coordinates
};

RayDirection direction(int angle_degrees) {
  const int a = ((angle_degrees % 360) + 360) % 360;
  RayDirection d;
  if (a % 45 == 0) {
    // Exact unit slopes for the axis and diagonal directions.
    static constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    const int dx = kDx[a / 45], dy = kDy[a / 45];
    if (dx != 0) {
      d.x_major = true;
      d.major_sign = dx;
      d.minor_per_step = dy;
    } else {
      d.x_major = false;
      d.major_sign = dy;
      d.minor_per_step = 0.0;
    }
    return d;
  }
  const double rad = a * M_PI / 180.0;
  const double c = std::cos(rad), s = -std::sin(rad);  // y down
  if (std::abs(c) >= std::abs(s)) {
    d.x_major = true;
    d.major_sign = c > 0 ? 1 : -1;
    d.minor_per_step = s / std::abs(c);
  } else {
    d.x_major = false;
    d.major_sign = s > 0 ? 1 : -1;
    d.minor_per_step = c / std::abs(s);
  }
  return d;
}

PixelCoord step_offset(const RayDirection& d, int i) {
  const int major = d.major_sign * i;
  const int minor = static_cast<int>(std::round(d.minor_per_step * i));
  return d.x_major ? PixelCoord{major, minor} : PixelCoord{minor, major};
}

// Offsets for all 36 rays, long enough to cross the image.
struct RayTable {
  std::array<std::vector<PixelCoord>, kRayCount> offsets;

  RayTable(int width, int height, int max_len) {
    int steps = std::max(width, height);
    if (max_len > 0) steps = std::min(steps, max_len);
    for (int r = 0; r < kRayCount; ++r) {
      const RayDirection d = direction(r * kRayStepDegrees);
      offsets[r].reserve(steps);
      for (int i = 1; i <= steps; ++i) offsets[r].push_back(step_offset(d, i));
    }
  }
};

void check_inputs(const SkinMask& seed, const TernaryImage& t,
                  const ChannelClassMaps& classes, const EdgeMap& edges,
                  const DiffusionConfig& cfg) {
  require_same_shape(seed, t, "seed vs ternary image");
  require_same_shape(seed, edges, "seed vs edge map");
  for (const auto& m : classes.maps) require_same_shape(seed, m, "seed vs class map");
  if (classes.maps.size() != classes.channels.size())
    throw Error(ErrorCode::DimensionMismatch, "class maps do not match channel list");
  if (classes.k < 2) throw Error(ErrorCode::InvalidArgument, "class count must be >= 2");
  cfg.validate(classes.channels.size());
}

class Diffuser {
 public:
  Diffuser(const TernaryImage& t, const ChannelClassMaps& classes,
           const EdgeMap& edges, const DiffusionConfig& cfg)
      : t_(t), edges_(edges), cfg_(cfg), rays_(t.width(), t.height(), cfg.max_ray_len),
        channels_(classes.channels.size()) {
    const std::size_t n = t.size();
    labels_.resize(n * channels_);
    for (std::size_t c = 0; c < channels_; ++c)
      for (std::size_t i = 0; i < n; ++i) labels_[i * channels_ + c] = classes.maps[c][i];
    // agreement_[c * k + d]: weighted agreement term for a label gap of d.
    k_ = classes.k;
    agreement_.resize(channels_ * k_);
    for (std::size_t c = 0; c < channels_; ++c)
      for (int d = 0; d < k_; ++d)
        agreement_[c * k_ + d] = cfg.channel_weights[c] *
                                 std::max(0.0, 1.0 - std::abs(d) / static_cast<double>(k_ - 1));
  }

  // Stage one when `snapshot` is null: rays continue through the live mask
  // and every pixel the scan meets in the live mask is an origin.
  void run(SkinMask& working, const SkinMask* snapshot) const {
    const int w = t_.width(), h = t_.height();
    const SkinMask& passable = snapshot ? *snapshot : working;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t o = t_.index(x, y);
        if (!(snapshot ? (*snapshot)[o] : working[o])) continue;
        for (const auto& ray : rays_.offsets) cast(working, passable, x, y, o, ray);
      }
  }

 private:
  void cast(SkinMask& working, const SkinMask& passable, int x, int y,
            std::size_t origin, const std::vector<PixelCoord>& ray) const {
    const int w = t_.width(), h = t_.height();
    const std::uint8_t* master = &labels_[origin * channels_];
    for (const PixelCoord& off : ray) {
      const int px = x + off.x, py = y + off.y;
      if (px < 0 || py < 0 || px >= w || py >= h) return;
      const std::size_t q = static_cast<std::size_t>(py) * w + px;
      if (passable[q]) continue;
      if (edges_[q]) return;
      if (score(master, q) < cfg_.s_min) return;
      working[q] = 1;
    }
  }

  double score(const std::uint8_t* master, std::size_t q) const {
    double s = t_[q] == Ternary::Black ? cfg_.w_black : cfg_.w_gray;
    const std::uint8_t* utp = &labels_[q * channels_];
    for (std::size_t c = 0; c < channels_; ++c) {
      const int d = std::min(std::abs(master[c] - utp[c]), k_ - 1);
      s += agreement_[c * k_ + d];
    }
    return s;
  }

  const TernaryImage& t_;
  const EdgeMap& edges_;
  const DiffusionConfig& cfg_;
  RayTable rays_;
  std::size_t channels_;
  int k_ = 3;
  std::vector<std::uint8_t> labels_;
  std::vector<double> agreement_;
};

SkinMask normalized(const SkinMask& m) {
  SkinMask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 1 : 0;
  return out;
}

}  // namespace

void DiffusionConfig::validate(std::size_t channel_count) const {
  if (channel_weights.size() != channel_count)
    throw Error(ErrorCode::DimensionMismatch,
                "diffusion channel weights do not match the channel list");
  if (w_gray < 0.0 || w_black < 0.0)
    throw Error(ErrorCode::InvalidArgument, "diffusion weights must be >= 0");
  for (double v : channel_weights)
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "diffusion weights must be >= 0");
  if (max_ray_len < 0)
    throw Error(ErrorCode::InvalidArgument, "max ray length must be >= 0");
}

std::vector<double> default_channel_weights(std::span<const ChannelId> channels) {
  std::vector<double> w;
  for (ChannelId c : channels)
    w.push_back(c == ChannelId::Cb || c == ChannelId::Cr ? 2.0 : 1.0);
  return w;
}

std::vector<PixelCoord> ray_pixels(PixelCoord origin, int angle_degrees, int width,
                                   int height, int max_len) {
  if (origin.x < 0 || origin.y < 0 || origin.x >= width || origin.y >= height)
    throw Error(ErrorCode::InvalidArgument, "ray origin outside the image");
  const RayDirection d = direction(angle_degrees);
  std::vector<PixelCoord> out;
  for (int i = 1; max_len == 0 || i <= max_len; ++i) {
    const PixelCoord off = step_offset(d, i);
    const PixelCoord p{origin.x + off.x, origin.y + off.y};
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) break;
    out.push_back(p);
  }
  return out;
}

double diffusion_score(Ternary utp, std::span<const std::uint8_t> master_labels,
                       std::span<const std::uint8_t> utp_labels, int k,
                       const DiffusionConfig& cfg) {
  if (master_labels.size() != utp_labels.size() ||
      master_labels.size() != cfg.channel_weights.size())
    throw Error(ErrorCode::DimensionMismatch, "label vectors and weights differ in length");
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "class count must be >= 2");
  double s = utp == Ternary::Black ? cfg.w_black : cfg.w_gray;
  for (std::size_t c = 0; c < master_labels.size(); ++c) {
    const int d = std::min(std::abs(master_labels[c] - utp_labels[c]), k - 1);
    s += cfg.channel_weights[c] *
         std::max(0.0, 1.0 - std::abs(d) / static_cast<double>(k - 1));
  }
  return s;
}

SkinMask diffuse_stage(const SkinMask& seed, const TernaryImage& t,
                       const ChannelClassMaps& classes, const EdgeMap& edges,
                       const DiffusionConfig& cfg, DiffusionStage stage) {
  if (stage == DiffusionStage::Second)
    return diffuse_from_origins(seed, seed, t, classes, edges, cfg);
  check_inputs(seed, t, classes, edges, cfg);
  SkinMask working = normalized(seed);
  Diffuser(t, classes, edges, cfg).run(working, nullptr);
  return working;
}

SkinMask diffuse_from_origins(const SkinMask& origins, const SkinMask& initial,
                              const TernaryImage& t, const ChannelClassMaps& classes,
                              const EdgeMap& edges, const DiffusionConfig& cfg) {
  check_inputs(origins, t, classes, edges, cfg);
  require_same_shape(origins, initial, "origin snapshot vs initial mask");
  const SkinMask snapshot = normalized(origins);
  SkinMask working = normalized(initial);
  for (std::size_t i = 0; i < working.size(); ++i) working[i] |= snapshot[i];
  Diffuser(t, classes, edges, cfg).run(working, &snapshot);
  return working;
}

DiffusionResult diffuse_both(const SkinMask& seed, const TernaryImage& t,
                             const ChannelClassMaps& classes, const EdgeMap& edges,
                             const DiffusionConfig& cfg) {
  DiffusionResult r;
  r.stage1 = diffuse_stage(seed, t, classes, edges, cfg, DiffusionStage::First);
  r.final_mask = diffuse_stage(r.stage1, t, classes, edges, cfg, DiffusionStage::Second);
  return r;
}

SkinMask diffuse(const SkinMask& seed, const TernaryImage& t,
                 const ChannelClassMaps& classes, const EdgeMap& edges,
                 const DiffusionConfig& cfg) {
  return diffuse_both(seed, t, classes, edges, cfg).final_mask;
}

}  // namespace skinseg
