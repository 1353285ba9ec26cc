#include "skinseg/colorspace.hpp"

#include <algorithm>
#include <cmath>

namespace skinseg {
namespace {

constexpr std::array<ChannelId, kChannelCount> kAll = {
    ChannelId::Y,  ChannelId::Cb, ChannelId::Cr, ChannelId::H,  ChannelId::S,
    ChannelId::V,  ChannelId::I,  ChannelId::Q,  ChannelId::X,  ChannelId::Xy,
    ChannelId::Z,  ChannelId::C,  ChannelId::M,  ChannelId::Ye, ChannelId::K,
    ChannelId::L,  ChannelId::U,  ChannelId::Vv, ChannelId::La, ChannelId::A,
    ChannelId::B,  ChannelId::Ch, ChannelId::Hh,
};

constexpr std::array<std::string_view, kChannelCount> kNames = {
    "Y", "Cb", "Cr", "H", "S", "V", "I", "Q", "X", "Xy", "Z", "C",
    "M", "Ye", "K", "L", "U", "Vv", "La", "A", "B", "Ch", "Hh",
};

// sRGB primaries, D65 white.
constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
constexpr double kWhiteX = kM[0][0] + kM[0][1] + kM[0][2];
constexpr double kWhiteY = kM[1][0] + kM[1][1] + kM[1][2];
constexpr double kWhiteZ = kM[2][0] + kM[2][1] + kM[2][2];

// YIQ extremes: the positive coefficients of each row summed, times 255.
constexpr double kIMax = 0.596 * 255.0;
constexpr double kQMax = 0.523 * 255.0;

// Luv chroma ranges (same spans as the common 8-bit Luv encoding).
constexpr double kUMin = -134.0, kUSpan = 354.0;
constexpr double kVMin = -140.0, kVSpan = 262.0;

struct Xyz {
  double x, y, z;
};

double srgb_to_linear(std::uint8_t c) {
  const double v = c / 255.0;
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

Xyz rgb_to_xyz(Rgb p) {
  const double r = srgb_to_linear(p.r);
  const double g = srgb_to_linear(p.g);
  const double b = srgb_to_linear(p.b);
  return {kM[0][0] * r + kM[0][1] * g + kM[0][2] * b,
          kM[1][0] * r + kM[1][1] * g + kM[1][2] * b,
          kM[2][0] * r + kM[2][1] * g + kM[2][2] * b};
}

double lab_f(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
}

// Degrees in [0, 360) onto [0, 255].
double hue_scale(double degrees) { return degrees / 360.0 * 255.0; }

double hsv_hue(Rgb p) {
  const int mx = std::max({p.r, p.g, p.b});
  const int mn = std::min({p.r, p.g, p.b});
  const double d = mx - mn;
  if (d == 0) return 0.0;
  double h;
  if (mx == p.r)
    h = 60.0 * std::fmod((p.g - p.b) / d + 6.0, 6.0);
  else if (mx == p.g)
    h = 60.0 * ((p.b - p.r) / d + 2.0);
  else
    h = 60.0 * ((p.r - p.g) / d + 4.0);
  return h >= 360.0 ? h - 360.0 : h;
}

}  // namespace

std::string_view channel_name(ChannelId id) {
  return kNames[static_cast<std::size_t>(id)];
}

std::optional<ChannelId> parse_channel(std::string_view name) {
  for (std::size_t i = 0; i < kChannelCount; ++i)
    if (kNames[i] == name) return kAll[i];
  return std::nullopt;
}

const std::array<ChannelId, kChannelCount>& all_channels() { return kAll; }

std::uint8_t to_byte(double v) {
  const double r = std::round(v);
  if (!(r > 0.0)) return 0;  // also maps NaN to 0
  if (r > 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

YCbCr rgb_to_ycbcr(Rgb p) {
  const double r = p.r, g = p.g, b = p.b;
  return {to_byte(0.299 * r + 0.587 * g + 0.114 * b),
          to_byte(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b),
          to_byte(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b)};
}

Lab rgb_to_lab(Rgb p) {
  const Xyz c = rgb_to_xyz(p);
  const double fx = lab_f(c.x / kWhiteX);
  const double fy = lab_f(c.y / kWhiteY);
  const double fz = lab_f(c.z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double channel_raw(Rgb p, ChannelId id) {
  const double r = p.r, g = p.g, b = p.b;
  switch (id) {
    case ChannelId::Y: return 0.299 * r + 0.587 * g + 0.114 * b;
    case ChannelId::Cb: return 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    case ChannelId::Cr: return 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;

    case ChannelId::H: return hue_scale(hsv_hue(p));
    case ChannelId::S: {
      const int mx = std::max({p.r, p.g, p.b});
      const int mn = std::min({p.r, p.g, p.b});
      return mx == 0 ? 0.0 : 255.0 * (mx - mn) / mx;
    }
    case ChannelId::V: return std::max({r, g, b});

    case ChannelId::I: {
      const double i = 0.596 * r - 0.274 * g - 0.322 * b;
      return (i + kIMax) / (2.0 * kIMax) * 255.0;
    }
    case ChannelId::Q: {
      const double q = 0.211 * r - 0.523 * g + 0.312 * b;
      return (q + kQMax) / (2.0 * kQMax) * 255.0;
    }

    case ChannelId::X: return rgb_to_xyz(p).x / kWhiteX * 255.0;
    case ChannelId::Xy: return rgb_to_xyz(p).y / kWhiteY * 255.0;
    case ChannelId::Z: return rgb_to_xyz(p).z / kWhiteZ * 255.0;

    case ChannelId::C:
    case ChannelId::M:
    case ChannelId::Ye:
    case ChannelId::K: {
      const double mx = std::max({r, g, b}) / 255.0;
      const double k = 1.0 - mx;
      if (id == ChannelId::K) return k * 255.0;
      if (mx == 0.0) return 0.0;
      const double v = id == ChannelId::C ? r : id == ChannelId::M ? g : b;
      return (1.0 - v / 255.0 - k) / (1.0 - k) * 255.0;
    }

    case ChannelId::L:
    case ChannelId::U:
    case ChannelId::Vv: {
      const Xyz c = rgb_to_xyz(p);
      const double l = 116.0 * lab_f(c.y / kWhiteY) - 16.0;
      if (id == ChannelId::L) return l * 255.0 / 100.0;
      const double denom = c.x + 15.0 * c.y + 3.0 * c.z;
      const double wdenom = kWhiteX + 15.0 * kWhiteY + 3.0 * kWhiteZ;
      double u = 0.0, v = 0.0;
      if (denom > 0.0) {
        u = 13.0 * l * (4.0 * c.x / denom - 4.0 * kWhiteX / wdenom);
        v = 13.0 * l * (9.0 * c.y / denom - 9.0 * kWhiteY / wdenom);
      }
      return id == ChannelId::U ? (u - kUMin) / kUSpan * 255.0
                                : (v - kVMin) / kVSpan * 255.0;
    }

    case ChannelId::La: return rgb_to_lab(p).l * 255.0 / 100.0;
    case ChannelId::A: return rgb_to_lab(p).a + 128.0;
    case ChannelId::B: return rgb_to_lab(p).b + 128.0;

    // LCh chroma stays on its natural scale; sRGB chroma tops out near 134.
    case ChannelId::Ch: {
      const Lab lab = rgb_to_lab(p);
      return std::sqrt(lab.a * lab.a + lab.b * lab.b);
    }
    case ChannelId::Hh: {
      const Lab lab = rgb_to_lab(p);
      // Neutral greys leave ~1e-14 of chroma from the matrix rounding.
      if (std::hypot(lab.a, lab.b) < 1e-9) return 0.0;
      double h = std::atan2(lab.b, lab.a) * 180.0 / M_PI;
      if (h < 0.0) h += 360.0;
      return hue_scale(h);
    }
  }
  return 0.0;
}

std::uint8_t channel_value(Rgb p, ChannelId id) { return to_byte(channel_raw(p, id)); }


ScalarPlane extract_plane(const RgbImage& img, ChannelId id) {
  ScalarPlane out(img.width(), img.height());
  const auto src = img.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = channel_value(src[i], id);
  return out;
}

ScalarPlane luminance_gray(const RgbImage& img) {
  return extract_plane(img, ChannelId::Y);
}

}  // namespace skinseg
