#include "skinseg/seedgen.hpp"

namespace skinseg {
namespace {

int signed_vote(Ternary v) {
  switch (v) {
    case Ternary::White: return 1;
    case Ternary::Black: return -1;
    case Ternary::Gray: return 0;
  }
  return 0;
}

bool interior(const TernaryImage& t, int x, int y) {
  return x >= 2 && y >= 2 && x < t.width() - 2 && y < t.height() - 2;
}

}  // namespace

void SeedParams::validate() const {
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "seed K must be > 0");
  if (!(th1 < th2))
    throw Error(ErrorCode::InvalidArgument, "seed thresholds need th1 < th2");
}

TernaryImage make_ternary(const RgbImage& img, const SkinClusterModel& model) {
  TernaryImage out(img.width(), img.height());
  const auto src = img.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    switch (model.classify(rgb_to_ycbcr(src[i]))) {
      case TernaryClass::T1: dst[i] = Ternary::White; break;
      case TernaryClass::T2: dst[i] = Ternary::Gray; break;
      case TernaryClass::T3: dst[i] = Ternary::Black; break;
    }
  }
  return out;
}

double neighbor_score(const TernaryImage& t, int x, int y, double k) {
  if (!interior(t, x, y))
    throw Error(ErrorCode::Precondition,
                "neighbour score needs a pixel at least 2 from the border");
  int inner = 0, outer = 0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const int v = signed_vote(t.at(x + dx, y + dy));
      if (dx >= -1 && dx <= 1 && dy >= -1 && dy <= 1)
        inner += v;
      else
        outer += v;
    }
  return k * inner + outer;
}

TernaryImage refine_ternary(const TernaryImage& t, const SeedParams& p,
                            ScanOrder order) {
  p.validate();
  TernaryImage out = t;
  const int w = t.width(), h = t.height();
  auto visit = [&](int x, int y) {
    if (!interior(t, x, y) || t.at(x, y) == Ternary::White) return;
    const double score = neighbor_score(t, x, y, p.k);
    if (score > p.th2)
      out.at(x, y) = Ternary::White;
    else if (score < p.th1)
      out.at(x, y) = Ternary::Black;
  };
  if (order == ScanOrder::Forward) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) visit(x, y);
  } else {
    for (int y = h - 1; y >= 0; --y)
      for (int x = w - 1; x >= 0; --x) visit(x, y);
  }
  return out;
}

SkinMask extract_seed(const TernaryImage& t) {
  SkinMask out(t.width(), t.height());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] == Ternary::White ? 1 : 0;
  return out;
}

}  // namespace skinseg
