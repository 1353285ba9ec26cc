#include "skinseg/otsu.hpp"

#include <algorithm>

namespace skinseg {
namespace {

// Zeroth and first cumulative moments; index t covers bins [0, t].
struct Moments {
  std::array<double, 256> count{};
  std::array<double, 256> sum{};

  explicit Moments(const Histogram256& h) {
    double n = 0.0, s = 0.0;
    for (int v = 0; v < 256; ++v) {
      n += static_cast<double>(h.bins[v]);
      s += static_cast<double>(h.bins[v]) * v;
      count[v] = n;
      sum[v] = s;
    }
  }

  // Variance for classes split at ascending thresholds t[0..m-1].
  double variance(const int* t, int m) const {
    const double total = count[255];
    const double mean = sum[255] / total;
    double acc = 0.0;
    double prev_n = 0.0, prev_s = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double n = (i < m ? count[t[i]] : total) - prev_n;
      const double s = (i < m ? sum[t[i]] : sum[255]) - prev_s;
      if (n > 0.0) {
        const double d = s / n - mean;
        acc += n * d * d;
      }
      if (i < m) {
        prev_n = count[t[i]];
        prev_s = sum[t[i]];
      }
    }
    return acc / total;
  }
};

void require_nonempty(const Histogram256& h) {
  if (h.total == 0) throw Error(ErrorCode::InvalidArgument, "histogram is empty");
}

// Index of the single occupied bin, or -1.
int single_bin(const Histogram256& h) {
  int found = -1;
  for (int v = 0; v < 256; ++v) {
    if (h.bins[v] == 0) continue;
    if (found >= 0) return -1;
    found = v;
  }
  return found;
}

OtsuResult degenerate_result(int bin, int k) {
  OtsuResult r;
  r.degenerate = true;
  const int first = std::min(bin, 255 - (k - 1));
  for (int i = 0; i < k - 1; ++i) r.thresholds.push_back(first + i);
  return r;
}

// Visits every ascending threshold vector of length m in lexicographic order.
template <typename Fn>
bool for_each_split(int m, Fn&& fn) {
  std::array<int, 3> t{};
  for (int i = 0; i < m; ++i) t[i] = i;
  while (true) {
    if (fn(t.data())) return true;
    int i = m - 1;
    while (i >= 0 && t[i] == 254 - (m - 1 - i)) --i;
    if (i < 0) return false;
    ++t[i];
    for (int j = i + 1; j < m; ++j) t[j] = t[j - 1] + 1;
  }
}

}  // namespace

Histogram256 histogram(const ScalarPlane& plane) {
  Histogram256 h;
  for (std::uint8_t v : plane.values()) ++h.bins[v];
  h.total = plane.size();
  return h;
}

double between_class_variance(const Histogram256& h, std::span<const int> thresholds) {
  require_nonempty(h);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] < 0 || thresholds[i] > 254 ||
        (i > 0 && thresholds[i] <= thresholds[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "thresholds must ascend within [0, 254]");
  }
  return Moments(h).variance(thresholds.data(), static_cast<int>(thresholds.size()));
}

OtsuResult otsu_threshold(const Histogram256& h) {
  require_nonempty(h);
  if (const int bin = single_bin(h); bin >= 0) return degenerate_result(bin, 2);

  const Moments mom(h);
  std::array<double, 255> score{};
  double best = 0.0;
  for (int t = 0; t < 255; ++t) {
    score[t] = mom.variance(&t, 1);
    best = std::max(best, score[t]);
  }
  const double cut = best - kOtsuTieTolerance * best;
  OtsuResult r;
  for (int t = 0; t < 255; ++t)
    if (score[t] >= cut) {
      r.thresholds = {t};
      break;
    }
  return r;
}

OtsuResult otsu_multilevel(const Histogram256& h, int k) {
  if (k < 2 || k > 4)
    throw Error(ErrorCode::InvalidArgument, "Otsu class count must be 2..4");
  if (k == 2) return otsu_threshold(h);
  require_nonempty(h);
  if (const int bin = single_bin(h); bin >= 0) return degenerate_result(bin, k);

  const Moments mom(h);
  const int m = k - 1;
  double best = 0.0;
  for_each_split(m, [&](const int* t) {
    best = std::max(best, mom.variance(t, m));
    return false;
  });
  const double cut = best - kOtsuTieTolerance * best;
  OtsuResult r;
  for_each_split(m, [&](const int* t) {
    if (mom.variance(t, m) < cut) return false;
    r.thresholds.assign(t, t + m);
    return true;
  });
  return r;
}

ChannelClassMaps segment_channels(const RgbImage& img,
                                  std::span<const ChannelId> channels, int k) {
  if (channels.empty())
    throw Error(ErrorCode::InvalidArgument, "channel list is empty");
  if (k < 2 || k > 4)
    throw Error(ErrorCode::InvalidArgument, "Otsu class count must be 2..4");
  ChannelClassMaps out;
  out.k = k;
  out.channels.assign(channels.begin(), channels.end());
  for (ChannelId id : channels) {
    const ScalarPlane plane = extract_plane(img, id);
    OtsuResult r = otsu_multilevel(histogram(plane), k);
    Grid<std::uint8_t> labels(plane.width(), plane.height());
    for (std::size_t i = 0; i < plane.size(); ++i)
      labels[i] = class_of(plane[i], r.thresholds);
    out.maps.push_back(std::move(labels));
    out.thresholds.push_back(std::move(r.thresholds));
    out.degenerate.push_back(r.degenerate);
  }
  return out;
}

}  // namespace skinseg
