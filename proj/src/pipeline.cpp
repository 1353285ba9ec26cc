#include "skinseg/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace skinseg {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Error config_error(std::string_view key, std::string_view value, const char* why) {
  return Error(ErrorCode::Config, "config " + std::string(key) + "=" + std::string(value) +
                                      ": " + why);
}

std::string_view strip_plus(std::string_view v) {
  return !v.empty() && v.front() == '+' ? v.substr(1) : v;
}

double parse_double(std::string_view key, std::string_view raw) {
  const std::string_view v = strip_plus(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw config_error(key, v, "expected a number");
  return out;
}

int parse_int(std::string_view key, std::string_view raw) {
  const std::string_view v = strip_plus(raw);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw config_error(key, v, "expected an integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw config_error(key, v, "expected true/false");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest form that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "train.tau_in") train.tau_in = parse_double(key, v);
  else if (key == "train.tau_out") train.tau_out = parse_double(key, v);
  else if (key == "train.smoothing") train.smoothing = parse_bool(key, v);
  else if (key == "seed.K") seed.k = parse_double(key, v);
  else if (key == "seed.th1") seed.th1 = parse_double(key, v);
  else if (key == "seed.th2") seed.th2 = parse_double(key, v);
  else if (key == "canny.sigma") canny.sigma = parse_double(key, v);
  else if (key == "canny.low") canny.low = parse_double(key, v);
  else if (key == "canny.high") canny.high = parse_double(key, v);
  else if (key == "otsu.k") otsu_k = parse_int(key, v);
  else if (key == "otsu.channels") {
    std::vector<ChannelId> list;
    for (auto name : split_list(v)) {
      const auto id = parse_channel(name);
      if (!id) throw config_error(key, v, "unknown channel name");
      list.push_back(*id);
    }
    if (list.empty()) throw config_error(key, v, "channel list is empty");
    channels = std::move(list);
  } else if (key == "diffusion.w_gray") diffusion.w_gray = parse_double(key, v);
  else if (key == "diffusion.w_black") diffusion.w_black = parse_double(key, v);
  else if (key == "diffusion.channel_weights") {
    std::vector<double> w;
    for (auto item : split_list(v)) w.push_back(parse_double(key, item));
    diffusion.channel_weights = std::move(w);
  } else if (key == "diffusion.s_min") diffusion.s_min = parse_double(key, v);
  else if (key == "diffusion.max_ray_len") diffusion.max_ray_len = parse_int(key, v);
  else if (key == "lut.bins") lut_bins = parse_int(key, v);
  else if (key == "lut.theta") lut_theta = parse_double(key, v);
  else if (key == "run.model") model_path = std::string(v);
  else if (key == "run.out") out_dir = std::string(v);
  else if (key == "run.debug_artifacts") debug_artifacts = parse_bool(key, v);
  else if (key == "run.jobs") jobs = parse_int(key, v);
  else throw Error(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
}

void PipelineConfig::apply_text(std::string_view text) {
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::Config,
                  "config line " + std::to_string(lineno) + " is not key=value");
    set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void PipelineConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_text(ss.str());
}

std::string PipelineConfig::to_text() const {
  std::ostringstream o;
  o << "train.tau_in=" << fmt_double(train.tau_in) << "\n"
    << "train.tau_out=" << fmt_double(train.tau_out) << "\n"
    << "train.smoothing=" << (train.smoothing ? "true" : "false") << "\n"
    << "seed.K=" << fmt_double(seed.k) << "\n"
    << "seed.th1=" << fmt_double(seed.th1) << "\n"
    << "seed.th2=" << fmt_double(seed.th2) << "\n"
    << "canny.sigma=" << fmt_double(canny.sigma) << "\n"
    << "canny.low=" << fmt_double(canny.low) << "\n"
    << "canny.high=" << fmt_double(canny.high) << "\n"
    << "otsu.k=" << otsu_k << "\n"
    << "otsu.channels=";
  for (std::size_t i = 0; i < channels.size(); ++i)
    o << (i ? "," : "") << channel_name(channels[i]);
  o << "\n"
    << "diffusion.w_gray=" << fmt_double(diffusion.w_gray) << "\n"
    << "diffusion.w_black=" << fmt_double(diffusion.w_black) << "\n"
    << "diffusion.channel_weights=";
  const auto weights = effective_diffusion().channel_weights;
  for (std::size_t i = 0; i < weights.size(); ++i)
    o << (i ? "," : "") << fmt_double(weights[i]);
  o << "\n"
    << "diffusion.s_min=" << fmt_double(diffusion.s_min) << "\n"
    << "diffusion.max_ray_len=" << diffusion.max_ray_len << "\n"
    << "lut.bins=" << lut_bins << "\n"
    << "lut.theta=" << fmt_double(lut_theta) << "\n"
    << "run.model=" << model_path << "\n"
    << "run.out=" << out_dir << "\n"
    << "run.debug_artifacts=" << (debug_artifacts ? "true" : "false") << "\n"
    << "run.jobs=" << jobs << "\n";
  return o.str();
}

DiffusionConfig PipelineConfig::effective_diffusion() const {
  DiffusionConfig d = diffusion;
  if (d.channel_weights.empty()) d.channel_weights = default_channel_weights(channels);
  return d;
}

void PipelineConfig::validate() const {
  seed.validate();
  canny.validate();
  if (otsu_k < 2 || otsu_k > 4) throw Error(ErrorCode::Config, "otsu.k must be 2..4");
  if (channels.empty()) throw Error(ErrorCode::Config, "otsu.channels is empty");
  try {
    effective_diffusion().validate(channels.size());
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  if (jobs < 1) throw Error(ErrorCode::Config, "run.jobs must be >= 1");
  if (!(lut_theta >= 0.0 && lut_theta <= 1.0))
    throw Error(ErrorCode::Config, "lut.theta must lie in [0, 1]");
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::Ternary: return "ternary";
    case Stage::Refine: return "refine";
    case Stage::Seed: return "seed";
    case Stage::Otsu: return "otsu";
    case Stage::Edges: return "edges";
    case Stage::Diffusion1: return "diffusion1";
    case Stage::Diffusion2: return "diffusion2";
  }
  return "?";
}

SegmentationResult segment(const RgbImage& img, const SkinClusterModel& model,
                           const PipelineConfig& cfg) {
  cfg.validate();
  SegmentationResult r;
  auto timed = [&r](Stage s, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    r.stage_ms[static_cast<std::size_t>(s)] = elapsed_ms(t0);
  };
  timed(Stage::Ternary, [&] { r.ternary = make_ternary(img, model); });
  timed(Stage::Refine, [&] { r.refined = refine_ternary(r.ternary, cfg.seed); });
  timed(Stage::Seed, [&] { r.seed = extract_seed(r.refined); });
  timed(Stage::Otsu, [&] { r.classes = segment_channels(img, cfg.channels, cfg.otsu_k); });
  timed(Stage::Edges, [&] { r.edges = image_edges(img, cfg.canny); });
  const DiffusionConfig dcfg = cfg.effective_diffusion();
  timed(Stage::Diffusion1, [&] {
    r.stage1 = diffuse_stage(r.seed, r.refined, r.classes, r.edges, dcfg, DiffusionStage::First);
  });
  timed(Stage::Diffusion2, [&] {
    r.mask = diffuse_stage(r.stage1, r.refined, r.classes, r.edges, dcfg, DiffusionStage::Second);
  });
  return r;
}

std::vector<Rgb> harvest_skin_pixels(const RgbImage& img, const GroundTruth& gt) {
  require_same_shape(img, gt, "image vs ground truth");
  std::vector<Rgb> out;
  for (std::size_t i = 0; i < img.size(); ++i)
    if (gt[i] == GtLabel::Skin) out.push_back(img[i]);
  return out;
}

}  // namespace skinseg
