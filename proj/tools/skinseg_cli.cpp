// skinseg command-line front end: train, segment, eval, baseline.
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skinseg/skinseg.h"

namespace fs = std::filesystem;

namespace {

struct ImageDeleter {
  void operator()(skinseg_image* p) const { skinseg_image_free(p); }
};
struct ConfigDeleter {
  void operator()(skinseg_config* p) const { skinseg_config_free(p); }
};
struct ModelDeleter {
  void operator()(skinseg_model* p) const { skinseg_model_free(p); }
};
struct ResultDeleter {
  void operator()(skinseg_result* p) const { skinseg_result_free(p); }
};
struct TrainerDeleter {
  void operator()(skinseg_trainer* p) const { skinseg_trainer_free(p); }
};
struct LutDeleter {
  void operator()(skinseg_lut* p) const { skinseg_lut_free(p); }
};
struct ReportDeleter {
  void operator()(skinseg_report* p) const { skinseg_report_free(p); }
};

using ImagePtr = std::unique_ptr<skinseg_image, ImageDeleter>;
using ConfigPtr = std::unique_ptr<skinseg_config, ConfigDeleter>;
using ModelPtr = std::unique_ptr<skinseg_model, ModelDeleter>;
using ResultPtr = std::unique_ptr<skinseg_result, ResultDeleter>;
using TrainerPtr = std::unique_ptr<skinseg_trainer, TrainerDeleter>;
using LutPtr = std::unique_ptr<skinseg_lut, LutDeleter>;
using ReportPtr = std::unique_ptr<skinseg_report, ReportDeleter>;

struct ApiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(skinseg_status s, const std::string& context) {
  if (s != SKINSEG_OK)
    throw ApiError(context + ": " + skinseg_status_name(s) + ": " + skinseg_last_error());
}

std::string config_value(const skinseg_config* cfg, const char* key) {
  const size_t n = skinseg_config_get(cfg, key, nullptr, 0);
  std::string s(n + 1, '\0');
  skinseg_config_get(cfg, key, s.data(), s.size());
  s.resize(n);
  return s;
}

std::string config_dump(const skinseg_config* cfg) {
  const size_t n = skinseg_config_dump(cfg, nullptr, 0);
  std::string s(n + 1, '\0');
  skinseg_config_dump(cfg, s.data(), s.size());
  s.resize(n);
  return s;
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  bool debug = false;
  int jobs = 0;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value configuration file");
    app->add_option("--set", overrides, "override one config key (key=value), repeatable");
    app->add_option("--out", out, "output directory (run.out)");
    app->add_flag("--debug-artifacts", debug, "write intermediate images");
    app->add_option("--jobs", jobs, "images processed concurrently (run.jobs)");
  }

  // Config file first, then --set, then the dedicated flags.
  ConfigPtr build_config() const {
    skinseg_config* raw = nullptr;
    check(skinseg_config_create(&raw), "config");
    ConfigPtr cfg(raw);
    if (!config_path.empty()) check(skinseg_config_load_file(cfg.get(), config_path.c_str()), config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ApiError("--set expects key=value, got '" + kv + "'");
      check(skinseg_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()),
            "--set " + kv);
    }
    if (!out.empty()) check(skinseg_config_set(cfg.get(), "run.out", out.c_str()), "--out");
    if (debug) check(skinseg_config_set(cfg.get(), "run.debug_artifacts", "true"), "--debug-artifacts");
    if (jobs > 0)
      check(skinseg_config_set(cfg.get(), "run.jobs", std::to_string(jobs).c_str()), "--jobs");
    check(skinseg_config_validate(cfg.get()), "config");
    return cfg;
  }
};

// Stem used to pair images, masks and annotations: the file name without
// ".png" and without a trailing ".mask" or ".gt" tag.
std::string pairing_key(const fs::path& p) {
  std::string stem = p.stem().string();
  for (const std::string tag : {".mask", ".gt"})
    if (stem.size() > tag.size() && stem.compare(stem.size() - tag.size(), tag.size(), tag) == 0)
      return stem.substr(0, stem.size() - tag.size());
  return stem;
}

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext == ".png";
}

std::vector<fs::path> collect_pngs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && is_png(e.path())) found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::map<std::string, fs::path> index_dir(const std::string& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& p : collect_pngs({dir})) out[pairing_key(p)] = p;
  return out;
}

ImagePtr load_image(const fs::path& p) {
  skinseg_image* raw = nullptr;
  check(skinseg_image_load_png(p.string().c_str(), &raw), p.string());
  return ImagePtr(raw);
}

void write_gray(const fs::path& p, uint32_t w, uint32_t h, const uint8_t* v) {
  check(skinseg_write_gray_png(p.string().c_str(), w, h, v), p.string());
}

fs::path output_dir(const skinseg_config* cfg) {
  std::string out = config_value(cfg, "run.out");
  if (out.empty()) out = ".";
  fs::create_directories(out);
  return out;
}

int config_jobs(const skinseg_config* cfg) {
  return std::max(1, std::stoi(config_value(cfg, "run.jobs")));
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < n;) fn(i);
  };
  const int threads = static_cast<int>(std::min<size_t>(std::max(jobs, 1), std::max<size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

std::vector<uint8_t> read_triplets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ApiError("cannot open triplet list " + path);
  std::vector<uint8_t> rgb;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int v[3];
    if (!(ss >> v[0])) continue;
    if (!(ss >> v[1] >> v[2]))
      throw ApiError(path + ":" + std::to_string(lineno) + ": expected three values R G B");
    for (int c : v) {
      if (c < 0 || c > 255)
        throw ApiError(path + ":" + std::to_string(lineno) + ": value out of 0..255");
      rgb.push_back(static_cast<uint8_t>(c));
    }
  }
  return rgb;
}

// ---- train ------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string images, gt, triplets, model_out, lut_out;
  std::optional<double> tau_in, tau_out;
};

int run_train(const TrainArgs& a) {
  ConfigPtr cfg = a.common.build_config();
  if (a.tau_in) check(skinseg_config_set(cfg.get(), "train.tau_in", std::to_string(*a.tau_in).c_str()), "--tau-in");
  if (a.tau_out) {
    std::ostringstream v;
    v.precision(17);
    v << *a.tau_out;
    check(skinseg_config_set(cfg.get(), "train.tau_out", v.str().c_str()), "--tau-out");
  }

  skinseg_trainer* raw = nullptr;
  check(skinseg_trainer_create(&raw), "trainer");
  TrainerPtr tr(raw);

  if (!a.triplets.empty()) {
    const auto rgb = read_triplets(a.triplets);
    check(skinseg_trainer_add_rgb(tr.get(), rgb.data(), rgb.size() / 3), a.triplets);
  }
  if (!a.images.empty()) {
    if (a.gt.empty()) throw ApiError("--images needs --gt");
    const auto gts = index_dir(a.gt);
    for (const auto& img_path : collect_pngs({a.images})) {
      const auto it = gts.find(pairing_key(img_path));
      if (it == gts.end()) throw ApiError("no annotation for " + img_path.string());
      ImagePtr img = load_image(img_path);
      ImagePtr gt = load_image(it->second);
      check(skinseg_trainer_add_annotated(tr.get(), img.get(), gt.get()), it->second.string());
    }
  }
  std::cout << "skin pixels: " << skinseg_trainer_pixel_count(tr.get()) << "\n";

  skinseg_model* model_raw = nullptr;
  check(skinseg_trainer_build_model(tr.get(), cfg.get(), &model_raw), "training");
  ModelPtr model(model_raw);
  check(skinseg_model_save(model.get(), a.model_out.c_str()), a.model_out);

  static const char* kPlaneNames[] = {"YCb", "YCr", "CbCr"};
  for (int p = 0; p < 3; ++p)
    std::cout << kPlaneNames[p] << ": inner "
              << skinseg_model_vertex_count(model.get(), static_cast<skinseg_plane>(p), 1)
              << " vertices, outer "
              << skinseg_model_vertex_count(model.get(), static_cast<skinseg_plane>(p), 0)
              << " vertices\n";
  std::cout << "model written to " << a.model_out << "\n";

  if (!a.lut_out.empty()) {
    skinseg_lut* lut_raw = nullptr;
    check(skinseg_trainer_build_lut(tr.get(), cfg.get(), &lut_raw), "LUT training");
    LutPtr lut(lut_raw);
    check(skinseg_lut_save(lut.get(), a.lut_out.c_str()), a.lut_out);
    std::cout << "LUT written to " << a.lut_out << "\n";
  }
  return 0;
}

// ---- segment ----------------------------------------------------------

struct SegmentArgs {
  Common common;
  std::string model;
  std::vector<std::string> inputs;
};

struct ImageRun {
  bool ok = false;
  std::string error;
  std::vector<std::string> artifacts;
  std::array<double, SKINSEG_STAGE_COUNT> ms{};
};

ImageRun segment_one(const fs::path& input, const skinseg_model* model,
                     const skinseg_config* cfg, const fs::path& out_dir, bool debug) {
  ImageRun run;
  try {
    ImagePtr img = load_image(input);
    skinseg_result* raw = nullptr;
    check(skinseg_segment(model, cfg, img.get(), &raw), input.string());
    ResultPtr res(raw);
    const uint32_t w = skinseg_result_width(res.get()), h = skinseg_result_height(res.get());
    const std::string stem = input.stem().string();
    auto emit = [&](const std::string& stage, const uint8_t* values) {
      const fs::path p = out_dir / (stem + "." + stage + ".png");
      write_gray(p, w, h, values);
      run.artifacts.push_back(p.string());
    };
    emit("mask", skinseg_result_artifact(res.get(), SKINSEG_ARTIFACT_MASK));
    if (debug) {
      emit("ternary", skinseg_result_artifact(res.get(), SKINSEG_ARTIFACT_TERNARY));
      emit("refined", skinseg_result_artifact(res.get(), SKINSEG_ARTIFACT_REFINED));
      emit("edges", skinseg_result_artifact(res.get(), SKINSEG_ARTIFACT_EDGES));
      emit("stage1", skinseg_result_artifact(res.get(), SKINSEG_ARTIFACT_STAGE1));
      for (size_t c = 0; c < skinseg_result_class_map_count(res.get()); ++c)
        emit(std::string("otsu_") + skinseg_result_class_map_channel(res.get(), c),
             skinseg_result_class_map(res.get(), c));
      // Mask blended over the input: skin tinted red at 50 %.
      const uint8_t* rgb = skinseg_image_pixels(img.get());
      const uint8_t* mask = skinseg_result_artifact(res.get(), SKINSEG_ARTIFACT_MASK);
      std::vector<uint8_t> overlay(rgb, rgb + static_cast<size_t>(w) * h * 3);
      for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i)
        if (mask[i]) {
          overlay[3 * i] = static_cast<uint8_t>((overlay[3 * i] + 255) / 2);
          overlay[3 * i + 1] = static_cast<uint8_t>(overlay[3 * i + 1] / 2);
          overlay[3 * i + 2] = static_cast<uint8_t>(overlay[3 * i + 2] / 2);
        }
      const fs::path p = out_dir / (stem + ".overlay.png");
      check(skinseg_write_rgb_png(p.string().c_str(), w, h, overlay.data()), p.string());
      run.artifacts.push_back(p.string());
    }
    for (int s = 0; s < SKINSEG_STAGE_COUNT; ++s)
      run.ms[s] = skinseg_result_stage_ms(res.get(), static_cast<skinseg_stage>(s));
    run.ok = true;
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

int run_segment(const SegmentArgs& a) {
  ConfigPtr cfg = a.common.build_config();
  if (!a.model.empty()) check(skinseg_config_set(cfg.get(), "run.model", a.model.c_str()), "--model");
  const std::string model_path = config_value(cfg.get(), "run.model");
  if (model_path.empty()) throw ApiError("no model given (--model or run.model)");
  skinseg_model* raw = nullptr;
  check(skinseg_model_load(model_path.c_str(), &raw), model_path);
  ModelPtr model(raw);

  const fs::path out_dir = output_dir(cfg.get());
  const bool debug = config_value(cfg.get(), "run.debug_artifacts") == "true";
  const auto inputs = collect_pngs(a.inputs);
  if (inputs.empty()) throw ApiError("no input images");

  std::vector<ImageRun> runs(inputs.size());
  std::mutex log;
  parallel_for(inputs.size(), config_jobs(cfg.get()), [&](size_t i) {
    runs[i] = segment_one(inputs[i], model.get(), cfg.get(), out_dir, debug);
    std::lock_guard lock(log);
    if (runs[i].ok)
      std::cout << inputs[i].string() << ": ok\n";
    else
      std::cerr << inputs[i].string() << ": FAILED: " << runs[i].error << "\n";
  });

  nlohmann::json report = {{"config", config_dump(cfg.get())}, {"images", nlohmann::json::array()}};
  int failures = 0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    nlohmann::json entry = {{"image", inputs[i].string()}, {"ok", runs[i].ok}};
    if (runs[i].ok) {
      nlohmann::json timing = nlohmann::json::object();
      for (int s = 0; s < SKINSEG_STAGE_COUNT; ++s)
        timing[skinseg_stage_name(static_cast<skinseg_stage>(s))] = runs[i].ms[s];
      entry["stage_ms"] = timing;
      entry["artifacts"] = runs[i].artifacts;
    } else {
      entry["error"] = runs[i].error;
      ++failures;
    }
    report["images"].push_back(entry);
  }
  std::ofstream(out_dir / "run_report.json") << report.dump(2) << "\n";
  if (failures) std::cerr << failures << " of " << inputs.size() << " images failed\n";
  return failures ? 1 : 0;
}

// ---- eval -------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string masks, gt, csv;
};

int run_eval(const EvalArgs& a) {
  ConfigPtr cfg = a.common.build_config();
  const auto gts = index_dir(a.gt);
  const auto masks = index_dir(a.masks);
  skinseg_report* raw = nullptr;
  check(skinseg_report_create(&raw), "report");
  ReportPtr report(raw);

  int failures = 0;
  for (const auto& [key, mask_path] : masks) {
    const auto it = gts.find(key);
    if (it == gts.end()) {
      std::cerr << mask_path.string() << ": no matching ground truth\n";
      ++failures;
      continue;
    }
    try {
      uint32_t w = 0, h = 0;
      uint8_t* values = nullptr;
      check(skinseg_read_gray_png(mask_path.string().c_str(), &w, &h, &values), mask_path.string());
      std::unique_ptr<uint8_t, decltype(&skinseg_buffer_free)> mask(values, skinseg_buffer_free);
      for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) values[i] = values[i] >= 128;
      ImagePtr gt = load_image(it->second);
      skinseg_confusion c{};
      check(skinseg_confusion_compute(values, w, h, gt.get(), &c), it->second.string());
      check(skinseg_report_add(report.get(), key.c_str(), c), key);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      ++failures;
    }
  }
  for (const auto& [key, gt_path] : gts)
    if (!masks.count(key)) {
      std::cerr << gt_path.string() << ": no matching mask\n";
      ++failures;
    }

  const size_t n = skinseg_report_csv(report.get(), nullptr, 0);
  std::string csv(n + 1, '\0');
  skinseg_report_csv(report.get(), csv.data(), csv.size());
  csv.resize(n);

  std::string target = a.csv;
  if (target.empty() && !a.common.out.empty()) target = (output_dir(cfg.get()) / "metrics.csv").string();
  if (target.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(target, std::ios::binary);
    if (!out) throw ApiError("cannot write " + target);
    out << csv;
    std::cout << "metrics written to " << target << "\n";
  }
  return failures ? 1 : 0;
}

// ---- baseline ---------------------------------------------------------

struct BaselineArgs {
  Common common;
  std::string rule = "daylight";
  std::string lut;
  std::optional<double> theta;
  std::vector<std::string> inputs;
};

int run_baseline(const BaselineArgs& a) {
  ConfigPtr cfg = a.common.build_config();
  if (a.theta) {
    std::ostringstream v;
    v.precision(17);
    v << *a.theta;
    check(skinseg_config_set(cfg.get(), "lut.theta", v.str().c_str()), "--theta");
  }
  LutPtr lut;
  if (a.rule == "lut") {
    if (a.lut.empty()) throw ApiError("rule 'lut' needs a trained LUT (--lut)");
    skinseg_lut* raw = nullptr;
    check(skinseg_lut_load(a.lut.c_str(), &raw), a.lut);
    lut.reset(raw);
  }
  const double theta = std::stod(config_value(cfg.get(), "lut.theta"));
  const fs::path out_dir = output_dir(cfg.get());
  const auto inputs = collect_pngs(a.inputs);
  if (inputs.empty()) throw ApiError("no input images");

  std::vector<std::string> errors(inputs.size());
  parallel_for(inputs.size(), config_jobs(cfg.get()), [&](size_t i) {
    try {
      ImagePtr img = load_image(inputs[i]);
      const uint32_t w = skinseg_image_width(img.get()), h = skinseg_image_height(img.get());
      std::vector<uint8_t> mask(static_cast<size_t>(w) * h);
      if (a.rule == "lut")
        check(skinseg_baseline_lut(img.get(), lut.get(), theta, mask.data()), inputs[i].string());
      else
        check(skinseg_baseline_rule(img.get(),
                                    a.rule == "daylight" ? SKINSEG_RULE_DAYLIGHT : SKINSEG_RULE_FLASHLIGHT,
                                    mask.data()),
              inputs[i].string());
      write_gray(out_dir / (inputs[i].stem().string() + ".mask.png"), w, h, mask.data());
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  int failures = 0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (errors[i].empty()) {
      std::cout << inputs[i].string() << ": ok\n";
    } else {
      std::cerr << inputs[i].string() << ": FAILED: " << errors[i] << "\n";
      ++failures;
    }
  }
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skin segmentation by ternary seeding, Otsu fusion and edge-bounded diffusion"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a skin cluster model");
  train.common.attach(train_cmd);
  train_cmd->add_option("--images", train.images, "directory of training images");
  train_cmd->add_option("--gt", train.gt, "directory of red/black/blue annotations");
  train_cmd->add_option("--triplets", train.triplets, "text file of skin pixels, one 'R G B' per line");
  train_cmd->add_option("--model-out", train.model_out, "model file to write")->required();
  train_cmd->add_option("--lut-out", train.lut_out, "also write a LUT baseline model");
  train_cmd->add_option("--tau-in", train.tau_in, "inner cut as a fraction of peak density");
  train_cmd->add_option("--tau-out", train.tau_out, "outer cut as a fraction of total mass");

  SegmentArgs seg;
  auto* seg_cmd = app.add_subcommand("segment", "segment images into skin masks");
  seg.common.attach(seg_cmd);
  seg_cmd->add_option("--model", seg.model, "trained model file (run.model)");
  seg_cmd->add_option("inputs", seg.inputs, "PNG files or directories")->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "score masks against annotations");
  ev.common.attach(eval_cmd);
  eval_cmd->add_option("--masks", ev.masks, "directory of masks")->required();
  eval_cmd->add_option("--gt", ev.gt, "directory of annotations")->required();
  eval_cmd->add_option("--csv", ev.csv, "write the table here instead of stdout");

  BaselineArgs base;
  auto* base_cmd = app.add_subcommand("baseline", "classify pixels with a baseline rule");
  base.common.attach(base_cmd);
  base_cmd->add_option("--rule", base.rule, "daylight | flashlight | lut")
      ->check(CLI::IsMember({"daylight", "flashlight", "lut"}));
  base_cmd->add_option("--lut", base.lut, "trained LUT file (rule lut)");
  base_cmd->add_option("--theta", base.theta, "LUT probability threshold (lut.theta)");
  base_cmd->add_option("inputs", base.inputs, "PNG files or directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every other usage error maps to 2.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (train_cmd->parsed()) {
      if (train.images.empty() && train.triplets.empty())
        throw ApiError("train needs --images/--gt or --triplets");
      return run_train(train);
    }
    if (seg_cmd->parsed()) return run_segment(seg);
    if (eval_cmd->parsed()) return run_eval(ev);
    if (base_cmd->parsed()) return run_baseline(base);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
