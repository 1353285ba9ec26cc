#include "skinseg/skinseg.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "skinseg/colorspace.hpp"
#include "skinseg/evalkit.hpp"
#include "skinseg/pipeline.hpp"
#include "skinseg/png_io.hpp"
#include "skinseg/skinmodel.hpp"

struct skinseg_image {
  skinseg::RgbImage img;
};
struct skinseg_config {
  skinseg::PipelineConfig cfg;
};
struct skinseg_trainer {
  std::vector<skinseg::Rgb> pixels;
};
struct skinseg_model {
  skinseg::SkinClusterModel model;
};
struct skinseg_lut {
  skinseg::LutModel lut;
};
struct skinseg_result {
  skinseg::SegmentationResult r;
  std::array<std::vector<std::uint8_t>, 6> artifacts;
  std::vector<std::vector<std::uint8_t>> class_maps;
  std::vector<std::string> class_names;
};
struct skinseg_report {
  skinseg::MetricsTable table;
};

namespace {

thread_local std::string g_last_error;

skinseg_status to_status(skinseg::ErrorCode code) {
  using skinseg::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return SKINSEG_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return SKINSEG_ERR_IO;
    case ErrorCode::EmptyTraining: return SKINSEG_ERR_EMPTY_TRAINING;
    case ErrorCode::ModelVersion: return SKINSEG_ERR_MODEL_VERSION;
    case ErrorCode::ModelMalformed: return SKINSEG_ERR_MODEL_MALFORMED;
    case ErrorCode::ModelMissingPlane: return SKINSEG_ERR_MODEL_MISSING_PLANE;
    case ErrorCode::DimensionMismatch: return SKINSEG_ERR_DIMENSION_MISMATCH;
    case ErrorCode::MalformedGroundTruth: return SKINSEG_ERR_MALFORMED_GT;
    case ErrorCode::Config: return SKINSEG_ERR_CONFIG;
    case ErrorCode::Precondition: return SKINSEG_ERR_PRECONDITION;
  }
  return SKINSEG_ERR_INTERNAL;
}

skinseg_status fail(skinseg_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
skinseg_status guarded(Fn&& fn) {
  try {
    fn();
    return SKINSEG_OK;
  } catch (const skinseg::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SKINSEG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SKINSEG_ERR_INTERNAL, e.what());
  }
}

#define SKINSEG_REQUIRE(cond)                                                     \
  do {                                                                           \
    if (!(cond)) return fail(SKINSEG_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
  } while (0)

size_t copy_out(const std::string& s, char* buf, size_t capacity) {
  if (buf && capacity > 0) {
    const size_t n = std::min(s.size(), capacity - 1);
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

std::vector<std::uint8_t> mask_bytes(const skinseg::SkinMask& m) {
  std::vector<std::uint8_t> out(m.size());
  for (size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 255 : 0;
  return out;
}

std::vector<std::uint8_t> ternary_bytes(const skinseg::TernaryImage& t) {
  std::vector<std::uint8_t> out(t.size());
  for (size_t i = 0; i < t.size(); ++i) out[i] = static_cast<std::uint8_t>(t[i]);
  return out;
}

const skinseg::PipelineConfig& config_or_default(const skinseg_config* cfg) {
  static const skinseg::PipelineConfig kDefault;
  return cfg ? cfg->cfg : kDefault;
}

}  // namespace

extern "C" {

const char* skinseg_status_name(skinseg_status status) {
  switch (status) {
    case SKINSEG_OK: return "ok";
    case SKINSEG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SKINSEG_ERR_IO: return "i/o error";
    case SKINSEG_ERR_EMPTY_TRAINING: return "empty training set";
    case SKINSEG_ERR_MODEL_VERSION: return "unsupported model version";
    case SKINSEG_ERR_MODEL_MALFORMED: return "malformed model";
    case SKINSEG_ERR_MODEL_MISSING_PLANE: return "model plane missing";
    case SKINSEG_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case SKINSEG_ERR_MALFORMED_GT: return "malformed ground truth";
    case SKINSEG_ERR_CONFIG: return "configuration error";
    case SKINSEG_ERR_PRECONDITION: return "precondition violated";
    case SKINSEG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* skinseg_last_error(void) { return g_last_error.c_str(); }

const char* skinseg_version(void) { return "1.0.0"; }

skinseg_status skinseg_image_create(uint32_t width, uint32_t height, const uint8_t* rgb,
                                    skinseg_image** out) {
  SKINSEG_REQUIRE(rgb && out);
  return guarded([&] {
    std::vector<skinseg::Rgb> px(static_cast<size_t>(width) * height);
    std::memcpy(px.data(), rgb, px.size() * 3);
    *out = new skinseg_image{skinseg::RgbImage(static_cast<int>(width),
                                               static_cast<int>(height), std::move(px))};
  });
}

skinseg_status skinseg_image_load_png(const char* path, skinseg_image** out) {
  SKINSEG_REQUIRE(path && out);
  return guarded([&] { *out = new skinseg_image{skinseg::read_png_rgb(path)}; });
}

void skinseg_image_free(skinseg_image* img) { delete img; }
uint32_t skinseg_image_width(const skinseg_image* img) { return img ? img->img.width() : 0; }
uint32_t skinseg_image_height(const skinseg_image* img) { return img ? img->img.height() : 0; }
const uint8_t* skinseg_image_pixels(const skinseg_image* img) {
  return img ? reinterpret_cast<const uint8_t*>(img->img.values().data()) : nullptr;
}

skinseg_status skinseg_write_gray_png(const char* path, uint32_t width, uint32_t height,
                                      const uint8_t* values) {
  SKINSEG_REQUIRE(path && values);
  return guarded([&] {
    std::vector<std::uint8_t> v(values, values + static_cast<size_t>(width) * height);
    skinseg::write_png_gray(path, skinseg::ScalarPlane(static_cast<int>(width),
                                                       static_cast<int>(height), std::move(v)));
  });
}

skinseg_status skinseg_write_rgb_png(const char* path, uint32_t width, uint32_t height,
                                     const uint8_t* rgb) {
  SKINSEG_REQUIRE(path && rgb);
  return guarded([&] {
    std::vector<skinseg::Rgb> px(static_cast<size_t>(width) * height);
    std::memcpy(px.data(), rgb, px.size() * 3);
    skinseg::write_png_rgb(path, skinseg::RgbImage(static_cast<int>(width),
                                                   static_cast<int>(height), std::move(px)));
  });
}

skinseg_status skinseg_read_gray_png(const char* path, uint32_t* width, uint32_t* height,
                                     uint8_t** values) {
  SKINSEG_REQUIRE(path && width && height && values);
  return guarded([&] {
    const skinseg::ScalarPlane p = skinseg::read_png_gray(path);
    auto* buf = static_cast<uint8_t*>(std::malloc(p.size()));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, p.values().data(), p.size());
    *width = p.width();
    *height = p.height();
    *values = buf;
  });
}

void skinseg_buffer_free(void* buffer) { std::free(buffer); }

skinseg_status skinseg_config_create(skinseg_config** out) {
  SKINSEG_REQUIRE(out);
  return guarded([&] { *out = new skinseg_config{}; });
}

void skinseg_config_free(skinseg_config* cfg) { delete cfg; }

skinseg_status skinseg_config_set(skinseg_config* cfg, const char* key, const char* value) {
  SKINSEG_REQUIRE(cfg && key && value);
  return guarded([&] { cfg->cfg.set(key, value); });
}

skinseg_status skinseg_config_load_file(skinseg_config* cfg, const char* path) {
  SKINSEG_REQUIRE(cfg && path);
  return guarded([&] { cfg->cfg.load_file(path); });
}

skinseg_status skinseg_config_validate(const skinseg_config* cfg) {
  SKINSEG_REQUIRE(cfg);
  return guarded([&] { cfg->cfg.validate(); });
}

size_t skinseg_config_dump(const skinseg_config* cfg, char* buf, size_t capacity) {
  return copy_out(config_or_default(cfg).to_text(), buf, capacity);
}

size_t skinseg_config_get(const skinseg_config* cfg, const char* key, char* buf,
                          size_t capacity) {
  if (!key) return copy_out("", buf, capacity);
  const std::string text = config_or_default(cfg).to_text();
  const std::string prefix = std::string(key) + "=";
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t nl = text.find('\n', pos);
    const std::string line = text.substr(pos, nl - pos);
    if (line.rfind(prefix, 0) == 0) return copy_out(line.substr(prefix.size()), buf, capacity);
    pos = nl == std::string::npos ? text.size() : nl + 1;
  }
  return copy_out("", buf, capacity);
}

skinseg_status skinseg_trainer_create(skinseg_trainer** out) {
  SKINSEG_REQUIRE(out);
  return guarded([&] { *out = new skinseg_trainer{}; });
}

void skinseg_trainer_free(skinseg_trainer* tr) { delete tr; }

skinseg_status skinseg_trainer_add_rgb(skinseg_trainer* tr, const uint8_t* rgb, size_t count) {
  SKINSEG_REQUIRE(tr && (rgb || count == 0));
  return guarded([&] {
    for (size_t i = 0; i < count; ++i)
      tr->pixels.push_back({rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]});
  });
}

skinseg_status skinseg_trainer_add_annotated(skinseg_trainer* tr, const skinseg_image* img,
                                             const skinseg_image* ground_truth) {
  SKINSEG_REQUIRE(tr && img && ground_truth);
  return guarded([&] {
    const auto gt = skinseg::load_ground_truth(ground_truth->img);
    const auto px = skinseg::harvest_skin_pixels(img->img, gt);
    tr->pixels.insert(tr->pixels.end(), px.begin(), px.end());
  });
}

size_t skinseg_trainer_pixel_count(const skinseg_trainer* tr) {
  return tr ? tr->pixels.size() : 0;
}

skinseg_status skinseg_trainer_build_model(const skinseg_trainer* tr, const skinseg_config* cfg,
                                           skinseg_model** out) {
  SKINSEG_REQUIRE(tr && out);
  return guarded([&] {
    std::vector<skinseg::YCbCr> ycc;
    ycc.reserve(tr->pixels.size());
    for (const auto& p : tr->pixels) ycc.push_back(skinseg::rgb_to_ycbcr(p));
    *out = new skinseg_model{
        skinseg::SkinClusterModel::train(ycc, config_or_default(cfg).train)};
  });
}

skinseg_status skinseg_trainer_build_lut(const skinseg_trainer* tr, const skinseg_config* cfg,
                                         skinseg_lut** out) {
  SKINSEG_REQUIRE(tr && out);
  return guarded([&] {
    *out = new skinseg_lut{
        skinseg::LutModel::train(tr->pixels, config_or_default(cfg).lut_bins)};
  });
}

skinseg_status skinseg_model_load(const char* path, skinseg_model** out) {
  SKINSEG_REQUIRE(path && out);
  return guarded([&] { *out = new skinseg_model{skinseg::SkinClusterModel::load(path)}; });
}

skinseg_status skinseg_model_parse(const char* text, size_t length, skinseg_model** out) {
  SKINSEG_REQUIRE(text && out);
  return guarded([&] {
    *out = new skinseg_model{skinseg::SkinClusterModel::from_json(std::string_view(text, length))};
  });
}

skinseg_status skinseg_model_save(const skinseg_model* m, const char* path) {
  SKINSEG_REQUIRE(m && path);
  return guarded([&] { m->model.save(path); });
}

void skinseg_model_free(skinseg_model* m) { delete m; }

size_t skinseg_model_vertex_count(const skinseg_model* m, skinseg_plane plane, int inner) {
  if (!m || plane < SKINSEG_PLANE_YCB || plane > SKINSEG_PLANE_CBCR) return 0;
  const auto& pair = m->model.plane(static_cast<skinseg::PlaneId>(plane));
  return (inner ? pair.inner : pair.outer).vertices.size();
}

int skinseg_model_classify_rgb(const skinseg_model* m, uint8_t r, uint8_t g, uint8_t b) {
  if (!m) return -1;
  return static_cast<int>(m->model.classify(skinseg::rgb_to_ycbcr({r, g, b})));
}

skinseg_status skinseg_segment(const skinseg_model* m, const skinseg_config* cfg,
                               const skinseg_image* img, skinseg_result** out) {
  SKINSEG_REQUIRE(m && img && out);
  return guarded([&] {
    auto res = std::make_unique<skinseg_result>();
    res->r = skinseg::segment(img->img, m->model, config_or_default(cfg));
    const auto& r = res->r;
    res->artifacts[SKINSEG_ARTIFACT_MASK] = mask_bytes(r.mask);
    res->artifacts[SKINSEG_ARTIFACT_TERNARY] = ternary_bytes(r.ternary);
    res->artifacts[SKINSEG_ARTIFACT_REFINED] = ternary_bytes(r.refined);
    res->artifacts[SKINSEG_ARTIFACT_SEED] = mask_bytes(r.seed);
    res->artifacts[SKINSEG_ARTIFACT_EDGES] = mask_bytes(r.edges);
    res->artifacts[SKINSEG_ARTIFACT_STAGE1] = mask_bytes(r.stage1);
    const int k = r.classes.k;
    for (size_t c = 0; c < r.classes.maps.size(); ++c) {
      const auto& labels = r.classes.maps[c];
      std::vector<std::uint8_t> stretched(labels.size());
      for (size_t i = 0; i < labels.size(); ++i) stretched[i] = labels[i] * 255 / (k - 1);
      res->class_maps.push_back(std::move(stretched));
      res->class_names.emplace_back(skinseg::channel_name(r.classes.channels[c]));
    }
    *out = res.release();
  });
}

void skinseg_result_free(skinseg_result* r) { delete r; }
uint32_t skinseg_result_width(const skinseg_result* r) { return r ? r->r.mask.width() : 0; }
uint32_t skinseg_result_height(const skinseg_result* r) { return r ? r->r.mask.height() : 0; }

const uint8_t* skinseg_result_artifact(const skinseg_result* r, skinseg_artifact which) {
  if (!r || which < SKINSEG_ARTIFACT_MASK || which > SKINSEG_ARTIFACT_STAGE1) return nullptr;
  return r->artifacts[which].data();
}

size_t skinseg_result_class_map_count(const skinseg_result* r) {
  return r ? r->class_maps.size() : 0;
}

const char* skinseg_result_class_map_channel(const skinseg_result* r, size_t i) {
  return r && i < r->class_names.size() ? r->class_names[i].c_str() : nullptr;
}

const uint8_t* skinseg_result_class_map(const skinseg_result* r, size_t i) {
  return r && i < r->class_maps.size() ? r->class_maps[i].data() : nullptr;
}

double skinseg_result_stage_ms(const skinseg_result* r, skinseg_stage stage) {
  if (!r || stage < 0 || stage >= SKINSEG_STAGE_COUNT) return 0.0;
  return r->r.stage_ms[stage];
}

const char* skinseg_stage_name(skinseg_stage stage) {
  if (stage < 0 || stage >= SKINSEG_STAGE_COUNT) return "?";
  return skinseg::stage_name(static_cast<skinseg::Stage>(stage)).data();
}

skinseg_status skinseg_confusion_compute(const uint8_t* mask, uint32_t width, uint32_t height,
                                         const skinseg_image* ground_truth,
                                         skinseg_confusion* out) {
  SKINSEG_REQUIRE(mask && ground_truth && out);
  return guarded([&] {
    std::vector<std::uint8_t> v(mask, mask + static_cast<size_t>(width) * height);
    const skinseg::SkinMask m(static_cast<int>(width), static_cast<int>(height), std::move(v));
    const auto c = skinseg::confusion(m, skinseg::load_ground_truth(ground_truth->img));
    *out = {c.tp, c.fp, c.tn, c.fn};
  });
}

skinseg_metrics skinseg_metrics_compute(skinseg_confusion c) {
  const auto m = skinseg::metrics({c.tp, c.fp, c.tn, c.fn});
  return {m.precision, m.recall, m.f_score};
}

skinseg_status skinseg_report_create(skinseg_report** out) {
  SKINSEG_REQUIRE(out);
  return guarded([&] { *out = new skinseg_report{}; });
}

void skinseg_report_free(skinseg_report* rep) { delete rep; }

skinseg_status skinseg_report_add(skinseg_report* rep, const char* image_id,
                                  skinseg_confusion c) {
  SKINSEG_REQUIRE(rep && image_id);
  return guarded([&] { rep->table.add(image_id, {c.tp, c.fp, c.tn, c.fn}); });
}

size_t skinseg_report_csv(const skinseg_report* rep, char* buf, size_t capacity) {
  if (!rep) return copy_out("", buf, capacity);
  return copy_out(rep->table.to_csv(), buf, capacity);
}

skinseg_status skinseg_baseline_rule(const skinseg_image* img, skinseg_rule rule,
                                     uint8_t* out) {
  SKINSEG_REQUIRE(img && out);
  SKINSEG_REQUIRE(rule == SKINSEG_RULE_DAYLIGHT || rule == SKINSEG_RULE_FLASHLIGHT);
  return guarded([&] {
    const auto m = skinseg::kovac_mask(img->img, rule == SKINSEG_RULE_DAYLIGHT
                                                     ? skinseg::BaselineRule::Daylight
                                                     : skinseg::BaselineRule::Flashlight);
    for (size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 255 : 0;
  });
}

skinseg_status skinseg_lut_load(const char* path, skinseg_lut** out) {
  SKINSEG_REQUIRE(path && out);
  return guarded([&] { *out = new skinseg_lut{skinseg::LutModel::load(path)}; });
}

skinseg_status skinseg_lut_save(const skinseg_lut* lut, const char* path) {
  SKINSEG_REQUIRE(lut && path);
  return guarded([&] { lut->lut.save(path); });
}

void skinseg_lut_free(skinseg_lut* lut) { delete lut; }

skinseg_status skinseg_baseline_lut(const skinseg_image* img, const skinseg_lut* lut,
                                    double theta, uint8_t* out) {
  SKINSEG_REQUIRE(img && lut && out);
  return guarded([&] {
    const auto m = skinseg::lut_mask(img->img, lut->lut, theta);
    for (size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 255 : 0;
  });
}

}  // extern "C"
