/* C interface of the skinseg library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions that can fail return a skinseg_status;
 * on failure skinseg_last_error() describes the problem for the calling
 * thread until its next failing call. Pixel buffers are row-major, 8 bits per
 * sample; masks use 0 for "no" and 255 for "yes".
 */
#ifndef SKINSEG_H
#define SKINSEG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SKINSEG_API __declspec(dllexport)
#else
#define SKINSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum skinseg_status {
  SKINSEG_OK = 0,
  SKINSEG_ERR_INVALID_ARGUMENT = 1,
  SKINSEG_ERR_IO = 2,
  SKINSEG_ERR_EMPTY_TRAINING = 3,
  SKINSEG_ERR_MODEL_VERSION = 4,
  SKINSEG_ERR_MODEL_MALFORMED = 5,
  SKINSEG_ERR_MODEL_MISSING_PLANE = 6,
  SKINSEG_ERR_DIMENSION_MISMATCH = 7,
  SKINSEG_ERR_MALFORMED_GT = 8,
  SKINSEG_ERR_CONFIG = 9,
  SKINSEG_ERR_PRECONDITION = 10,
  SKINSEG_ERR_INTERNAL = 11
} skinseg_status;

SKINSEG_API const char *skinseg_status_name(skinseg_status status);
SKINSEG_API const char *skinseg_last_error(void);
SKINSEG_API const char *skinseg_version(void);

/* ---- images ---------------------------------------------------------- */

typedef struct skinseg_image skinseg_image;

/* Copies width*height RGB triplets. */
SKINSEG_API skinseg_status skinseg_image_create(uint32_t width, uint32_t height,
                                                const uint8_t *rgb, skinseg_image **out);
SKINSEG_API skinseg_status skinseg_image_load_png(const char *path, skinseg_image **out);
SKINSEG_API void skinseg_image_free(skinseg_image *img);
SKINSEG_API uint32_t skinseg_image_width(const skinseg_image *img);
SKINSEG_API uint32_t skinseg_image_height(const skinseg_image *img);
SKINSEG_API const uint8_t *skinseg_image_pixels(const skinseg_image *img);

SKINSEG_API skinseg_status skinseg_write_gray_png(const char *path, uint32_t width,
                                                  uint32_t height, const uint8_t *values);
SKINSEG_API skinseg_status skinseg_write_rgb_png(const char *path, uint32_t width,
                                                 uint32_t height, const uint8_t *rgb);
/* Reads a grey (or colour, converted) PNG. *values is allocated by the
 * library and must be released with skinseg_buffer_free. */
SKINSEG_API skinseg_status skinseg_read_gray_png(const char *path, uint32_t *width,
                                                 uint32_t *height, uint8_t **values);
SKINSEG_API void skinseg_buffer_free(void *buffer);

/* ---- configuration --------------------------------------------------- */

typedef struct skinseg_config skinseg_config;

SKINSEG_API skinseg_status skinseg_config_create(skinseg_config **out);
SKINSEG_API void skinseg_config_free(skinseg_config *cfg);
SKINSEG_API skinseg_status skinseg_config_set(skinseg_config *cfg, const char *key,
                                              const char *value);
SKINSEG_API skinseg_status skinseg_config_load_file(skinseg_config *cfg, const char *path);
SKINSEG_API skinseg_status skinseg_config_validate(const skinseg_config *cfg);
/* Copies the canonical key=value dump into buf (NUL-terminated, truncated to
 * capacity) and returns the full length excluding the terminator. */
SKINSEG_API size_t skinseg_config_dump(const skinseg_config *cfg, char *buf, size_t capacity);
SKINSEG_API size_t skinseg_config_get(const skinseg_config *cfg, const char *key, char *buf,
                                      size_t capacity);

/* ---- training -------------------------------------------------------- */

typedef struct skinseg_trainer skinseg_trainer;
typedef struct skinseg_model skinseg_model;
typedef struct skinseg_lut skinseg_lut;

SKINSEG_API skinseg_status skinseg_trainer_create(skinseg_trainer **out);
SKINSEG_API void skinseg_trainer_free(skinseg_trainer *tr);
/* Adds `count` RGB skin triplets. */
SKINSEG_API skinseg_status skinseg_trainer_add_rgb(skinseg_trainer *tr, const uint8_t *rgb,
                                                   size_t count);
/* Harvests the pixels a red/black/blue annotation marks as skin. */
SKINSEG_API skinseg_status skinseg_trainer_add_annotated(skinseg_trainer *tr,
                                                         const skinseg_image *img,
                                                         const skinseg_image *ground_truth);
SKINSEG_API size_t skinseg_trainer_pixel_count(const skinseg_trainer *tr);
/* Uses the train.* keys of cfg (cfg may be NULL for defaults). */
SKINSEG_API skinseg_status skinseg_trainer_build_model(const skinseg_trainer *tr,
                                                       const skinseg_config *cfg,
                                                       skinseg_model **out);
/* Uses lut.bins of cfg (cfg may be NULL). */
SKINSEG_API skinseg_status skinseg_trainer_build_lut(const skinseg_trainer *tr,
                                                     const skinseg_config *cfg,
                                                     skinseg_lut **out);

/* ---- cluster model --------------------------------------------------- */

typedef enum skinseg_plane { SKINSEG_PLANE_YCB = 0, SKINSEG_PLANE_YCR = 1, SKINSEG_PLANE_CBCR = 2 } skinseg_plane;

SKINSEG_API skinseg_status skinseg_model_load(const char *path, skinseg_model **out);
SKINSEG_API skinseg_status skinseg_model_parse(const char *text, size_t length,
                                               skinseg_model **out);
SKINSEG_API skinseg_status skinseg_model_save(const skinseg_model *m, const char *path);
SKINSEG_API void skinseg_model_free(skinseg_model *m);
/* Number of vertices of the inner (inner != 0) or outer polygon of a plane. */
SKINSEG_API size_t skinseg_model_vertex_count(const skinseg_model *m, skinseg_plane plane,
                                              int inner);
/* 0 = T1 (inside all inner polygons), 1 = T2, 2 = T3. */
SKINSEG_API int skinseg_model_classify_rgb(const skinseg_model *m, uint8_t r, uint8_t g,
                                           uint8_t b);

/* ---- segmentation ---------------------------------------------------- */

typedef struct skinseg_result skinseg_result;

typedef enum skinseg_artifact {
  SKINSEG_ARTIFACT_MASK = 0,     /* final mask, 0/255 */
  SKINSEG_ARTIFACT_TERNARY = 1,  /* 0/128/255 */
  SKINSEG_ARTIFACT_REFINED = 2,  /* refined ternary, 0/128/255 */
  SKINSEG_ARTIFACT_SEED = 3,     /* 0/255 */
  SKINSEG_ARTIFACT_EDGES = 4,    /* 0/255 */
  SKINSEG_ARTIFACT_STAGE1 = 5    /* mask after the first diffusion, 0/255 */
} skinseg_artifact;

typedef enum skinseg_stage {
  SKINSEG_STAGE_TERNARY = 0,
  SKINSEG_STAGE_REFINE = 1,
  SKINSEG_STAGE_SEED = 2,
  SKINSEG_STAGE_OTSU = 3,
  SKINSEG_STAGE_EDGES = 4,
  SKINSEG_STAGE_DIFFUSION1 = 5,
  SKINSEG_STAGE_DIFFUSION2 = 6,
  SKINSEG_STAGE_COUNT = 7
} skinseg_stage;

SKINSEG_API skinseg_status skinseg_segment(const skinseg_model *m, const skinseg_config *cfg,
                                           const skinseg_image *img, skinseg_result **out);
SKINSEG_API void skinseg_result_free(skinseg_result *r);
SKINSEG_API uint32_t skinseg_result_width(const skinseg_result *r);
SKINSEG_API uint32_t skinseg_result_height(const skinseg_result *r);
SKINSEG_API const uint8_t *skinseg_result_artifact(const skinseg_result *r,
                                                   skinseg_artifact which);
SKINSEG_API size_t skinseg_result_class_map_count(const skinseg_result *r);
SKINSEG_API const char *skinseg_result_class_map_channel(const skinseg_result *r, size_t i);
/* Labels stretched onto 0..255 (label * 255 / (k - 1)). */
SKINSEG_API const uint8_t *skinseg_result_class_map(const skinseg_result *r, size_t i);
SKINSEG_API double skinseg_result_stage_ms(const skinseg_result *r, skinseg_stage stage);
SKINSEG_API const char *skinseg_stage_name(skinseg_stage stage);

/* ---- evaluation ------------------------------------------------------ */

typedef struct skinseg_confusion {
  uint64_t tp, fp, tn, fn;
} skinseg_confusion;

typedef struct skinseg_metrics {
  double precision, recall, f_score;
} skinseg_metrics;

/* mask: width*height bytes, nonzero = skin. */
SKINSEG_API skinseg_status skinseg_confusion_compute(const uint8_t *mask, uint32_t width,
                                                     uint32_t height,
                                                     const skinseg_image *ground_truth,
                                                     skinseg_confusion *out);
SKINSEG_API skinseg_metrics skinseg_metrics_compute(skinseg_confusion c);

typedef struct skinseg_report skinseg_report;

SKINSEG_API skinseg_status skinseg_report_create(skinseg_report **out);
SKINSEG_API void skinseg_report_free(skinseg_report *rep);
SKINSEG_API skinseg_status skinseg_report_add(skinseg_report *rep, const char *image_id,
                                              skinseg_confusion c);
SKINSEG_API size_t skinseg_report_csv(const skinseg_report *rep, char *buf, size_t capacity);

/* ---- baselines ------------------------------------------------------- */

typedef enum skinseg_rule { SKINSEG_RULE_DAYLIGHT = 0, SKINSEG_RULE_FLASHLIGHT = 1 } skinseg_rule;

/* out: width*height bytes, written 0/255. */
SKINSEG_API skinseg_status skinseg_baseline_rule(const skinseg_image *img, skinseg_rule rule,
                                                 uint8_t *out);
SKINSEG_API skinseg_status skinseg_lut_load(const char *path, skinseg_lut **out);
SKINSEG_API skinseg_status skinseg_lut_save(const skinseg_lut *lut, const char *path);
SKINSEG_API void skinseg_lut_free(skinseg_lut *lut);
SKINSEG_API skinseg_status skinseg_baseline_lut(const skinseg_image *img,
                                                const skinseg_lut *lut, double theta,
                                                uint8_t *out);

#ifdef __cplusplus
}
#endif

#endif /* SKINSEG_H */
