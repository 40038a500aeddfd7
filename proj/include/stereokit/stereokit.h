/* Copyright (c) 2026 The stereokit Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

/*
 * stereokit C API.
 *
 * Every fallible call returns an sk_status; on failure a message for the
 * calling thread is available from sk_last_error() until the next call.
 * Handles are opaque and owned by the caller once returned: release tensors
 * with sk_tensor_destroy, encodings with sk_encoding_destroy and strings with
 * sk_free_string. Output handles are written only on success.
 */
#ifndef STEREOKIT_H
#define STEREOKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SK_API __declspec(dllexport)
#else
#define SK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sk_status {
  SK_OK = 0,
  SK_ERR_INVALID_ARGUMENT = 1,
  SK_ERR_SHAPE_MISMATCH = 2,
  SK_ERR_DOMAIN = 3,
  SK_ERR_DEGENERATE = 4,
  SK_ERR_IO = 5,
  SK_ERR_INTERNAL = 6
} sk_status;

typedef struct sk_tensor sk_tensor;
typedef struct sk_encoding sk_encoding;

typedef struct sk_dims {
  uint32_t n, c, h, w;
} sk_dims;

/* Row-major 3x3 matrix. */
typedef struct sk_mat3 {
  double m[9];
} sk_mat3;

typedef enum sk_cost_kind { SK_COST_COSINE = 0, SK_COST_LND = 1, SK_COST_MULTIHEAD = 2 } sk_cost_kind;

typedef enum sk_rpe_sampling { SK_RPE_INVERSE = 0, SK_RPE_FORWARD = 1 } sk_rpe_sampling;

typedef enum sk_rpe_mode { SK_RPE_OFF = 0, SK_RPE_ON = 1, SK_RPE_BOTH = 2 } sk_rpe_mode;

SK_API const char* sk_version(void);
SK_API const char* sk_last_error(void);
SK_API const char* sk_status_name(sk_status status);
SK_API void sk_free_string(char* s);

/* Caps operator-internal threads; values < 1 restore the default. */
SK_API void sk_set_threads(int threads);
SK_API int sk_get_threads(void);

/* ---- tensors ---------------------------------------------------------- */

/* `data` may be NULL for a zero tensor; otherwise it holds dims.n*c*h*w floats. */
SK_API sk_status sk_tensor_create(sk_dims dims, const float* data, sk_tensor** out);
SK_API void sk_tensor_destroy(sk_tensor* t);
SK_API sk_dims sk_tensor_dims(const sk_tensor* t);
SK_API size_t sk_tensor_size(const sk_tensor* t);
SK_API const float* sk_tensor_data(const sk_tensor* t);
SK_API sk_status sk_tensor_load(const char* path, sk_tensor** out);
SK_API sk_status sk_tensor_save(const sk_tensor* t, const char* path);
SK_API sk_status sk_image_load(const char* png_path, sk_tensor** out);
SK_API sk_status sk_image_save(const sk_tensor* t, const char* png_path);

SK_API sk_status sk_roll_horizontal(const sk_tensor* t, size_t offset, sk_tensor** out);
/* gamma and beta may be NULL for 1 and 0. */
SK_API sk_status sk_layer_norm(const sk_tensor* t, const float* gamma, const float* beta,
                               float epsilon, sk_tensor** out);
/* weights: groups*out_per_group*in_per_group values, [g][o][j]; bias may be NULL. */
SK_API sk_status sk_group_pointwise_conv(const sk_tensor* t, uint32_t groups,
                                         uint32_t in_per_group, uint32_t out_per_group,
                                         const float* weights, const float* bias,
                                         sk_tensor** out);

/* ---- cost volumes ----------------------------------------------------- */

typedef struct sk_costvol_config {
  uint32_t max_disparity;
  uint32_t head_num;
  int dot_scale;
  float epsilon;
  /* max_disparity*head_num weights, or NULL for 1/head_num each. */
  const float* pointwise_weights;
  /* max_disparity biases, or NULL for none. */
  const float* pointwise_bias;
} sk_costvol_config;

SK_API void sk_costvol_config_init(sk_costvol_config* cfg);

/* Cosine ignores heads and encodings; LND uses epsilon only. Encodings are
 * optional, multi-head only, and must be rescaled. */
SK_API sk_status sk_cost_volume(sk_cost_kind kind, const sk_tensor* left, const sk_tensor* right,
                                const sk_costvol_config* cfg, const sk_encoding* left_encoding,
                                const sk_encoding* right_encoding, sk_tensor** out);
SK_API sk_status sk_argmax_disparity(const sk_tensor* cost, sk_tensor** out);
SK_API sk_status sk_mac_count(sk_cost_kind kind, uint64_t channels, uint64_t height,
                              uint64_t width, uint64_t max_disparity, uint64_t heads,
                              uint64_t* out);

/* ---- geometry --------------------------------------------------------- */

SK_API sk_status sk_homography_from_params(const sk_mat3* k_left, const sk_mat3* m_left,
                                           const sk_mat3* k_right, const sk_mat3* m_right,
                                           sk_mat3* out);
SK_API sk_status sk_homography_from_plane(const sk_mat3* k_left, const sk_mat3* k_right,
                                          const sk_mat3* rotation, const double translation[3],
                                          const double normal[3], double plane_depth,
                                          sk_mat3* out);
SK_API sk_status sk_apply_homography(const sk_mat3* h, double x, double y, double* out_x,
                                     double* out_y);
/* left_xy and right_xy hold `count` interleaved (x, y) pairs. */
SK_API sk_status sk_fit_homography(const double* left_xy, const double* right_xy, size_t count,
                                   sk_mat3* out);
SK_API sk_status sk_perturb_homography(const sk_mat3* h, double sigma, uint64_t seed,
                                       sk_mat3* out);

/* ---- positional encodings --------------------------------------------- */

typedef struct sk_encoding_params {
  uint32_t channels;
  double frequency;
  uint32_t exponent_base; /* 0 selects `channels` */
} sk_encoding_params;

SK_API void sk_encoding_params_init(sk_encoding_params* p);
SK_API sk_status sk_pe_map(uint32_t width, uint32_t height, const sk_encoding_params* p,
                           sk_encoding** out);
SK_API sk_status sk_rpe_map(const sk_mat3* h, uint32_t width, uint32_t height,
                            const sk_encoding_params* p, sk_rpe_sampling sampling,
                            sk_encoding** left, sk_encoding** right);
SK_API sk_status sk_encoding_rescale(const sk_encoding* e, sk_encoding** out);
SK_API int sk_encoding_is_rescaled(const sk_encoding* e);
/* Copies the encoding values into a new tensor. */
SK_API sk_status sk_encoding_values(const sk_encoding* e, sk_tensor** out);
SK_API void sk_encoding_destroy(sk_encoding* e);
SK_API sk_status sk_encoding_match_score(const sk_encoding* left, const sk_encoding* right,
                                         const sk_mat3* true_map, uint32_t stride,
                                         uint32_t window_radius, double* out);

/* ---- losses and metrics ----------------------------------------------- */

typedef struct sk_metrics {
  double abs_rel;
  double abs_rel_abs;
  double d1;
  double d1_outlier;
  double rmse;
  uint64_t pixel_count;
} sk_metrics;

SK_API sk_status sk_smooth_l1(const sk_tensor* pred, const sk_tensor* gt, double beta,
                              double* out);
/* breakdown_json may be NULL. */
SK_API sk_status sk_depth_loss(const sk_tensor* pred, const sk_tensor* gt, double beta,
                               double* total, char** breakdown_json);
SK_API sk_status sk_homography_loss(const sk_mat3* pred, const sk_mat3* gt, double w,
                                    double* out);
SK_API sk_status sk_combined_loss(double l_h, double l_d, double sigma_h, double sigma_d,
                                  double* out);
/* mask may be NULL. */
SK_API sk_status sk_depth_metrics(const sk_tensor* pred, const sk_tensor* gt,
                                  const sk_tensor* mask, sk_metrics* out);

/* ---- scenes and commands ---------------------------------------------- */

/* Scene specs travel as JSON objects; keys absent from `overrides_json`
 * keep the preset's value. Presets: "default", "misaligned", "identity". */
SK_API sk_status sk_scene_spec(const char* preset, const char* overrides_json, char** spec_json);
SK_API sk_status sk_generate_scene(const char* spec_json, sk_tensor** left, sk_tensor** right,
                                   sk_tensor** gt_disparity, sk_tensor** validity,
                                   sk_mat3* gt_homography);

/* Each command returns its JSON report and writes artifacts into out_dir. */
SK_API sk_status sk_cmd_synth(const char* spec_json, const char* out_dir, char** report_json);
/* out_dir may be NULL or empty to skip writing files. */
SK_API sk_status sk_cmd_demo(const char* spec_json, uint32_t max_disparity, uint32_t heads,
                             sk_rpe_mode mode, const char* out_dir, char** report_json);
SK_API sk_status sk_cmd_simmap(const char* left_png, const char* right_png, uint32_t offset,
                               const char* out_dir, char** report_json);

typedef struct sk_bench_shape {
  uint32_t n, c, h, w, max_disparity, heads;
} sk_bench_shape;

typedef struct sk_bench_request {
  const sk_bench_shape* shapes; /* NULL with shape_count 0 selects the default grid */
  size_t shape_count;
  const sk_cost_kind* kinds; /* NULL with kind_count 0 selects all three */
  size_t kind_count;
  uint32_t reps;
  uint32_t warmup;
  int dot_scale;
  uint64_t seed;
} sk_bench_request;

SK_API void sk_bench_request_init(sk_bench_request* req);
/* json and csv may each be NULL. */
SK_API sk_status sk_cmd_bench(const sk_bench_request* req, char** json, char** csv);

typedef void (*sk_check_progress)(int id, int passed, const char* line, void* user);

/* Runs the property suite. `table` receives the full pass/fail table and
 * `all_passed` is set to 1 when every check passed. */
SK_API sk_status sk_cmd_check(uint32_t bench_reps, sk_check_progress progress, void* user,
                              char** table, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* STEREOKIT_H */
