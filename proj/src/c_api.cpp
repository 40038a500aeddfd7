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

#include "stereokit/stereokit.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "stereokit/app.hpp"
#include "stereokit/bench.hpp"
#include "stereokit/checks.hpp"
#include "stereokit/costvol.hpp"
#include "stereokit/encoding.hpp"
#include "stereokit/error.hpp"
#include "stereokit/geometry.hpp"
#include "stereokit/image_io.hpp"
#include "stereokit/losses.hpp"
#include "stereokit/parallel.hpp"
#include "stereokit/synth.hpp"
#include "stereokit/tensor.hpp"

struct sk_tensor {
  stereokit::Tensor value;
};

struct sk_encoding {
  stereokit::EncodingMap value;
};

namespace {

using namespace stereokit;

thread_local std::string g_last_error;

sk_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return SK_ERR_INVALID_ARGUMENT;
    case ErrorCode::shape_mismatch: return SK_ERR_SHAPE_MISMATCH;
    case ErrorCode::domain: return SK_ERR_DOMAIN;
    case ErrorCode::degenerate: return SK_ERR_DEGENERATE;
    case ErrorCode::io: return SK_ERR_IO;
    case ErrorCode::internal: return SK_ERR_INTERNAL;
  }
  return SK_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into status codes and the thread's
// last-error message.
template <typename Fn>
sk_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return SK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SK_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SK_ERR_INTERNAL;
  }
}

template <typename T>
void need(const T* p, const char* name) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sk_tensor* wrap(Tensor t) { return new sk_tensor{std::move(t)}; }
sk_encoding* wrap(EncodingMap m) { return new sk_encoding{std::move(m)}; }

Mat3 to_mat(const sk_mat3* m) {
  need(m, "matrix");
  Mat3 out;
  for (int i = 0; i < 9; ++i) out(i / 3, i % 3) = m->m[i];
  return out;
}

sk_mat3 from_mat(const Mat3& m) {
  sk_mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = m(i / 3, i % 3);
  return out;
}

CostKind to_kind(sk_cost_kind k) {
  switch (k) {
    case SK_COST_COSINE: return CostKind::cosine;
    case SK_COST_LND: return CostKind::lnd;
    case SK_COST_MULTIHEAD: return CostKind::multihead;
  }
  fail(ErrorCode::invalid_argument, "unknown cost volume kind " + std::to_string(int(k)));
}

EncodingParams to_params(const sk_encoding_params* p) {
  need(p, "encoding params");
  EncodingParams out;
  out.channels = p->channels;
  out.frequency = p->frequency;
  out.exponent_base = p->exponent_base;
  return out;
}

SceneSpec parse_spec(const char* spec_json) {
  need(spec_json, "spec_json");
  return scene_from_json(spec_json, default_scene());
}

}  // namespace

extern "C" {

const char* sk_version(void) { return "0.1.0"; }

const char* sk_last_error(void) { return g_last_error.c_str(); }

const char* sk_status_name(sk_status status) {
  switch (status) {
    case SK_OK: return "ok";
    case SK_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SK_ERR_SHAPE_MISMATCH: return "shape_mismatch";
    case SK_ERR_DOMAIN: return "domain";
    case SK_ERR_DEGENERATE: return "degenerate";
    case SK_ERR_IO: return "io";
    case SK_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void sk_free_string(char* s) { std::free(s); }

void sk_set_threads(int threads) { set_thread_count(threads); }
int sk_get_threads(void) { return thread_count(); }

sk_status sk_tensor_create(sk_dims dims, const float* data, sk_tensor** out) {
  return guarded([&] {
    need(out, "out");
    const Dims d{dims.n, dims.c, dims.h, dims.w};
    validate_dims(d);
    if (data == nullptr) {
      *out = wrap(Tensor(d));
    } else {
      *out = wrap(Tensor(d, std::vector<float>(data, data + d.count())));
    }
  });
}

void sk_tensor_destroy(sk_tensor* t) { delete t; }

sk_dims sk_tensor_dims(const sk_tensor* t) {
  if (!t) return sk_dims{0, 0, 0, 0};
  const Dims& d = t->value.dims();
  return sk_dims{d.n, d.c, d.h, d.w};
}

size_t sk_tensor_size(const sk_tensor* t) { return t ? t->value.size() : 0; }

const float* sk_tensor_data(const sk_tensor* t) { return t ? t->value.data().data() : nullptr; }

sk_status sk_tensor_load(const char* path, sk_tensor** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = wrap(load_sten(path));
  });
}

sk_status sk_tensor_save(const sk_tensor* t, const char* path) {
  return guarded([&] {
    need(t, "tensor");
    need(path, "path");
    save_sten(path, t->value);
  });
}

sk_status sk_image_load(const char* png_path, sk_tensor** out) {
  return guarded([&] {
    need(png_path, "png_path");
    need(out, "out");
    *out = wrap(load_png(png_path));
  });
}

sk_status sk_image_save(const sk_tensor* t, const char* png_path) {
  return guarded([&] {
    need(t, "tensor");
    need(png_path, "png_path");
    save_png(png_path, t->value);
  });
}

sk_status sk_roll_horizontal(const sk_tensor* t, size_t offset, sk_tensor** out) {
  return guarded([&] {
    need(t, "tensor");
    need(out, "out");
    *out = wrap(roll_horizontal(t->value, offset));
  });
}

sk_status sk_layer_norm(const sk_tensor* t, const float* gamma, const float* beta, float epsilon,
                        sk_tensor** out) {
  return guarded([&] {
    need(t, "tensor");
    need(out, "out");
    const std::uint32_t c = t->value.dims().c;
    LayerNormParams p = LayerNormParams::identity(c, epsilon);
    if (gamma) p.gamma.assign(gamma, gamma + c);
    if (beta) p.beta.assign(beta, beta + c);
    *out = wrap(layer_norm_channel(t->value, p));
  });
}

sk_status sk_group_pointwise_conv(const sk_tensor* t, uint32_t groups, uint32_t in_per_group,
                                  uint32_t out_per_group, const float* weights, const float* bias,
                                  sk_tensor** out) {
  return guarded([&] {
    need(t, "tensor");
    need(weights, "weights");
    need(out, "out");
    GroupConvWeights w = GroupConvWeights::uniform(groups, in_per_group, out_per_group, 0.0f);
    std::copy(weights, weights + w.weights.size(), w.weights.begin());
    if (bias) w.bias.assign(bias, bias + std::size_t{groups} * out_per_group);
    *out = wrap(group_pointwise_conv(t->value, w));
  });
}

void sk_costvol_config_init(sk_costvol_config* cfg) {
  if (!cfg) return;
  *cfg = sk_costvol_config{1, 1, 1, 1e-5f, nullptr, nullptr};
}

sk_status sk_cost_volume(sk_cost_kind kind, const sk_tensor* left, const sk_tensor* right,
                         const sk_costvol_config* cfg, const sk_encoding* left_encoding,
                         const sk_encoding* right_encoding, sk_tensor** out) {
  return guarded([&] {
    need(left, "left");
    need(right, "right");
    need(cfg, "config");
    need(out, "out");
    const CostKind k = to_kind(kind);
    require((left_encoding == nullptr) == (right_encoding == nullptr),
            ErrorCode::invalid_argument, "pass both encodings or neither");
    require(left_encoding == nullptr || k == CostKind::multihead, ErrorCode::invalid_argument,
            "encodings apply to the multi-head cost volume only");
    switch (k) {
      case CostKind::cosine:
        *out = wrap(cost_volume_cosine(left->value, right->value, cfg->max_disparity).values);
        return;
      case CostKind::lnd:
        *out = wrap(cost_volume_lnd(left->value, right->value, cfg->max_disparity,
                                    LayerNormParams::identity(left->value.dims().c, cfg->epsilon))
                        .values);
        return;
      case CostKind::multihead: break;
    }
    CostVolumeConfig c =
        CostVolumeConfig::make(cfg->max_disparity, cfg->head_num, cfg->dot_scale != 0, cfg->epsilon);
    if (cfg->pointwise_weights)
      c.pointwise.weights.assign(cfg->pointwise_weights,
                                 cfg->pointwise_weights + c.pointwise.weights.size());
    if (cfg->pointwise_bias)
      c.pointwise.bias.assign(cfg->pointwise_bias, cfg->pointwise_bias + cfg->max_disparity);
    std::optional<EncodingInjection> rpe;
    if (left_encoding) {
      require(left_encoding->value.range == EncodingRange::rescaled &&
                  right_encoding->value.range == EncodingRange::rescaled,
              ErrorCode::invalid_argument, "encodings must be rescaled before injection");
      rpe.emplace(EncodingInjection{left_encoding->value.values, right_encoding->value.values});
    }
    *out = wrap(multi_head_cost_volume(left->value, right->value, c, rpe).values);
  });
}

sk_status sk_argmax_disparity(const sk_tensor* cost, sk_tensor** out) {
  return guarded([&] {
    need(cost, "cost");
    need(out, "out");
    *out = wrap(argmax_disparity(CostVolume{cost->value, CostKind::multihead}));
  });
}

sk_status sk_mac_count(sk_cost_kind kind, uint64_t channels, uint64_t height, uint64_t width,
                       uint64_t max_disparity, uint64_t heads, uint64_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = mac_count(to_kind(kind), channels, height, width, max_disparity, heads)
               .multiply_accumulates;
  });
}

sk_status sk_homography_from_params(const sk_mat3* k_left, const sk_mat3* m_left,
                                    const sk_mat3* k_right, const sk_mat3* m_right,
                                    sk_mat3* out) {
  return guarded([&] {
    need(out, "out");
    *out = from_mat(homography_from_params(CameraIntrinsics(to_mat(k_left)),
                                           CameraPose(to_mat(m_left)),
                                           CameraIntrinsics(to_mat(k_right)),
                                           CameraPose(to_mat(m_right)))
                        .matrix());
  });
}

sk_status sk_homography_from_plane(const sk_mat3* k_left, const sk_mat3* k_right,
                                   const sk_mat3* rotation, const double translation[3],
                                   const double normal[3], double plane_depth, sk_mat3* out) {
  return guarded([&] {
    need(translation, "translation");
    need(normal, "normal");
    need(out, "out");
    *out = from_mat(homography_induced_by_plane(
                        CameraIntrinsics(to_mat(k_left)), CameraIntrinsics(to_mat(k_right)),
                        to_mat(rotation), Vec3(translation[0], translation[1], translation[2]),
                        Vec3(normal[0], normal[1], normal[2]), plane_depth)
                        .matrix());
  });
}

sk_status sk_apply_homography(const sk_mat3* h, double x, double y, double* out_x,
                              double* out_y) {
  return guarded([&] {
    need(out_x, "out_x");
    need(out_y, "out_y");
    const Pixel p = apply_homography(Homography(to_mat(h)), Pixel{x, y});
    *out_x = p.x;
    *out_y = p.y;
  });
}

sk_status sk_fit_homography(const double* left_xy, const double* right_xy, size_t count,
                            sk_mat3* out) {
  return guarded([&] {
    need(left_xy, "left_xy");
    need(right_xy, "right_xy");
    need(out, "out");
    std::vector<Correspondence> pts(count);
    for (size_t i = 0; i < count; ++i) {
      pts[i] = Correspondence{Pixel{left_xy[2 * i], left_xy[2 * i + 1]},
                              Pixel{right_xy[2 * i], right_xy[2 * i + 1]}};
    }
    *out = from_mat(fit_homography_dlt(pts).matrix());
  });
}

sk_status sk_perturb_homography(const sk_mat3* h, double sigma, uint64_t seed, sk_mat3* out) {
  return guarded([&] {
    need(out, "out");
    *out = from_mat(perturb_homography(Homography(to_mat(h)), sigma, seed).matrix());
  });
}

void sk_encoding_params_init(sk_encoding_params* p) {
  if (!p) return;
  *p = sk_encoding_params{8, 200.0, 0};
}

sk_status sk_pe_map(uint32_t width, uint32_t height, const sk_encoding_params* p,
                    sk_encoding** out) {
  return guarded([&] {
    need(out, "out");
    *out = wrap(pe_map(width, height, to_params(p)));
  });
}

sk_status sk_rpe_map(const sk_mat3* h, uint32_t width, uint32_t height,
                     const sk_encoding_params* p, sk_rpe_sampling sampling, sk_encoding** left,
                     sk_encoding** right) {
  return guarded([&] {
    need(left, "left");
    need(right, "right");
    require(sampling == SK_RPE_INVERSE || sampling == SK_RPE_FORWARD,
            ErrorCode::invalid_argument, "unknown RPE sampling mode");
    auto maps = rpe_map(Homography(to_mat(h)), width, height, to_params(p),
                        sampling == SK_RPE_FORWARD ? RpeSampling::forward : RpeSampling::inverse);
    sk_encoding* l = wrap(std::move(maps.first));
    *right = wrap(std::move(maps.second));
    *left = l;
  });
}

sk_status sk_encoding_rescale(const sk_encoding* e, sk_encoding** out) {
  return guarded([&] {
    need(e, "encoding");
    need(out, "out");
    *out = wrap(rescale_encoding(e->value));
  });
}

int sk_encoding_is_rescaled(const sk_encoding* e) {
  return e && e->value.range == EncodingRange::rescaled ? 1 : 0;
}

sk_status sk_encoding_values(const sk_encoding* e, sk_tensor** out) {
  return guarded([&] {
    need(e, "encoding");
    need(out, "out");
    *out = wrap(e->value.values);
  });
}

void sk_encoding_destroy(sk_encoding* e) { delete e; }

sk_status sk_encoding_match_score(const sk_encoding* left, const sk_encoding* right,
                                  const sk_mat3* true_map, uint32_t stride,
                                  uint32_t window_radius, double* out) {
  return guarded([&] {
    need(left, "left");
    need(right, "right");
    need(out, "out");
    *out = encoding_match_score(left->value, right->value, Homography(to_mat(true_map)),
                                MatchScoreOptions{stride, window_radius});
  });
}

sk_status sk_smooth_l1(const sk_tensor* pred, const sk_tensor* gt, double beta, double* out) {
  return guarded([&] {
    need(pred, "pred");
    need(gt, "gt");
    need(out, "out");
    *out = smooth_l1(pred->value, gt->value, beta);
  });
}

sk_status sk_depth_loss(const sk_tensor* pred, const sk_tensor* gt, double beta, double* total,
                        char** breakdown_json) {
  return guarded([&] {
    need(pred, "pred");
    need(gt, "gt");
    need(total, "total");
    const LossBreakdown b = depth_loss(pred->value, gt->value, beta);
    if (breakdown_json) *breakdown_json = dup_string(to_json(b));
    *total = b.total;
  });
}

sk_status sk_homography_loss(const sk_mat3* pred, const sk_mat3* gt, double w, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = homography_loss(to_mat(pred), to_mat(gt), w);
  });
}

sk_status sk_combined_loss(double l_h, double l_d, double sigma_h, double sigma_d, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = combined_loss(l_h, l_d, UncertaintyParams{sigma_h, sigma_d});
  });
}

sk_status sk_depth_metrics(const sk_tensor* pred, const sk_tensor* gt, const sk_tensor* mask,
                           sk_metrics* out) {
  return guarded([&] {
    need(pred, "pred");
    need(gt, "gt");
    need(out, "out");
    const MetricsReport m = depth_metrics(pred->value, gt->value, mask ? &mask->value : nullptr);
    *out = sk_metrics{m.abs_rel, m.abs_rel_abs, m.d1, m.d1_outlier, m.rmse, m.pixel_count};
  });
}

sk_status sk_scene_spec(const char* preset, const char* overrides_json, char** spec_json) {
  return guarded([&] {
    need(spec_json, "spec_json");
    SceneSpec s = scene_preset(preset ? preset : "default");
    if (overrides_json && *overrides_json) s = scene_from_json(overrides_json, s);
    *spec_json = dup_string(scene_to_json(s));
  });
}

sk_status sk_generate_scene(const char* spec_json, sk_tensor** left, sk_tensor** right,
                            sk_tensor** gt_disparity, sk_tensor** validity,
                            sk_mat3* gt_homography) {
  return guarded([&] {
    need(left, "left");
    need(right, "right");
    need(gt_disparity, "gt_disparity");
    need(validity, "validity");
    need(gt_homography, "gt_homography");
    StereoSample s = generate_scene(parse_spec(spec_json));
    sk_tensor* l = wrap(std::move(s.left));
    sk_tensor* r = wrap(std::move(s.right));
    sk_tensor* d = wrap(std::move(s.gt_disparity));
    *validity = wrap(std::move(s.validity));
    *left = l;
    *right = r;
    *gt_disparity = d;
    *gt_homography = from_mat(s.gt_homography.matrix());
  });
}

sk_status sk_cmd_synth(const char* spec_json, const char* out_dir, char** report_json) {
  return guarded([&] {
    need(out_dir, "out_dir");
    const CommandOutput out = run_synth(parse_spec(spec_json), out_dir);
    if (report_json) *report_json = dup_string(out.report_json);
  });
}

sk_status sk_cmd_demo(const char* spec_json, uint32_t max_disparity, uint32_t heads,
                      sk_rpe_mode mode, const char* out_dir, char** report_json) {
  return guarded([&] {
    DemoRequest req;
    req.spec = spec_json ? scene_from_json(spec_json, misaligned_scene()) : misaligned_scene();
    req.max_disparity = max_disparity;
    req.heads = heads;
    switch (mode) {
      case SK_RPE_OFF: req.mode = RpeMode::off; break;
      case SK_RPE_ON: req.mode = RpeMode::on; break;
      case SK_RPE_BOTH: req.mode = RpeMode::both; break;
      default: fail(ErrorCode::invalid_argument, "unknown RPE mode");
    }
    const CommandOutput out = run_demo(req, out_dir ? out_dir : "");
    if (report_json) *report_json = dup_string(out.report_json);
  });
}

sk_status sk_cmd_simmap(const char* left_png, const char* right_png, uint32_t offset,
                        const char* out_dir, char** report_json) {
  return guarded([&] {
    need(left_png, "left_png");
    need(right_png, "right_png");
    need(out_dir, "out_dir");
    const CommandOutput out = run_simmap(left_png, right_png, offset, out_dir);
    if (report_json) *report_json = dup_string(out.report_json);
  });
}

void sk_bench_request_init(sk_bench_request* req) {
  if (!req) return;
  const BenchSettings s;
  *req = sk_bench_request{nullptr, 0, nullptr, 0, s.reps, s.warmup, s.dot_scale ? 1 : 0, s.seed};
}

sk_status sk_cmd_bench(const sk_bench_request* req, char** json, char** csv) {
  return guarded([&] {
    need(req, "request");
    std::vector<BenchShape> grid;
    if (req->shape_count == 0) {
      grid = default_bench_grid();
    } else {
      need(req->shapes, "shapes");
      for (size_t i = 0; i < req->shape_count; ++i) {
        const sk_bench_shape& s = req->shapes[i];
        grid.push_back(BenchShape{s.n, s.c, s.h, s.w, s.max_disparity, s.heads});
      }
    }
    std::vector<CostKind> kinds;
    if (req->kind_count == 0) {
      kinds = {CostKind::cosine, CostKind::lnd, CostKind::multihead};
    } else {
      need(req->kinds, "kinds");
      for (size_t i = 0; i < req->kind_count; ++i) kinds.push_back(to_kind(req->kinds[i]));
    }
    BenchSettings settings;
    settings.reps = req->reps;
    settings.warmup = req->warmup;
    settings.dot_scale = req->dot_scale != 0;
    settings.seed = req->seed;
    const auto reports = bench_sweep(grid, kinds, settings);
    char* j = json ? dup_string(bench_to_json(reports)) : nullptr;
    if (csv) *csv = dup_string(bench_to_csv(reports));
    if (json) *json = j;
  });
}

sk_status sk_cmd_check(uint32_t bench_reps, sk_check_progress progress, void* user, char** table,
                       int* all_passed) {
  return guarded([&] {
    CheckOptions opts;
    if (bench_reps > 0) opts.bench_reps = bench_reps;
    auto on_result = [&](const CheckResult& r) {
      if (progress) progress(r.id, r.passed ? 1 : 0, format_check_row(r).c_str(), user);
    };
    const auto results = run_checks(opts, on_result);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.passed;
    if (all_passed) *all_passed = ok ? 1 : 0;
    if (table) *table = dup_string(format_check_table(results));
  });
}

}  // extern "C"
