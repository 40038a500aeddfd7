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

/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "stereokit/stereokit.h"

static int failures = 0;
static int checks = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    ++checks;                                                         \
    if (!(cond)) {                                                    \
      ++failures;                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
    }                                                                 \
  } while (0)

#define EXPECT_OK(call) EXPECT((call) == SK_OK)

static sk_mat3 identity(void) {
  sk_mat3 m = {{1, 0, 0, 0, 1, 0, 0, 0, 1}};
  return m;
}

static void test_basics(void) {
  EXPECT(strlen(sk_version()) > 0);
  EXPECT(strcmp(sk_status_name(SK_ERR_SHAPE_MISMATCH), "shape_mismatch") == 0);
  sk_set_threads(2);
  EXPECT(sk_get_threads() == 2);
  sk_set_threads(0);
  EXPECT(sk_get_threads() >= 1);
}

static void test_tensors(void) {
  const float row[4] = {1, 2, 3, 4};
  sk_dims d = {1, 1, 1, 4};
  sk_tensor* t = NULL;
  sk_tensor* r = NULL;
  EXPECT_OK(sk_tensor_create(d, row, &t));
  EXPECT(sk_tensor_size(t) == 4);
  EXPECT_OK(sk_roll_horizontal(t, 1, &r));
  const float* v = sk_tensor_data(r);
  EXPECT(v[0] == 4 && v[1] == 1 && v[2] == 2 && v[3] == 3);
  sk_tensor_destroy(r);

  sk_dims bad = {1, 0, 1, 1};
  sk_tensor* none = NULL;
  EXPECT(sk_tensor_create(bad, NULL, &none) == SK_ERR_INVALID_ARGUMENT);
  EXPECT(none == NULL);
  EXPECT(strlen(sk_last_error()) > 0);
  EXPECT(sk_tensor_create(d, row, NULL) == SK_ERR_INVALID_ARGUMENT);

  const float pair[2] = {1, -1};
  sk_dims two = {1, 2, 1, 1};
  sk_tensor* p = NULL;
  sk_tensor* n = NULL;
  EXPECT_OK(sk_tensor_create(two, pair, &p));
  EXPECT_OK(sk_layer_norm(p, NULL, NULL, 1e-12f, &n));
  EXPECT(fabsf(sk_tensor_data(n)[0] - 1.0f) < 1e-5f);
  sk_tensor_destroy(n);

  const float w[2] = {0.5f, 0.5f};
  sk_tensor* g = NULL;
  EXPECT_OK(sk_group_pointwise_conv(p, 1, 2, 1, w, NULL, &g));
  EXPECT(sk_tensor_data(g)[0] == 0.0f);
  sk_tensor_destroy(g);
  EXPECT(sk_group_pointwise_conv(p, 2, 2, 1, w, NULL, &g) == SK_ERR_SHAPE_MISMATCH);

  const char* path = "c_api_roundtrip.sten";
  sk_tensor* back = NULL;
  EXPECT_OK(sk_tensor_save(t, path));
  EXPECT_OK(sk_tensor_load(path, &back));
  EXPECT(memcmp(sk_tensor_data(back), row, sizeof row) == 0);
  remove(path);
  EXPECT(sk_tensor_load("does/not/exist.sten", &back) == SK_ERR_IO);
  sk_tensor_destroy(back);
  sk_tensor_destroy(p);
  sk_tensor_destroy(t);
  sk_tensor_destroy(NULL);
}

static void test_cost_volumes(void) {
  enum { C = 8, H = 3, W = 10, D = 4 };
  float left[C * H * W];
  float right[C * H * W];
  unsigned state = 12345u;
  for (int i = 0; i < C * H * W; ++i) {
    state = state * 1103515245u + 12345u;
    left[i] = (float)((state >> 8) % 1000) / 1000.0f;
    state = state * 1103515245u + 12345u;
    right[i] = (float)((state >> 8) % 1000) / 1000.0f;
  }
  sk_dims d = {1, C, H, W};
  sk_tensor* l = NULL;
  sk_tensor* r = NULL;
  EXPECT_OK(sk_tensor_create(d, left, &l));
  EXPECT_OK(sk_tensor_create(d, right, &r));

  sk_costvol_config cfg;
  sk_costvol_config_init(&cfg);
  cfg.max_disparity = D;
  cfg.head_num = 1;
  cfg.dot_scale = 0;
  sk_tensor* mh = NULL;
  sk_tensor* lnd = NULL;
  sk_tensor* cos = NULL;
  EXPECT_OK(sk_cost_volume(SK_COST_MULTIHEAD, l, r, &cfg, NULL, NULL, &mh));
  EXPECT_OK(sk_cost_volume(SK_COST_LND, l, r, &cfg, NULL, NULL, &lnd));
  EXPECT_OK(sk_cost_volume(SK_COST_COSINE, l, r, &cfg, NULL, NULL, &cos));
  sk_dims out = sk_tensor_dims(mh);
  EXPECT(out.n == 1 && out.c == D && out.h == H && out.w == W);
  float worst = 0.0f;
  for (size_t i = 0; i < sk_tensor_size(mh); ++i) {
    const float diff = fabsf(sk_tensor_data(mh)[i] - sk_tensor_data(lnd)[i]);
    if (diff > worst) worst = diff;
  }
  EXPECT(worst <= 1e-5f);
  for (size_t i = 0; i < sk_tensor_size(cos); ++i) {
    EXPECT(fabsf(sk_tensor_data(cos)[i]) <= 1.0f + 1e-6f);
  }

  sk_tensor* arg = NULL;
  EXPECT_OK(sk_argmax_disparity(cos, &arg));
  EXPECT(sk_tensor_dims(arg).c == 1);
  sk_tensor_destroy(arg);

  cfg.head_num = 3;
  sk_tensor* none = NULL;
  EXPECT(sk_cost_volume(SK_COST_MULTIHEAD, l, r, &cfg, NULL, NULL, &none) != SK_OK);
  EXPECT(none == NULL);

  /* Rescaled identity encodings inject without error; raw ones are refused. */
  cfg.head_num = 2;
  sk_encoding_params ep;
  sk_encoding_params_init(&ep);
  EXPECT(ep.channels == 8 && ep.frequency == 200.0);
  sk_mat3 id = identity();
  sk_encoding* le = NULL;
  sk_encoding* re = NULL;
  sk_encoding* ls = NULL;
  sk_encoding* rs = NULL;
  EXPECT_OK(sk_rpe_map(&id, W, H, &ep, SK_RPE_INVERSE, &le, &re));
  EXPECT(sk_cost_volume(SK_COST_MULTIHEAD, l, r, &cfg, le, re, &none) == SK_ERR_INVALID_ARGUMENT);
  EXPECT_OK(sk_encoding_rescale(le, &ls));
  EXPECT_OK(sk_encoding_rescale(re, &rs));
  EXPECT(sk_encoding_is_rescaled(ls) == 1);
  EXPECT(sk_encoding_is_rescaled(le) == 0);
  sk_tensor* with = NULL;
  EXPECT_OK(sk_cost_volume(SK_COST_MULTIHEAD, l, r, &cfg, ls, rs, &with));
  sk_tensor_destroy(with);
  sk_encoding_destroy(le);
  sk_encoding_destroy(re);
  sk_encoding_destroy(ls);
  sk_encoding_destroy(rs);

  uint64_t macs = 0;
  EXPECT_OK(sk_mac_count(SK_COST_COSINE, 64, 4, 4, 8, 1, &macs));
  EXPECT(macs == 24576);
  EXPECT_OK(sk_mac_count(SK_COST_MULTIHEAD, 64, 4, 4, 8, 4, &macs));
  EXPECT(macs == 14336);

  sk_tensor_destroy(mh);
  sk_tensor_destroy(lnd);
  sk_tensor_destroy(cos);
  sk_tensor_destroy(l);
  sk_tensor_destroy(r);
}

static void test_geometry_and_encoding(void) {
  sk_mat3 id = identity();
  sk_mat3 h;
  EXPECT_OK(sk_homography_from_params(&id, &id, &id, &id, &h));
  EXPECT(memcmp(&h, &id, sizeof h) == 0);

  double x = 0, y = 0;
  sk_mat3 shift = {{1, 0, 3, 0, 1, -2, 0, 0, 1}};
  EXPECT_OK(sk_apply_homography(&shift, 1.0, 1.0, &x, &y));
  EXPECT(fabs(x - 4.0) < 1e-12 && fabs(y + 1.0) < 1e-12);

  double lxy[16], rxy[16];
  const double pts[8][2] = {{0, 0}, {50, 3}, {90, 70}, {10, 80}, {40, 40}, {70, 20}, {20, 60}, {5, 33}};
  for (int i = 0; i < 8; ++i) {
    lxy[2 * i] = pts[i][0];
    lxy[2 * i + 1] = pts[i][1];
    EXPECT_OK(sk_apply_homography(&shift, pts[i][0], pts[i][1], &rxy[2 * i], &rxy[2 * i + 1]));
  }
  sk_mat3 fit;
  EXPECT_OK(sk_fit_homography(lxy, rxy, 8, &fit));
  for (int i = 0; i < 9; ++i) EXPECT(fabs(fit.m[i] - shift.m[i]) < 1e-6);
  EXPECT(sk_fit_homography(lxy, rxy, 3, &fit) == SK_ERR_INVALID_ARGUMENT);

  sk_mat3 p0, p1, p2;
  EXPECT_OK(sk_perturb_homography(&shift, 0.0, 1, &p0));
  EXPECT(memcmp(&p0, &shift, sizeof p0) == 0);
  EXPECT_OK(sk_perturb_homography(&shift, 0.1, 1, &p1));
  EXPECT_OK(sk_perturb_homography(&shift, 0.1, 1, &p2));
  EXPECT(memcmp(&p1, &p2, sizeof p1) == 0);
  EXPECT(sk_perturb_homography(&shift, -1.0, 1, &p2) == SK_ERR_INVALID_ARGUMENT);

  const double t[3] = {0.1, 0, 0};
  const double n[3] = {0, 0, 1};
  EXPECT_OK(sk_homography_from_plane(&id, &id, &id, t, n, 2.0, &h));
  EXPECT(fabs(h.m[2] + 0.05) < 1e-12);
  EXPECT(sk_homography_from_plane(&id, &id, &id, t, n, 0.0, &h) != SK_OK);

  sk_encoding_params ep;
  sk_encoding_params_init(&ep);
  sk_encoding* le = NULL;
  sk_encoding* re = NULL;
  sk_tensor* lv = NULL;
  sk_tensor* rv = NULL;
  EXPECT_OK(sk_rpe_map(&id, 32, 24, &ep, SK_RPE_INVERSE, &le, &re));
  EXPECT_OK(sk_encoding_values(le, &lv));
  EXPECT_OK(sk_encoding_values(re, &rv));
  EXPECT(memcmp(sk_tensor_data(lv), sk_tensor_data(rv), sk_tensor_size(lv) * sizeof(float)) == 0);
  double score = 0.0;
  EXPECT_OK(sk_encoding_match_score(le, re, &id, 4, 16, &score));
  EXPECT(score == 1.0);
  sk_encoding* pe = NULL;
  EXPECT_OK(sk_pe_map(32, 24, &ep, &pe));
  sk_encoding_destroy(pe);
  sk_tensor_destroy(lv);
  sk_tensor_destroy(rv);
  sk_encoding_destroy(le);
  sk_encoding_destroy(re);
  ep.channels = 6;
  EXPECT(sk_pe_map(32, 24, &ep, &pe) == SK_ERR_INVALID_ARGUMENT);
}

static void test_losses(void) {
  sk_dims d = {1, 1, 8, 8};
  float gt[64], pred[64];
  for (int i = 0; i < 64; ++i) {
    gt[i] = 1.0f + (float)(i % 7) * 0.25f;
    pred[i] = gt[i] * 1.04f;
  }
  sk_tensor* g = NULL;
  sk_tensor* p = NULL;
  EXPECT_OK(sk_tensor_create(d, gt, &g));
  EXPECT_OK(sk_tensor_create(d, pred, &p));
  double v = -1;
  EXPECT_OK(sk_smooth_l1(g, g, 1.0, &v));
  EXPECT(v == 0.0);
  char* json = NULL;
  EXPECT_OK(sk_depth_loss(g, g, 1.0, &v, &json));
  EXPECT(v == 0.0);
  EXPECT(json != NULL && strstr(json, "base_smooth_l1") != NULL);
  sk_free_string(json);
  EXPECT_OK(sk_depth_loss(p, g, 1.0, &v, NULL));
  EXPECT(v > 0.0);

  sk_metrics m;
  EXPECT_OK(sk_depth_metrics(p, g, NULL, &m));
  EXPECT(m.d1 == 1.0);
  EXPECT(fabs(m.abs_rel - 0.04) < 1e-5);
  EXPECT(m.pixel_count == 64);

  sk_mat3 a = identity(), b = identity();
  b.m[0] += 0.125;
  EXPECT_OK(sk_homography_loss(&b, &a, 50.0, &v));
  EXPECT(fabs(v - 6.25) < 1e-12);
  EXPECT_OK(sk_combined_loss(0.5, 1.5, 1.0, 1.0, &v));
  EXPECT(v == 1.0);
  EXPECT(sk_combined_loss(0.5, 1.5, 0.0, 1.0, &v) == SK_ERR_INVALID_ARGUMENT);
  sk_tensor_destroy(g);
  sk_tensor_destroy(p);
}

static void test_scenes_and_commands(void) {
  char* spec = NULL;
  EXPECT_OK(sk_scene_spec("identity", "{\"width\": 48, \"height\": 32}", &spec));
  EXPECT(spec != NULL && strstr(spec, "\"width\": 48") != NULL);
  sk_tensor *l = NULL, *r = NULL, *disp = NULL, *valid = NULL;
  sk_mat3 h;
  EXPECT_OK(sk_generate_scene(spec, &l, &r, &disp, &valid, &h));
  EXPECT(memcmp(sk_tensor_data(l), sk_tensor_data(r), sk_tensor_size(l) * sizeof(float)) == 0);
  EXPECT(sk_tensor_dims(l).w == 48);
  sk_tensor_destroy(l);
  sk_tensor_destroy(r);
  sk_tensor_destroy(disp);
  sk_tensor_destroy(valid);

  char* report = NULL;
  EXPECT_OK(sk_cmd_demo(spec, 16, 2, SK_RPE_BOTH, NULL, &report));
  EXPECT(report != NULL && strstr(report, "rpe_gain") != NULL);
  sk_free_string(report);
  sk_free_string(spec);

  char* bad = NULL;
  EXPECT(sk_scene_spec("studio", NULL, &bad) == SK_ERR_INVALID_ARGUMENT);
  EXPECT(sk_scene_spec("default", "{\"texture\": \"plaid\"}", &bad) == SK_ERR_INVALID_ARGUMENT);
  EXPECT(strstr(sk_last_error(), "checker") != NULL);

  sk_bench_request req;
  sk_bench_request_init(&req);
  sk_bench_shape shape = {1, 8, 8, 16, 4, 2};
  sk_cost_kind kinds[2] = {SK_COST_COSINE, SK_COST_MULTIHEAD};
  req.shapes = &shape;
  req.shape_count = 1;
  req.kinds = kinds;
  req.kind_count = 2;
  req.reps = 3;
  char* json = NULL;
  char* csv = NULL;
  EXPECT_OK(sk_cmd_bench(&req, &json, &csv));
  EXPECT(json != NULL && strstr(json, "\"cost_volume_multihead\"") != NULL);
  EXPECT(csv != NULL && strncmp(csv, "operator,", 9) == 0);
  sk_free_string(json);
  sk_free_string(csv);
  req.reps = 0;
  EXPECT(sk_cmd_bench(&req, &json, NULL) == SK_ERR_INVALID_ARGUMENT);

  char* simmap = NULL;
  EXPECT(sk_cmd_simmap("missing_left.png", "missing_right.png", 2, "c_api_simmap_out", &simmap) ==
         SK_ERR_IO);
  EXPECT(simmap == NULL);
}

int main(void) {
  test_basics();
  test_tensors();
  test_cost_volumes();
  test_geometry_and_encoding();
  test_losses();
  test_scenes_and_commands();
  printf("%d checks, %d failures\n", checks, failures);
  return failures == 0 ? 0 : 1;
}
