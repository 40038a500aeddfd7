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

#include "stereokit/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "stereokit/bench.hpp"
#include "stereokit/costvol.hpp"
#include "stereokit/encoding.hpp"
#include "stereokit/error.hpp"
#include "stereokit/geometry.hpp"
#include "stereokit/losses.hpp"
#include "stereokit/random.hpp"
#include "stereokit/reference.hpp"
#include "stereokit/synth.hpp"

namespace stereokit {
namespace {

namespace ref = reference;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Tensor normal_tensor(const Dims& d, Sampler& rng, double scale = 1.0) {
  Tensor t(d);
  for (float& v : t.data()) v = static_cast<float>(rng.normal() * scale);
  return t;
}

std::uint32_t pick(Sampler& rng, std::uint32_t lo, std::uint32_t hi) {
  return lo + static_cast<std::uint32_t>(rng.bits() % (hi - lo + 1));
}

// Runs `body`, turning any escaped exception into a failed result.
template <typename Body>
CheckResult timed(int id, std::string name, Body&& body) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = seconds_since(start);
  return r;
}

}  // namespace

CheckResult check_multihead_oracle(const CheckOptions& opts) {
  return timed(1, "multi-head cost volume matches loop oracle", [&](CheckResult& r) {
    Sampler rng(opts.seed + 1);
    double worst = 0.0;
    const std::uint32_t head_choices[] = {1, 2, 4};
    for (int trial = 0; trial < 100; ++trial) {
      const std::uint32_t heads = head_choices[rng.bits() % 3];
      const std::uint32_t c = heads * pick(rng, 1, 32 / heads);
      const std::uint32_t d = pick(rng, 1, 8);
      const Dims dims{pick(rng, 1, 2), c, pick(rng, 1, 16), pick(rng, d + 1, 16)};
      CostVolumeConfig cfg = CostVolumeConfig::make(d, heads, rng.uniform() < 0.5);
      for (float& w : cfg.pointwise.weights) w = static_cast<float>(rng.uniform(-1.0, 1.0));
      cfg.pointwise.bias.resize(d);
      for (float& b : cfg.pointwise.bias) b = static_cast<float>(rng.uniform(-1.0, 1.0));
      const Tensor left = normal_tensor(dims, rng);
      const Tensor right = normal_tensor(dims, rng);
      const CostVolume cv = multi_head_cost_volume(left, right, cfg);
      const auto oracle = ref::multi_head_loops(left, right, cfg);
      worst = std::max(worst, ref::max_abs_diff(cv.values.data(), oracle));
    }
    r.passed = worst <= 1e-5;
    r.detail = "100 instances, max |diff| = " + fmt(worst) + " (limit 1e-05)";
  });
}

CheckResult check_lnd_fidelity(const CheckOptions& opts) {
  return timed(2, "LND approximates centred cosine", [&](CheckResult& r) {
    Sampler rng(opts.seed + 2);
    double worst_fidelity = 0.0;
    double worst_equal = 0.0;
    std::size_t pixels = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const std::uint32_t d = pick(rng, 1, 8);
      const Dims dims{1, pick(rng, 4, 32), pick(rng, 1, 16), pick(rng, d + 1, 16)};
      // Per-pixel scales spread the channel variance over several decades.
      Tensor left(dims);
      Tensor right(dims);
      for (Tensor* t : {&left, &right})
        for (std::uint32_t h = 0; h < dims.h; ++h)
          for (std::uint32_t w = 0; w < dims.w; ++w) {
            const double scale = std::pow(10.0, rng.uniform(-2.0, 0.5));
            const double offset = rng.normal();
            for (std::uint32_t c = 0; c < dims.c; ++c)
              t->at(0, c, h, w) = static_cast<float>(offset + scale * rng.normal());
          }

      // The identity holds as epsilon -> 0; 1e-8 keeps it well below the tolerance.
      const CostVolume lnd =
          cost_volume_lnd(left, right, d, LayerNormParams::identity(dims.c, 1e-8f));
      for (std::uint32_t i = 0; i < d; ++i)
        for (std::uint32_t h = 0; h < dims.h; ++h)
          for (std::uint32_t w = 0; w < dims.w; ++w) {
            const std::uint32_t src = (w + dims.w - i) % dims.w;
            const auto a = ref::pixel_vector(left, 0, h, w);
            const auto b = ref::pixel_vector(right, 0, h, src);
            if (ref::channel_variance(a) < 1e-3 || ref::channel_variance(b) < 1e-3) continue;
            const double err =
                std::abs(lnd.values.at(0, i, h, w) / dims.c - ref::centered_cosine(a, b));
            worst_fidelity = std::max(worst_fidelity, err);
            ++pixels;
          }

      CostVolumeConfig cfg = CostVolumeConfig::make(d, 1, false);
      const CostVolume mh = multi_head_cost_volume(left, right, cfg);
      const CostVolume plain = cost_volume_lnd(left, right, d, LayerNormParams::identity(dims.c));
      worst_equal = std::max(worst_equal, ref::max_abs_diff(mh.values.data(), plain.values.data()));
    }
    r.passed = worst_fidelity <= 1e-4 && worst_equal <= 1e-5 && pixels > 0;
    r.detail = std::to_string(pixels) + " pixel pairs, max |LND/C - centred cos| = " +
               fmt(worst_fidelity) + "; multihead vs LND max |diff| = " + fmt(worst_equal);
  });
}

CheckResult check_mac_algebra(const CheckOptions& opts) {
  return timed(3, "MAC counts match closed forms", [&](CheckResult& r) {
    Sampler rng(opts.seed + 3);
    int cases = 0;
    int mismatches = 0;
    for (std::uint32_t c : {1u, 4u, 8u})
      for (std::uint32_t h : {1u, 3u, 5u})
        for (std::uint32_t w : {17u, 20u, 24u})
          for (std::uint32_t d : {2u, 4u, 8u, 16u}) {
            const Dims dims{1, c, h, w};
            const Tensor left = normal_tensor(dims, rng);
            const Tensor right = normal_tensor(dims, rng);
            ref::MacCounter cos_count;
            ref::cosine_cost_volume(left, right, d, &cos_count);
            ref::MacCounter mh_count;
            ref::multi_head_loops(left, right, CostVolumeConfig::make(d, 1), nullptr, nullptr,
                                  &mh_count);
            const auto cos_formula = mac_count(CostKind::cosine, c, h, w, d, 1);
            const auto mh_formula = mac_count(CostKind::multihead, c, h, w, d, 1);
            if (cos_count.cost_volume() != cos_formula.multiply_accumulates) ++mismatches;
            if (mh_count.cost_volume() != mh_formula.multiply_accumulates) ++mismatches;
            const bool cheaper = mh_count.cost_volume() < cos_count.cost_volume();
            if (cheaper != (d > 3)) ++mismatches;
            ++cases;
          }
    // The crossover itself, from the closed forms.
    for (std::uint32_t d = 1; d <= 16; ++d) {
      const bool cheaper = mac_count(CostKind::multihead, 32, 64, 64, d, 4).multiply_accumulates <
                           mac_count(CostKind::cosine, 32, 64, 64, d, 4).multiply_accumulates;
      if (cheaper != (d > 3)) ++mismatches;
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(cases) + " shapes x d, " + std::to_string(mismatches) + " mismatches";
  });
}

CheckResult check_latency_direction(const CheckOptions& opts) {
  return timed(4, "multi-head faster than cosine", [&](CheckResult& r) {
    BenchSettings s;
    s.reps = std::max<std::uint32_t>(opts.bench_reps, 20);
    s.warmup = 3;
    const BenchShape shape{1, 32, 64, 64, 16, 4};
    const BenchReport cos = bench_operator(CostKind::cosine, shape, s);
    const BenchReport mh = bench_operator(CostKind::multihead, shape, s);
    r.passed = mh.median_ns < cos.median_ns;
    r.detail = "median cosine " + fmt(cos.median_ns / 1e6) + " ms, multihead " +
               fmt(mh.median_ns / 1e6) + " ms, speedup " + fmt(cos.median_ns / mh.median_ns) +
               "x over " + std::to_string(s.reps) + " reps";
  });
}

CheckResult check_rpe(const CheckOptions& /*opts*/) {
  return timed(5, "RPE identity, matching and demo gain", [&](CheckResult& r) {
    EncodingParams p;
    p.channels = 8;
    const auto [left_id, right_id] = rpe_map(Homography::identity(), 96, 64, p);
    const bool identical = left_id.values == right_id.values;

    SceneSpec spec = default_scene();
    spec.width = 64;
    spec.height = 64;
    spec.rig.translation = Vec3(0.1, 0.0, 0.0);  // 10 px at focal 100, depth 1
    const StereoSample sample = generate_scene(spec);
    const auto [left_pe, right_rpe] = rpe_map(sample.gt_homography, 64, 64, p);
    const EncodingMap right_pe = pe_map(64, 64, p);
    const double score_rpe = encoding_match_score(left_pe, right_rpe, sample.gt_homography);
    const double score_pe = encoding_match_score(left_pe, right_pe, sample.gt_homography);

    const SceneSpec demo_spec = misaligned_scene();
    const StereoSample demo_sample = generate_scene(demo_spec);
    const CostVolumeConfig cfg = CostVolumeConfig::make(16, 2);
    const DemoReport off = end_to_end_demo(demo_sample, cfg, DemoOptions{false});
    const DemoReport on = end_to_end_demo(demo_sample, cfg, DemoOptions{true});
    const double gain = off.mean_abs_error - on.mean_abs_error;

    // Same rig over a repetitive texture, reported for context only.
    SceneSpec checker_spec = misaligned_scene();
    checker_spec.texture = Texture::checker;
    const StereoSample checker_sample = generate_scene(checker_spec);
    const double checker_gain =
        end_to_end_demo(checker_sample, cfg, DemoOptions{false}).mean_abs_error -
        end_to_end_demo(checker_sample, cfg, DemoOptions{true}).mean_abs_error;

    r.passed = identical && score_rpe > score_pe && gain > kDemoRpeMinGain;
    r.detail = std::string("H=I maps ") + (identical ? "identical" : "differ") +
               "; match score RPE " + fmt(score_rpe) + " vs PE " + fmt(score_pe) +
               "; demo error " + fmt(off.mean_abs_error) + " -> " + fmt(on.mean_abs_error) +
               " (gain " + fmt(gain) + ", need > " + fmt(kDemoRpeMinGain) +
               "); checker texture gain " + fmt(checker_gain);
  });
}

CheckResult check_homography(const CheckOptions& opts) {
  return timed(6, "homography constructions and DLT round trip", [&](CheckResult& r) {
    const auto k = CameraIntrinsics(Mat3::Identity());
    const Mat3 from_params =
        homography_from_params(k, CameraPose::identity(), k, CameraPose::identity()).matrix();
    const Mat3 from_plane = homography_induced_by_plane(k, k, Mat3::Identity(), Vec3::Zero(),
                                                        Vec3::UnitZ(), 1.0)
                                .matrix();
    const bool exact = from_params == Mat3::Identity() && from_plane == Mat3::Identity() &&
                       Homography::identity().matrix() == Mat3::Identity();

    Sampler rng(opts.seed + 6);
    double worst_dlt = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Mat3 m = Mat3::Identity();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) += rng.normal(0.0, i == 2 ? 1e-3 : 0.1);
      m(0, 2) = rng.uniform(-20.0, 20.0);
      m(1, 2) = rng.uniform(-20.0, 20.0);
      const Homography h(m);
      const std::size_t count = 4 + rng.bits() % 17;
      std::vector<Correspondence> pts;
      for (std::size_t i = 0; i < count; ++i) {
        const Pixel q{rng.uniform(0.0, 128.0), rng.uniform(0.0, 96.0)};
        pts.push_back({q, apply_homography(h, q)});
      }
      const Homography fit = fit_homography_dlt(pts);
      worst_dlt = std::max(worst_dlt, relative_frobenius_error(fit.matrix(), h.matrix()));
    }

    double worst_rot = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Vec3 axis(rng.normal(), rng.normal(), rng.normal());
      const Mat3 rot = axis_rotation(axis, rng.uniform(-0.3, 0.3));
      const auto kl = CameraIntrinsics::from_focal(rng.uniform(80, 120), rng.uniform(80, 120),
                                                   rng.uniform(40, 80), rng.uniform(30, 60));
      const auto kr = CameraIntrinsics::from_focal(rng.uniform(80, 120), rng.uniform(80, 120),
                                                   rng.uniform(40, 80), rng.uniform(30, 60));
      const Mat3 plane =
          homography_induced_by_plane(kl, kr, rot, Vec3::Zero(), Vec3::UnitZ(), 2.0).matrix();
      const Mat3 params =
          homography_from_params(kl, CameraPose::identity(), kr, CameraPose(rot)).matrix();
      worst_rot = std::max(worst_rot, (plane - params).cwiseAbs().maxCoeff());
    }

    r.passed = exact && worst_dlt <= 1e-6 && worst_rot <= 1e-9;
    r.detail = std::string("identity constructions ") + (exact ? "exact" : "inexact") +
               "; DLT max rel. Frobenius error " + fmt(worst_dlt) +
               "; t=0 plane vs rotation form max |diff| " + fmt(worst_rot);
  });
}

CheckResult check_losses(const CheckOptions& opts) {
  return timed(7, "loss and metric identities", [&](CheckResult& r) {
    Sampler rng(opts.seed + 7);
    Tensor gt(Dims{1, 1, 48, 64});
    for (float& v : gt.data()) v = static_cast<float>(rng.uniform(1.0, 20.0));
    std::vector<std::string> failures;

    if (depth_loss(gt, gt).total != 0.0) failures.push_back("depth loss at equality");
    const Homography h(Mat3{{1.01, 0.02, 3.0}, {-0.01, 0.99, -2.0}, {1e-4, 2e-4, 1.0}});
    if (homography_loss(h, h) != 0.0) failures.push_back("homography loss at equality");

    const double lh = rng.uniform(0.1, 5.0);
    const double ld = rng.uniform(0.1, 5.0);
    if (combined_loss(lh, ld, UncertaintyParams{1.0, 1.0}) != (lh + ld) / 2.0)
      failures.push_back("combined loss at sigma = 1");

    const double delta = 0.125;
    Mat3 p11 = Mat3::Identity();
    p11(0, 0) += delta;
    Mat3 p13 = Mat3::Identity();
    p13(0, 2) += delta;
    const double ratio = homography_loss(p11, Mat3::Identity()) /
                         homography_loss(p13, Mat3::Identity());
    if (ratio != 50.0) failures.push_back("weight ratio " + fmt(ratio));

    Tensor near(gt.dims());
    Tensor far(gt.dims());
    for (std::size_t i = 0; i < gt.size(); ++i) {
      near.data()[i] = 1.04f * gt.data()[i];
      far.data()[i] = 1.10f * gt.data()[i];
    }
    const MetricsReport m_near = depth_metrics(near, gt);
    const MetricsReport m_far = depth_metrics(far, gt);
    if (m_near.d1 != 1.0) failures.push_back("D1 at 1.04 gt = " + fmt(m_near.d1));
    if (m_far.d1 != 0.0) failures.push_back("D1 at 1.10 gt = " + fmt(m_far.d1));

    r.passed = failures.empty();
    if (r.passed) {
      r.detail = "zero at equality, sigma=1 halving, weight ratio 50, D1 1.0 / 0.0";
    } else {
      for (const auto& f : failures) r.detail += (r.detail.empty() ? "" : "; ") + f;
    }
  });
}

CheckResult check_sensitivity(const CheckOptions& opts) {
  return timed(8, "match score degrades with homography noise", [&](CheckResult& r) {
    const SceneSpec spec = default_scene();
    const StereoSample sample = generate_scene(spec);
    const Homography gt = sample.gt_homography;
    const bool identity_at_zero = perturb_homography(gt, 0.0, opts.seed).matrix() == gt.matrix();

    EncodingParams p;
    p.channels = 8;
    const EncodingMap left = pe_map(spec.width, spec.height, p);
    // Noise is added in the unit-square frame so sigma is independent of image size.
    const Mat3 frame = pixel_to_unit_frame(spec.width, spec.height);
    const Homography unit = change_frame(gt, frame);

    const double sigmas[] = {0.0, 0.01, 0.05, 0.1};
    double means[4] = {};
    for (int s = 0; s < 4; ++s) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        double score = 0.0;
        try {
          const Homography noisy = perturb_homography(unit, sigmas[s], opts.seed + 100 + seed);
          const Homography back = change_frame(noisy, frame.inverse());
          const EncodingMap right = rpe_map(back, spec.width, spec.height, p).second;
          score = encoding_match_score(left, right, gt);
        } catch (const Error&) {
          score = 0.0;  // a perturbation sending the grid to infinity matches nothing
        }
        means[s] += score / 5.0;
      }
    }
    const bool monotone = means[0] >= means[1] && means[1] >= means[2] && means[2] >= means[3];
    r.passed = identity_at_zero && monotone;
    r.detail = std::string("sigma 0 ") + (identity_at_zero ? "is identity" : "changes H") +
               "; mean score " + fmt(means[0]) + ", " + fmt(means[1]) + ", " + fmt(means[2]) +
               ", " + fmt(means[3]);
  });
}

std::vector<CheckResult> run_checks(const CheckOptions& opts,
                                    const std::function<void(const CheckResult&)>& progress) {
  using CheckFn = CheckResult (*)(const CheckOptions&);
  const CheckFn checks[] = {check_multihead_oracle, check_lnd_fidelity,  check_mac_algebra,
                            check_latency_direction, check_rpe,          check_homography,
                            check_losses,            check_sensitivity};
  std::vector<CheckResult> results;
  const auto start = Clock::now();
  for (CheckFn fn : checks) {
    results.push_back(fn(opts));
    if (progress) progress(results.back());
  }
  CheckResult total;
  total.id = 9;
  total.name = "suite completes within budget";
  total.seconds = seconds_since(start);
  total.passed = total.seconds < kSuiteBudgetSeconds;
  total.detail = "checks 1-8 took " + fmt(total.seconds) + " s (limit " +
                 fmt(kSuiteBudgetSeconds) + " s)";
  results.push_back(total);
  if (progress) progress(results.back());
  return results;
}

std::string format_check_row(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " (" << std::fixed
     << std::setprecision(2) << r.seconds << " s): " << r.detail;
  return os.str();
}

std::string format_check_table(const std::vector<CheckResult>& results) {
  std::string out;
  int passed = 0;
  for (const auto& r : results) {
    out += format_check_row(r) + '\n';
    passed += r.passed;
  }
  return out + std::to_string(passed) + '/' + std::to_string(results.size()) + " checks passed\n";
}

}  // namespace stereokit
