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

#include "stereokit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stereokit::reference {

Tensor roll_stepwise(const Tensor& t, std::size_t offset) {
  Tensor cur = t;
  const Dims d = t.dims();
  for (std::size_t step = 0; step < offset; ++step) {
    Tensor next(d);
    for (std::uint32_t n = 0; n < d.n; ++n)
      for (std::uint32_t c = 0; c < d.c; ++c)
        for (std::uint32_t h = 0; h < d.h; ++h)
          for (std::uint32_t w = 0; w < d.w; ++w) {
            const std::uint32_t src = w == 0 ? d.w - 1 : w - 1;
            next.at(n, c, h, w) = cur.at(n, c, h, src);
          }
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> layer_norm_vector(std::span<const double> x, std::span<const float> gamma,
                                      std::span<const float> beta, double epsilon,
                                      MacCounter* counter) {
  const double c = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= c;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= c;
  const double inv = 1.0 / std::sqrt(var + epsilon);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) * inv * gamma[i] + beta[i];
  // One MAC per element for each of: mean, variance, affine.
  if (counter) counter->normalization += 3 * x.size();
  return out;
}

Tensor group_conv_loops(const Tensor& t, const GroupConvWeights& w) {
  const Dims d = t.dims();
  if (d.c != w.groups * w.in_per_group) throw std::invalid_argument("group conv channel mismatch");
  Tensor out(Dims{d.n, w.groups * w.out_per_group, d.h, d.w});
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t g = 0; g < w.groups; ++g)
      for (std::uint32_t o = 0; o < w.out_per_group; ++o)
        for (std::uint32_t h = 0; h < d.h; ++h)
          for (std::uint32_t x = 0; x < d.w; ++x) {
            double acc = w.bias.empty() ? 0.0 : w.bias[g * w.out_per_group + o];
            for (std::uint32_t j = 0; j < w.in_per_group; ++j)
              acc += double(w.weight(g, o, j)) * t.at(n, g * w.in_per_group + j, h, x);
            out.at(n, g * w.out_per_group + o, h, x) = static_cast<float>(acc);
          }
  return out;
}

Tensor subsample_mean(const Tensor& t) {
  const Dims d = t.dims();
  Tensor out(Dims{d.n, d.c, d.h / 2, d.w / 2});
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t c = 0; c < d.c; ++c)
      for (std::uint32_t h = 0; h < d.h / 2; ++h)
        for (std::uint32_t w = 0; w < d.w / 2; ++w) {
          const double s = double(t.at(n, c, 2 * h, 2 * w)) + t.at(n, c, 2 * h, 2 * w + 1) +
                           t.at(n, c, 2 * h + 1, 2 * w) + t.at(n, c, 2 * h + 1, 2 * w + 1);
          out.at(n, c, h, w) = static_cast<float>(s / 4.0);
        }
  return out;
}

std::pair<Tensor, Tensor> gradient_loops(const Tensor& t) {
  const Dims d = t.dims();
  Tensor gx(d);
  Tensor gy(d);
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t c = 0; c < d.c; ++c)
      for (std::uint32_t h = 0; h < d.h; ++h)
        for (std::uint32_t w = 0; w < d.w; ++w) {
          if (w + 1 < d.w) gx.at(n, c, h, w) = t.at(n, c, h, w + 1) - t.at(n, c, h, w);
          if (h + 1 < d.h) gy.at(n, c, h, w) = t.at(n, c, h + 1, w) - t.at(n, c, h, w);
        }
  return {std::move(gx), std::move(gy)};
}

std::vector<double> pixel_vector(const Tensor& t, std::uint32_t n, std::uint32_t h,
                                 std::uint32_t w) {
  std::vector<double> v(t.dims().c);
  for (std::uint32_t c = 0; c < t.dims().c; ++c) v[c] = t.at(n, c, h, w);
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b, MacCounter* counter) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (counter) counter->similarity += 3 * a.size();
  const double denom = std::sqrt(na) * std::sqrt(nb);
  return denom > 0.0 ? dot / denom : 0.0;
}

double channel_variance(std::span<const double> a) {
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  return var / static_cast<double>(a.size());
}

double centered_cosine(std::span<const double> a, std::span<const double> b) {
  auto centre = [](std::span<const double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x -= mean;
    return out;
  };
  const auto ca = centre(a);
  const auto cb = centre(b);
  return cosine(ca, cb);
}

std::vector<double> cosine_cost_volume(const Tensor& left, const Tensor& right,
                                       std::uint32_t max_disparity, MacCounter* counter) {
  const Dims d = left.dims();
  std::vector<double> out(std::size_t{d.n} * max_disparity * d.h * d.w);
  std::size_t k = 0;
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t i = 0; i < max_disparity; ++i)
      for (std::uint32_t h = 0; h < d.h; ++h)
        for (std::uint32_t w = 0; w < d.w; ++w) {
          const std::uint32_t src = static_cast<std::uint32_t>((w + d.w - i % d.w) % d.w);
          out[k++] = cosine(pixel_vector(left, n, h, w), pixel_vector(right, n, h, src), counter);
        }
  return out;
}

std::vector<double> multi_head_loops(const Tensor& left, const Tensor& right,
                                     const CostVolumeConfig& cfg, const Tensor* left_encoding,
                                     const Tensor* right_encoding, MacCounter* counter) {
  const Dims d = left.dims();
  const std::uint32_t heads = cfg.head_num;
  const std::uint32_t per_head = d.c / heads;
  const std::vector<float> gamma(d.c, 1.0f);
  const std::vector<float> beta(d.c, 0.0f);

  // Normalised features held in double, [n][c][h][w].
  auto normalise = [&](const Tensor& t, const Tensor* enc) {
    std::vector<double> f(d.count());
    for (std::uint32_t n = 0; n < d.n; ++n)
      for (std::uint32_t h = 0; h < d.h; ++h)
        for (std::uint32_t w = 0; w < d.w; ++w) {
          const auto v = layer_norm_vector(pixel_vector(t, n, h, w), gamma, beta, cfg.epsilon,
                                           counter);
          for (std::uint32_t c = 0; c < d.c; ++c) {
            double e = 0.0;
            if (enc) e = enc->at(enc->dims().n == 1 ? 0 : n, c, h, w);
            f[((std::size_t{n} * d.c + c) * d.h + h) * d.w + w] = v[c] + e;
          }
        }
    return f;
  };
  const auto fl = normalise(left, left_encoding);
  const auto fr = normalise(right, right_encoding);
  auto idx = [&](std::uint32_t n, std::uint32_t c, std::uint32_t h, std::uint32_t w) {
    return ((std::size_t{n} * d.c + c) * d.h + h) * d.w + w;
  };

  const double scale = cfg.dot_scale ? 1.0 / std::sqrt(double(per_head)) : 1.0;
  std::vector<double> out(std::size_t{d.n} * cfg.max_disparity * d.h * d.w);
  std::vector<double> rolled(fr.size());
  std::vector<double> sim(heads);
  for (std::uint32_t i = 0; i < cfg.max_disparity; ++i) {
    // Materialise the rolled right features for this disparity.
    for (std::uint32_t n = 0; n < d.n; ++n)
      for (std::uint32_t c = 0; c < d.c; ++c)
        for (std::uint32_t h = 0; h < d.h; ++h)
          for (std::uint32_t w = 0; w < d.w; ++w)
            rolled[idx(n, c, h, w)] = fr[idx(n, c, h, (w + d.w - i % d.w) % d.w)];
    for (std::uint32_t n = 0; n < d.n; ++n)
      for (std::uint32_t h = 0; h < d.h; ++h)
        for (std::uint32_t w = 0; w < d.w; ++w) {
          for (std::uint32_t k = 0; k < heads; ++k) {
            double s = 0.0;
            for (std::uint32_t c = k * per_head; c < (k + 1) * per_head; ++c) {
              s += fl[idx(n, c, h, w)] * rolled[idx(n, c, h, w)];
            }
            if (counter) counter->similarity += per_head;
            sim[k] = s * scale;
          }
          double v = cfg.pointwise.bias.empty() ? 0.0 : cfg.pointwise.bias[i];
          for (std::uint32_t k = 0; k < heads; ++k) v += double(cfg.pointwise.weight(i, 0, k)) * sim[k];
          if (counter) counter->fusion += heads;
          out[((std::size_t{n} * cfg.max_disparity + i) * d.h + h) * d.w + w] = v;
        }
  }
  return out;
}

Tensor argmax_loops(const Tensor& cost) {
  const Dims d = cost.dims();
  Tensor out(Dims{d.n, 1, d.h, d.w});
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t h = 0; h < d.h; ++h)
      for (std::uint32_t w = 0; w < d.w; ++w) {
        std::uint32_t best = 0;
        for (std::uint32_t i = 0; i < d.c; ++i)
          if (cost.at(n, i, h, w) > cost.at(n, best, h, w)) best = i;
        out.at(n, 0, h, w) = static_cast<float>(best);
      }
  return out;
}

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(r, k) * b(k, c);
      out(r, c) = s;
    }
  return out;
}

Vec3 matvec(const Mat3& a, const Vec3& v) {
  Vec3 out;
  for (int r = 0; r < 3; ++r) out(r) = a(r, 0) * v(0) + a(r, 1) * v(1) + a(r, 2) * v(2);
  return out;
}

Pixel map_pixel(const Mat3& h, Pixel q) {
  const Vec3 p = matvec(h, Vec3(q.x, q.y, 1.0));
  return Pixel{p(0) / p(2), p(1) / p(2)};
}

double encoding_channel(std::uint32_t i, double x, double y, double frequency, double base) {
  // Channels come in blocks of four sharing one wavelength.
  const std::uint32_t even = i - i % 2;
  const double wavelength = std::pow(frequency, double(even) / base);
  const double coord = (i % 4) < 2 ? x : y;
  return (i % 2 == 0) ? std::sin(coord / wavelength) : std::cos(coord / wavelength);
}

namespace {

double smooth_l1_loops(const Tensor& a, const Tensor& b, double beta) {
  double s = 0.0;
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t k = 0; k < av.size(); ++k) {
    const double e = std::abs(double(av[k]) - double(bv[k]));
    s += e < beta ? 0.5 * e * e / beta : e - 0.5 * beta;
  }
  return s / static_cast<double>(av.size());
}

}  // namespace

double depth_loss_loops(const Tensor& pred, const Tensor& gt, double beta) {
  double total = smooth_l1_loops(pred, gt, beta);
  Tensor p = pred;
  Tensor g = gt;
  for (int level = 0; level < 5; ++level) {
    if (level > 0) {
      if (g.dims().h < 2 || g.dims().w < 2) break;
      p = subsample_mean(p);
      g = subsample_mean(g);
    }
    if (g.dims().h < 2 || g.dims().w < 2) break;
    const auto [pgx, pgy] = gradient_loops(p);
    const auto [ggx, ggy] = gradient_loops(g);
    total += 0.5 * (smooth_l1_loops(pgx, ggx, beta) + smooth_l1_loops(pgy, ggy, beta));
  }
  return total;
}

double max_abs_diff(std::span<const float> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - b[i]));
  return m;
}

double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return m;
}

}  // namespace stereokit::reference
