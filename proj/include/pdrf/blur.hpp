// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <type_traits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdrf/camera.hpp"
#include "pdrf/encoding.hpp"
#include "pdrf/mlp.hpp"
#include "pdrf/tensor.hpp"

namespace pdrf {

// Per-view learnable blur state: canonical kernel offsets (V x P x 2, pixel
// units, element 0 pinned at the anchor) and view embeddings (V x K).
template <typename T>
struct BlurKernelState {
  ParamTensor<T> offsets;
  ParamTensor<T> embeddings;
  int num_views = 0;
  int kernel_size = 0;
  int embed_dim = 0;

  static BlurKernelState make(int num_views, int kernel_size, int embed_dim, Rng& rng) {
    BlurKernelState s;
    s.num_views = num_views;
    s.kernel_size = kernel_size;
    s.embed_dim = embed_dim;
    s.offsets = ParamTensor<T>("blur.offsets", {num_views, kernel_size, 2});
    for (int v = 0; v < num_views; ++v)
      for (int i = 1; i < kernel_size; ++i)
        for (int d = 0; d < 2; ++d)
          s.offsets.values[(size_t(v) * kernel_size + i) * 2 + d] = T(rng.uniform(-2.0, 2.0));
    s.embeddings = ParamTensor<T>("blur.embed", {num_views, embed_dim});
    for (auto& v : s.embeddings.values) v = T(rng.uniform(-0.1, 0.1));
    return s;
  }

  void collect_params(std::vector<ParamTensor<T>*>& out) {
    out.push_back(&offsets);
    out.push_back(&embeddings);
  }
};

// The implicit blur function: one MLP mapping
//   [view embedding | enc(anchor px) | enc(kernel offset) | ray feature]
// to (origin delta raw(3), pixel delta raw(2), weight logit(1)).
// Pixel deltas are bounded by B*tanh(s/B) with B = 10 px; origin deltas by
// 2% of the scene extent. The output layer starts at zero so the initial
// kernel is the canonical one with uniform weights.
template <typename T>
struct KernelPredictor {
  Mlp<T> net;
  EncodingSpec pix_enc{5, true};
  int feat_dim = 15;
  T pixel_bound = T(10);
  T origin_bound = T(0.02);

  int in_dim() const {
    return net.in_dim();
  }

  static KernelPredictor make(int embed_dim, int feat_dim, int hidden, T scene_extent, Rng& rng) {
    KernelPredictor p;
    p.feat_dim = feat_dim;
    p.origin_bound = T(0.02) * scene_extent;
    const int enc2 = p.pix_enc.out_dim(2);
    p.net = Mlp<T>::make("blur.net", {embed_dim + 2 * enc2 + feat_dim, hidden, hidden, hidden, 6},
                         rng);
    p.net.zero_last_layer();
    return p;
  }

  void collect_params(std::vector<ParamTensor<T>*>& out) { net.collect_params(out); }
};

template <typename T>
struct PbeStageCache {
  int P = 0;
  int view = 0;
  T anchor_px = 0, anchor_py = 0;
  std::vector<T> input;         // P x in_dim
  std::vector<T> loc_norm;      // P x 2 (offset / pixel_bound), encoder input
  EncodingCache<T> anchor_cache;
  EncodingCache<T> loc_cache;
  MlpCache<T> mlp;
  std::vector<T> logits;        // P
  std::vector<T> weights;       // P, softmax
  std::vector<T> pix_total;     // P x 2 raw offset sums (pre-tanh)
  std::vector<T> tanh_pix;      // P x 2
  std::vector<T> pix_off;       // P x 2 bounded effective pixel offsets
  std::vector<T> tanh_org;      // P x 3
  std::vector<T> org_off;       // P x 3 bounded origin offsets
  std::vector<T> pixels;        // P x 2 effective pixel coordinates
  std::vector<Ray<T>> rays;
  std::vector<RayDirCache<T>> dir_caches;
  bool has_feats = false;
};

// One predictor pass over the P kernel elements. loc_offsets are the kernel
// locations relative to the anchor (canonical offsets in stage 1, stage-1
// results in stage 2); feats is null in stage 1 (zero placeholder).
// Element 0 is anchored: its effective pixel and origin offsets are pinned
// to zero so one ray always matches the observed pixel.
template <typename T>
void pbe_stage(const BlurKernelState<T>& state, const KernelPredictor<T>& pred,
               const Camera<T>& cam, int view, T anchor_px, T anchor_py,
               const std::type_identity_t<T>* loc_offsets, const std::type_identity_t<T>* feats,
               PbeStageCache<T>& c) {
  if (view < 0 || view >= state.num_views) throw std::invalid_argument("pbe_stage: view out of range");
  const int P = state.kernel_size;
  const int K = state.embed_dim;
  const int F = pred.feat_dim;
  const int enc2 = pred.pix_enc.out_dim(2);
  const int in_dim = K + 2 * enc2 + F;
  c.P = P;
  c.view = view;
  c.anchor_px = anchor_px;
  c.anchor_py = anchor_py;
  c.has_feats = feats != nullptr;

  // Anchor pixel normalized to [-1, 1] by the image size; kernel offsets by
  // the pixel bound.
  const T ax = T(2) * anchor_px / T(cam.width - 1) - T(1);
  const T ay = T(2) * anchor_py / T(cam.height - 1) - T(1);
  const T anchor_norm[2] = {ax, ay};
  std::vector<T> anchor_enc(enc2);
  positional_encode(pred.pix_enc, anchor_norm, 1, 2, anchor_enc.data(), &c.anchor_cache);

  c.loc_norm.resize(size_t(P) * 2);
  for (int i = 0; i < P * 2; ++i) c.loc_norm[i] = loc_offsets[i] / pred.pixel_bound;
  std::vector<T> loc_enc(size_t(P) * enc2);
  positional_encode(pred.pix_enc, c.loc_norm.data(), P, 2, loc_enc.data(), &c.loc_cache);

  const T* embed = state.embeddings.values.data() + size_t(view) * K;
  c.input.resize(size_t(P) * in_dim);
  for (int i = 0; i < P; ++i) {
    T* row = c.input.data() + size_t(i) * in_dim;
    std::copy_n(embed, K, row);
    std::copy_n(anchor_enc.data(), enc2, row + K);
    std::copy_n(loc_enc.data() + size_t(i) * enc2, enc2, row + K + enc2);
    if (feats)
      std::copy_n(feats + size_t(i) * F, F, row + K + 2 * enc2);
    else
      std::fill_n(row + K + 2 * enc2, F, T(0));
  }

  auto out = mlp_forward(pred.net, c.input.data(), P, c.mlp);

  // softmax over the P weight logits
  c.logits.resize(P);
  T max_logit = -std::numeric_limits<T>::infinity();
  for (int i = 0; i < P; ++i) {
    c.logits[i] = out[size_t(i) * 6 + 5];
    max_logit = std::max(max_logit, c.logits[i]);
  }
  c.weights.resize(P);
  T wsum = 0;
  for (int i = 0; i < P; ++i) {
    c.weights[i] = std::exp(c.logits[i] - max_logit);
    wsum += c.weights[i];
  }
  for (int i = 0; i < P; ++i) c.weights[i] /= wsum;

  c.pix_total.resize(size_t(P) * 2);
  c.tanh_pix.resize(size_t(P) * 2);
  c.pix_off.resize(size_t(P) * 2);
  c.tanh_org.resize(size_t(P) * 3);
  c.org_off.resize(size_t(P) * 3);
  c.pixels.resize(size_t(P) * 2);
  c.rays.resize(P);
  c.dir_caches.resize(P);
  for (int i = 0; i < P; ++i) {
    const T* o = out.data() + size_t(i) * 6;
    for (int d = 0; d < 2; ++d) {
      const T s = loc_offsets[i * 2 + d] + o[3 + d];
      c.pix_total[i * 2 + d] = s;
      const T th = std::tanh(s / pred.pixel_bound);
      c.tanh_pix[i * 2 + d] = th;
      c.pix_off[i * 2 + d] = (i == 0) ? T(0) : pred.pixel_bound * th;
    }
    for (int d = 0; d < 3; ++d) {
      const T th = std::tanh(o[d] / pred.origin_bound);
      c.tanh_org[i * 3 + d] = th;
      c.org_off[i * 3 + d] = (i == 0) ? T(0) : pred.origin_bound * th;
    }
    c.pixels[i * 2 + 0] = anchor_px + c.pix_off[i * 2 + 0];
    c.pixels[i * 2 + 1] = anchor_py + c.pix_off[i * 2 + 1];
    Ray<T> r = generate_ray(cam, c.pixels[i * 2 + 0], c.pixels[i * 2 + 1], &c.dir_caches[i]);
    r.origin += Vec3<T>{c.org_off[i * 3 + 0], c.org_off[i * 3 + 1], c.org_off[i * 3 + 2]};
    c.rays[i] = r;
  }
}

// ray_grads[i] holds d(loss)/d(ray i origin/direction); dweights the blend
// weight gradients; doff_extra (optional, P x 2) is an external gradient on
// the bounded pixel offsets (a later stage consuming them as inputs).
// Accumulates into H and the view embedding row, and returns
// d(loss)/d(loc_offsets) (P x 2) plus, when requested, d(loss)/d(feats).
template <typename T>
void pbe_stage_backward(BlurKernelState<T>& state, KernelPredictor<T>& pred, const Camera<T>& cam,
                        PbeStageCache<T>& c, const RayGrads<T>* ray_grads,
                        const std::type_identity_t<T>* dweights,
                        const std::type_identity_t<T>* doff_extra, GradSink<T>& sink,
                        std::type_identity_t<T>* dloc_out, std::type_identity_t<T>* dfeat_out) {
  const int P = c.P;
  const int K = state.embed_dim;
  const int F = pred.feat_dim;
  const int enc2 = pred.pix_enc.out_dim(2);
  const int in_dim = K + 2 * enc2 + F;

  std::fill_n(dloc_out, size_t(P) * 2, T(0));
  if (dfeat_out) std::fill_n(dfeat_out, size_t(P) * F, T(0));

  // softmax backward
  std::vector<T> dlogits(P, T(0));
  if (dweights) {
    T mix = 0;
    for (int i = 0; i < P; ++i) mix += c.weights[i] * dweights[i];
    for (int i = 0; i < P; ++i) dlogits[i] = c.weights[i] * (dweights[i] - mix);
  }

  std::vector<T> dout(size_t(P) * 6, T(0));
  for (int i = 0; i < P; ++i) {
    T* drow = dout.data() + size_t(i) * 6;
    drow[5] = dlogits[i];
    if (i == 0) continue;  // element 0 pinned: offset heads get no gradient
    // origin offset path
    if (ray_grads) {
      for (int d = 0; d < 3; ++d) {
        const T th = c.tanh_org[i * 3 + d];
        const T dorg = (d == 0 ? ray_grads[i].origin.x
                               : (d == 1 ? ray_grads[i].origin.y : ray_grads[i].origin.z));
        drow[d] = dorg * (T(1) - th * th);
      }
    }
    // bounded pixel offset: gradient from this stage's ray direction plus
    // any downstream consumer of the offsets
    T dpix[2] = {0, 0};
    if (ray_grads)
      ray_dir_backward(cam, c.dir_caches[i], ray_grads[i].direction, &dpix[0], &dpix[1]);
    if (doff_extra) {
      dpix[0] += doff_extra[i * 2 + 0];
      dpix[1] += doff_extra[i * 2 + 1];
    }
    for (int d = 0; d < 2; ++d) {
      const T th = c.tanh_pix[i * 2 + d];
      const T ds = dpix[d] * (T(1) - th * th);
      drow[3 + d] = ds;
      dloc_out[i * 2 + d] += ds;
    }
  }

  std::vector<T> din(size_t(P) * in_dim, T(0));
  mlp_backward(pred.net, c.mlp, dout.data(), sink, din.data());

  auto eg = sink.grad(state.embeddings);
  std::vector<T> dloc_enc(size_t(P) * enc2);
  for (int i = 0; i < P; ++i) {
    const T* row = din.data() + size_t(i) * in_dim;
    for (int k = 0; k < K; ++k) eg[size_t(c.view) * K + k] += row[k];
    // anchor encoding gradient discarded: the anchor pixel is not trainable
    std::copy_n(row + K + enc2, enc2, dloc_enc.data() + size_t(i) * enc2);
    if (dfeat_out && c.has_feats)
      for (int k = 0; k < F; ++k) dfeat_out[size_t(i) * F + k] += row[K + 2 * enc2 + k];
  }

  std::vector<T> dloc_norm(size_t(P) * 2, T(0));
  positional_encode_backward(pred.pix_enc, c.loc_cache, dloc_enc.data(), dloc_norm.data());
  for (int i = 0; i < P * 2; ++i) dloc_out[i] += dloc_norm[i] / pred.pixel_bound;
}

// Weighted color blend per the blur convolution; weights must lie on the
// simplex. Optional gamma correction (x + eps)^(1/2.2) happens downstream.
template <typename T>
std::array<T, 3> blend_colors(std::span<const std::array<T, 3>> colors, std::span<const T> weights) {
  if (colors.size() != weights.size()) throw std::invalid_argument("blend_colors: length mismatch");
  std::array<T, 3> out{0, 0, 0};
  for (size_t i = 0; i < colors.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) out[ch] += weights[i] * colors[i][ch];
  return out;
}

// Trace of the componentwise population variance of the P origin offsets.
template <typename T>
T offset_variance(std::span<const T> org_off, int P) {
  T var = 0;
  for (int d = 0; d < 3; ++d) {
    T mean = 0;
    for (int i = 0; i < P; ++i) mean += org_off[size_t(i) * 3 + d];
    mean /= T(P);
    T acc = 0;
    for (int i = 0; i < P; ++i) {
      const T dd = org_off[size_t(i) * 3 + d] - mean;
      acc += dd * dd;
    }
    var += acc / T(P);
  }
  return var;
}

}  // namespace pdrf
