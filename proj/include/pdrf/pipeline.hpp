// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "pdrf/dataset.hpp"
#include "pdrf/losses.hpp"
#include "pdrf/metrics.hpp"
#include "pdrf/model.hpp"
#include "pdrf/pipeline_detail.hpp"

namespace pdrf {

// Dataset views prepared for the working precision.
template <typename T>
struct TrainViews {
  std::vector<Camera<T>> cameras;
  std::vector<const Image*> images;

  static TrainViews from_dataset(const SceneDataset& ds) {
    TrainViews v;
    for (const auto& view : ds.train) {
      v.cameras.push_back(camera_cast<T>(view.camera));
      v.images.push_back(&view.image);
    }
    return v;
  }
};

template <typename T>
struct ItemLosses {
  T stage1 = 0;  // first blur-blend photometric term
  T stage2 = 0;  // second blur-blend photometric term (full mode only)
  T fine = 0;    // fine-render photometric term

  T coarse() const { return stage1 + stage2; }
  T total() const { return stage1 + stage2 + fine; }
};

// Scratch reused across items by one worker.
template <typename T>
struct ItemWorkspace {
  PbeStageCache<T> stage1, stage2;
  std::vector<CrrCache<T>> crr1, crr2;
  std::vector<FvrCache<T>> fvr;
  std::vector<RayGrads<T>> rg1, rg2;
  std::vector<T> dw1, dw2, dloc1, dloc2, doff2, dfeat;
  // When set, fine depths are captured on first use per ray slot and reused;
  // the gradient checks need the sampled depths pinned across perturbations
  // (sampling is treated as a constant for differentiation).
  bool pin_fine_depths = false;
  std::vector<std::vector<T>> pinned_fine;
};

// One training ray: forward losses and (optionally) the full backward pass,
// with parameter gradients scaled by grad_scale accumulated into the sink.
template <typename T>
ItemLosses<T> process_item(PdrfModel<T>& model, const TrainViews<T>& views, int view, int px,
                           int py, uint64_t item_seed, T grad_scale, bool backward,
                           ItemWorkspace<T>& ws, GradSink<T>& sink) {
  const ModelConfig& cfg = model.cfg;
  const Camera<T>& cam = views.cameras[view];
  const Image& img = *views.images[view];
  const std::array<T, 3> target{T(img.at(px, py, 0)), T(img.at(px, py, 1)), T(img.at(px, py, 2))};
  const T near = T(cfg.near), far = T(cfg.far);
  const bool use_gamma = cfg.gamma_correct;
  const int P = cfg.pbe_mode == 2 ? 1 : cfg.kernel_size;
  const int F = cfg.feat_dim;

  ws.crr1.resize(P);
  ws.crr2.resize(P);
  ws.fvr.resize(P);
  if (ws.pin_fine_depths) ws.pinned_fine.resize(P);

  ItemLosses<T> losses;

  // ---- stage 1: kernel prediction (or the bare central ray) --------------
  std::vector<Ray<T>> rays1(P);
  std::vector<RayDirCache<T>> dirs1(P);
  if (cfg.pbe_mode != 2) {
    const T* loc = model.blur.offsets.values.data() + size_t(view) * cfg.kernel_size * 2;
    pbe_stage(model.blur, model.predictor, cam, view, T(px), T(py), loc, nullptr, ws.stage1);
    for (int i = 0; i < P; ++i) {
      rays1[i] = ws.stage1.rays[i];
      dirs1[i] = ws.stage1.dir_caches[i];
    }
  } else {
    rays1[0] = generate_ray(cam, T(px), T(py), &dirs1[0]);
  }

  // ---- coarse render of stage-1 rays --------------------------------------
  for (int i = 0; i < P; ++i) {
    Rng jrng(mix_seed(item_seed, 0xA1, uint64_t(i)));
    const RaySamples<T> samples = stratified_samples(near, far, cfg.n_coarse, true, jrng);
    render_ray_coarse(model.coarse, model.grid_coar, rays1[i], dirs1[i], samples, ws.crr1[i]);
  }

  // stage-1 blend
  std::array<T, 3> blend1{0, 0, 0};
  {
    std::span<const T> w1 = cfg.pbe_mode != 2 ? std::span<const T>(ws.stage1.weights)
                                              : detail::unit_weight<T>();
    for (int i = 0; i < P; ++i)
      for (int ch = 0; ch < 3; ++ch) blend1[ch] += w1[i] * ws.crr1[i].rgb[ch];
  }
  const std::array<T, 3> pred1 = detail::maybe_gamma(blend1, use_gamma);
  losses.stage1 = squared_error(pred1, target);

  // ---- stage 2 (full mode): refine the kernel with ray features -----------
  const bool two_stage = cfg.pbe_mode == 0;
  std::vector<Ray<T>>* rays_fine = &rays1;           // rays the fine render uses
  std::vector<RayDirCache<T>>* dirs_fine = &dirs1;
  std::span<const T> weights_fine = cfg.pbe_mode != 2 ? std::span<const T>(ws.stage1.weights)
                                                      : detail::unit_weight<T>();
  std::vector<Ray<T>> rays2(P);
  std::vector<RayDirCache<T>> dirs2(P);
  std::vector<CrrCache<T>>* crr_for_pdf = &ws.crr1;  // whose weights drive importance sampling
  std::array<T, 3> blend2{0, 0, 0};
  std::array<T, 3> pred2{0, 0, 0};

  if (two_stage) {
    ws.dfeat.resize(size_t(P) * F);
    for (int i = 0; i < P; ++i)
      std::copy_n(ws.crr1[i].f_ray.data(), F, ws.dfeat.data() + size_t(i) * F);
    pbe_stage(model.blur, model.predictor, cam, view, T(px), T(py), ws.stage1.pix_off.data(),
              ws.dfeat.data(), ws.stage2);
    for (int i = 0; i < P; ++i) {
      rays2[i] = ws.stage2.rays[i];
      dirs2[i] = ws.stage2.dir_caches[i];
    }
    for (int i = 0; i < P; ++i) {
      Rng jrng(mix_seed(item_seed, 0xB2, uint64_t(i)));
      const RaySamples<T> samples = stratified_samples(near, far, cfg.n_coarse, true, jrng);
      render_ray_coarse(model.coarse, model.grid_coar, rays2[i], dirs2[i], samples, ws.crr2[i]);
    }
    for (int i = 0; i < P; ++i)
      for (int ch = 0; ch < 3; ++ch) blend2[ch] += ws.stage2.weights[i] * ws.crr2[i].rgb[ch];
    pred2 = detail::maybe_gamma(blend2, use_gamma);
    losses.stage2 = squared_error(pred2, target);
    rays_fine = &rays2;
    dirs_fine = &dirs2;
    weights_fine = std::span<const T>(ws.stage2.weights);
    crr_for_pdf = &ws.crr2;
  }

  // ---- fine render on importance-resampled depths --------------------------
  std::array<T, 3> blend_fine{0, 0, 0};
  for (int i = 0; i < P; ++i) {
    const CrrCache<T>& pdf_src = (*crr_for_pdf)[i];
    std::vector<T>* pinned = ws.pin_fine_depths ? &ws.pinned_fine[i] : nullptr;
    std::vector<T> fine_t;
    if (pinned && !pinned->empty()) {
      fine_t = *pinned;
    } else {
      Rng irng(mix_seed(item_seed, 0xC3, uint64_t(i)));
      fine_t = importance_sample<T>(pdf_src.weights, near, far, cfg.n_fine, irng);
      std::sort(fine_t.begin(), fine_t.end());
      if (pinned) *pinned = fine_t;
    }
    const RaySamples<T> merged = merge_depths<T>(pdf_src.t, fine_t, near, far);
    render_ray_fine(model.fine, model.grid_coar, model.grid_fine, (*rays_fine)[i],
                    (*dirs_fine)[i], merged, ws.fvr[i]);
    for (int ch = 0; ch < 3; ++ch) blend_fine[ch] += weights_fine[i] * ws.fvr[i].rgb[ch];
  }
  const std::array<T, 3> pred_fine = detail::maybe_gamma(blend_fine, use_gamma);
  losses.fine = squared_error(pred_fine, target);

  if (!backward) return losses;

  // ---- backward ------------------------------------------------------------
  const std::array<T, 3> dpred_fine = squared_error_backward(pred_fine, target, grad_scale);
  const std::array<T, 3> dblend_fine = detail::maybe_gamma_backward(blend_fine, dpred_fine, use_gamma);

  ws.rg1.assign(P, RayGrads<T>{});
  ws.rg2.assign(P, RayGrads<T>{});
  ws.dw1.assign(P, T(0));
  ws.dw2.assign(P, T(0));

  std::span<T> dw_fine = two_stage ? std::span<T>(ws.dw2) : std::span<T>(ws.dw1);
  std::vector<RayGrads<T>>& rg_fine = two_stage ? ws.rg2 : ws.rg1;
  for (int i = 0; i < P; ++i) {
    for (int ch = 0; ch < 3; ++ch) dw_fine[i] += ws.fvr[i].rgb[ch] * dblend_fine[ch];
    const std::array<T, 3> dc{weights_fine[i] * dblend_fine[0], weights_fine[i] * dblend_fine[1],
                              weights_fine[i] * dblend_fine[2]};
    render_ray_fine_backward(model.fine, model.grid_coar, model.grid_fine, ws.fvr[i], dc.data(),
                             sink, rg_fine[i]);
  }

  if (two_stage) {
    const std::array<T, 3> dpred2 = squared_error_backward(pred2, target, grad_scale);
    const std::array<T, 3> dblend2 = detail::maybe_gamma_backward(blend2, dpred2, use_gamma);
    for (int i = 0; i < P; ++i) {
      for (int ch = 0; ch < 3; ++ch) ws.dw2[i] += ws.crr2[i].rgb[ch] * dblend2[ch];
      const std::array<T, 3> dc{ws.stage2.weights[i] * dblend2[0],
                                ws.stage2.weights[i] * dblend2[1],
                                ws.stage2.weights[i] * dblend2[2]};
      render_ray_coarse_backward(model.coarse, model.grid_coar, ws.crr2[i], dc.data(), nullptr,
                                 sink, ws.rg2[i]);
    }
    // back through the stage-2 prediction into stage-1 outputs
    ws.dloc2.assign(size_t(P) * 2, T(0));
    ws.dfeat.assign(size_t(P) * F, T(0));
    pbe_stage_backward(model.blur, model.predictor, cam, ws.stage2, ws.rg2.data(), ws.dw2.data(),
                       nullptr, sink, ws.dloc2.data(), ws.dfeat.data());
  }

  // stage-1 blend term
  const std::array<T, 3> dpred1 = squared_error_backward(pred1, target, grad_scale);
  const std::array<T, 3> dblend1 = detail::maybe_gamma_backward(blend1, dpred1, use_gamma);
  {
    std::span<const T> w1 = cfg.pbe_mode != 2 ? std::span<const T>(ws.stage1.weights)
                                              : detail::unit_weight<T>();
    for (int i = 0; i < P; ++i) {
      for (int ch = 0; ch < 3; ++ch) ws.dw1[i] += ws.crr1[i].rgb[ch] * dblend1[ch];
      const std::array<T, 3> dc{w1[i] * dblend1[0], w1[i] * dblend1[1], w1[i] * dblend1[2]};
      const T* df_ray = two_stage ? ws.dfeat.data() + size_t(i) * F : nullptr;
      render_ray_coarse_backward(model.coarse, model.grid_coar, ws.crr1[i], dc.data(), df_ray,
                                 sink, ws.rg1[i]);
    }
  }

  if (cfg.pbe_mode != 2) {
    ws.dloc1.assign(size_t(P) * 2, T(0));
    pbe_stage_backward(model.blur, model.predictor, cam, ws.stage1, ws.rg1.data(), ws.dw1.data(),
                       two_stage ? ws.dloc2.data() : nullptr, sink, ws.dloc1.data(), nullptr);
    auto og = sink.grad(model.blur.offsets);
    for (int i = 0; i < P * 2; ++i) og[size_t(view) * cfg.kernel_size * 2 + i] += ws.dloc1[i];
  }

  return losses;
}

// ---------------------------------------------------------------------------
// Inference: central-ray rendering through coarse density -> importance
// sampling -> fine render. Deterministic (per-pixel seeded variates).

template <typename T>
std::array<T, 3> render_pixel(const PdrfModel<T>& model, const Camera<T>& cam, int px, int py,
                              ItemWorkspace<T>& ws) {
  const ModelConfig& cfg = model.cfg;
  const T near = T(cfg.near), far = T(cfg.far);
  ws.crr1.resize(1);
  ws.fvr.resize(1);
  RayDirCache<T> dir;
  const Ray<T> ray = generate_ray(cam, T(px), T(py), &dir);
  Rng dummy(0);
  const RaySamples<T> coarse = stratified_samples(near, far, cfg.n_coarse, false, dummy);
  // const_cast-free: rendering only reads the model
  render_ray_coarse(model.coarse, model.grid_coar, ray, dir, coarse, ws.crr1[0]);
  Rng irng(mix_seed(0xD00Dull, uint64_t(px), uint64_t(py)));
  std::vector<T> fine_t = importance_sample<T>(ws.crr1[0].weights, near, far, cfg.n_fine, irng);
  std::sort(fine_t.begin(), fine_t.end());
  const RaySamples<T> merged = merge_depths<T>(coarse.t, fine_t, near, far);
  render_ray_fine(model.fine, model.grid_coar, model.grid_fine, ray, dir, merged, ws.fvr[0]);
  std::array<T, 3> out = ws.fvr[0].rgb;
  if (cfg.gamma_correct) out = detail::maybe_gamma(out, true);
  for (auto& v : out) v = std::clamp(v, T(0), T(1));
  return out;
}

template <typename T>
Image render_deblurred(const PdrfModel<T>& model, const Camera<T>& cam) {
  Image img(cam.width, cam.height, 3);
  ItemWorkspace<T> ws;
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      const auto rgb = render_pixel(model, cam, x, y, ws);
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = float(rgb[ch]);
    }
  return img;
}

template <typename T>
MetricReport evaluate_holdout(const PdrfModel<T>& model, const SceneDataset& ds) {
  MetricReport report;
  double psnr_acc = 0, ssim_acc = 0;
  for (const auto& view : ds.held_out) {
    const Image rendered = render_deblurred(model, camera_cast<T>(view.camera));
    const double p = psnr(rendered, view.image);
    const double s = ssim(rendered, view.image);
    report.per_view.push_back({view.name, p, s});
    psnr_acc += p;
    ssim_acc += s;
  }
  if (!report.per_view.empty()) {
    report.mean_psnr = psnr_acc / double(report.per_view.size());
    report.mean_ssim = ssim_acc / double(report.per_view.size());
  }
  return report;
}

// Per-pixel trace of the variance of the refined-stage origin offsets; the
// diagnostic image from the blur predictor.
template <typename T>
Image blur_variance_map(PdrfModel<T>& model, const Camera<T>& cam, const Image& img, int view) {
  const ModelConfig& cfg = model.cfg;
  if (cfg.pbe_mode == 2)
    return Image(cam.width, cam.height, 1);  // no blur model: identically zero
  const T near = T(cfg.near), far = T(cfg.far);
  const int P = cfg.kernel_size;
  const int F = cfg.feat_dim;
  (void)img;
  Image out(cam.width, cam.height, 1);
  ItemWorkspace<T> ws;
  ws.crr1.resize(P);
  std::vector<T> feats(size_t(P) * F);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const T* loc = model.blur.offsets.values.data() + size_t(view) * P * 2;
      pbe_stage(model.blur, model.predictor, cam, view, T(x), T(y), loc, nullptr, ws.stage1);
      const PbeStageCache<T>* result = &ws.stage1;
      if (cfg.pbe_mode == 0) {
        Rng dummy(0);
        const RaySamples<T> samples = stratified_samples(near, far, cfg.n_coarse, false, dummy);
        for (int i = 0; i < P; ++i) {
          render_ray_coarse(model.coarse, model.grid_coar, ws.stage1.rays[i],
                            ws.stage1.dir_caches[i], samples, ws.crr1[i]);
          std::copy_n(ws.crr1[i].f_ray.data(), F, feats.data() + size_t(i) * F);
        }
        pbe_stage(model.blur, model.predictor, cam, view, T(x), T(y), ws.stage1.pix_off.data(),
                  feats.data(), ws.stage2);
        result = &ws.stage2;
      }
      out.at(x, y, 0) = float(offset_variance<T>(result->org_off, P));
    }
  }
  return out;
}

}  // namespace pdrf
