// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "pdrf/camera.hpp"
#include "pdrf/encoding.hpp"
#include "pdrf/grid.hpp"
#include "pdrf/kernels/kernels.hpp"
#include "pdrf/mlp.hpp"
#include "pdrf/sampling.hpp"

namespace pdrf {

template <typename T>
inline T softplus(T x) {
  return x > T(20) ? x : std::log1p(std::exp(x));
}

template <typename T>
inline T logistic(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

// T_i = exp(-sum_{j<i} sigma_j delta_j), w_i = T_i * (1 - exp(-sigma_i delta_i)).
template <typename T>
void transmittance_weights(std::span<const T> sigma, std::span<const T> delta,
                           std::span<T> trans, std::span<T> absorb, std::span<T> weights) {
  if (sigma.size() != delta.size()) throw std::invalid_argument("transmittance_weights: length mismatch");
  T acc = 0;
  for (size_t i = 0; i < sigma.size(); ++i) {
    trans[i] = std::exp(-acc);
    absorb[i] = std::exp(-sigma[i] * delta[i]);
    weights[i] = trans[i] * (T(1) - absorb[i]);
    acc += sigma[i] * delta[i];
  }
}

// d(loss)/d(sigma) from d(loss)/d(weights). delta is constant.
template <typename T>
void transmittance_weights_backward(std::span<const T> delta, std::span<const T> trans,
                                    std::span<const T> absorb, std::span<const T> weights,
                                    std::span<const T> dweights, std::span<T> dsigma) {
  const size_t n = delta.size();
  T suffix = 0;  // sum_{j>i} dweights_j * w_j
  for (size_t ii = n; ii-- > 0;) {
    const T da = dweights[ii] * trans[ii] * absorb[ii] - suffix;
    dsigma[ii] = da * delta[ii];
    suffix += dweights[ii] * weights[ii];
  }
}

// Density/feature head shared by both renderers: an MLP over
// [positional encoding | grid features] whose first output channel is the
// raw density (softplus) and the rest the per-sample feature vector.
template <typename T>
struct RadianceNets {
  Mlp<T> sigma_net;
  Mlp<T> color_net;
  EncodingSpec pos_enc;
  EncodingSpec dir_enc;
  int feat_dim = 15;

  // sigma_net: [pos | grid] -> hidden -> (1 + feat); two affine layers.
  // color_net: [feat | dir] -> hidden -> hidden -> 3; three affine layers.
  static RadianceNets make(const std::string& name, int grid_feat_dim, int hidden, int feat_dim,
                           EncodingSpec pos_enc, EncodingSpec dir_enc, Rng& rng) {
    RadianceNets r;
    r.pos_enc = pos_enc;
    r.dir_enc = dir_enc;
    r.feat_dim = feat_dim;
    const int sig_in = pos_enc.out_dim(3) + grid_feat_dim;
    r.sigma_net = Mlp<T>::make(name + ".sigma", {sig_in, hidden, 1 + feat_dim}, rng);
    // Slightly transparent start: raw density bias -1 before softplus.
    r.sigma_net.biases.back().values[0] = T(-1);
    const int col_in = feat_dim + dir_enc.out_dim(3);
    r.color_net = Mlp<T>::make(name + ".color", {col_in, hidden, hidden, 3}, rng);
    return r;
  }

  void collect_params(std::vector<ParamTensor<T>*>& out) {
    sigma_net.collect_params(out);
    color_net.collect_params(out);
  }
};

// ---------------------------------------------------------------------------
// Coarse ray renderer: per-sample density + feature, transmittance-weighted
// feature aggregation, one color decode per ray.

template <typename T>
struct CrrCache {
  int n = 0;
  Ray<T> ray;
  RayDirCache<T> dir_cache;
  std::vector<T> t, delta;
  std::vector<T> points;      // n x 3
  std::vector<T> pos_out;     // n x pos_dim
  EncodingCache<T> pos_cache;
  std::vector<GridCache<T>> grid_cache;
  std::vector<T> grid_feat;   // n x C
  std::vector<T> sig_in;      // n x (pos_dim + C)
  MlpCache<T> sig_mlp;
  std::vector<T> raw_sigma, sigma;
  std::vector<T> trans, absorb, weights;
  std::vector<T> feats;       // n x F
  std::vector<T> f_ray;       // F
  std::vector<T> dir_out;     // 1 x dir_dim
  EncodingCache<T> dir_enc_cache;
  std::vector<T> color_in;    // F + dir_dim
  MlpCache<T> color_mlp;
  std::array<T, 3> rgb_logit{};
  std::array<T, 3> rgb{};
  // scratch for backward
  std::vector<T> scratch_dsig_out, scratch_dsig_in, scratch_dpos, scratch_dpoints, scratch_dw,
      scratch_dsigma, scratch_dcolor_in;
};

template <typename T>
void render_ray_coarse(const RadianceNets<T>& nets, const FeatureGrid<T>& grid, const Ray<T>& ray,
                       const RayDirCache<T>& dir_cache, const RaySamples<T>& samples,
                       CrrCache<T>& c) {
  const int n = int(samples.t.size());
  const int pos_dim = nets.pos_enc.out_dim(3);
  const int gdim = grid.feature_dim();
  const int fdim = nets.feat_dim;
  c.n = n;
  c.ray = ray;
  c.dir_cache = dir_cache;
  c.t = samples.t;
  c.delta = samples.delta;

  c.points.resize(size_t(n) * 3);
  for (int i = 0; i < n; ++i) {
    c.points[i * 3 + 0] = ray.origin.x + samples.t[i] * ray.direction.x;
    c.points[i * 3 + 1] = ray.origin.y + samples.t[i] * ray.direction.y;
    c.points[i * 3 + 2] = ray.origin.z + samples.t[i] * ray.direction.z;
  }
  c.pos_out.resize(size_t(n) * pos_dim);
  positional_encode(nets.pos_enc, c.points.data(), n, 3, c.pos_out.data(), &c.pos_cache);

  c.grid_cache.resize(n);
  c.grid_feat.resize(size_t(n) * gdim);
  for (int i = 0; i < n; ++i)
    grid_query(grid, c.points.data() + i * 3, c.grid_feat.data() + size_t(i) * gdim,
               &c.grid_cache[i]);

  const int sig_in_dim = pos_dim + gdim;
  c.sig_in.resize(size_t(n) * sig_in_dim);
  for (int i = 0; i < n; ++i) {
    T* row = c.sig_in.data() + size_t(i) * sig_in_dim;
    std::copy_n(c.pos_out.data() + size_t(i) * pos_dim, pos_dim, row);
    std::copy_n(c.grid_feat.data() + size_t(i) * gdim, gdim, row + pos_dim);
  }
  auto sig_out = mlp_forward(nets.sigma_net, c.sig_in.data(), n, c.sig_mlp);

  c.raw_sigma.resize(n);
  c.sigma.resize(n);
  c.feats.resize(size_t(n) * fdim);
  for (int i = 0; i < n; ++i) {
    const T* row = sig_out.data() + size_t(i) * (1 + fdim);
    c.raw_sigma[i] = row[0];
    c.sigma[i] = softplus(row[0]);
    std::copy_n(row + 1, fdim, c.feats.data() + size_t(i) * fdim);
  }

  c.trans.resize(n);
  c.absorb.resize(n);
  c.weights.resize(n);
  transmittance_weights<T>(c.sigma, c.delta, c.trans, c.absorb, c.weights);

  c.f_ray.resize(fdim);
  kernels::weighted_rowsum(c.feats.data(), c.weights.data(), c.f_ray.data(), n, fdim);

  const int dir_dim = nets.dir_enc.out_dim(3);
  c.dir_out.resize(dir_dim);
  const T dir_arr[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
  positional_encode(nets.dir_enc, dir_arr, 1, 3, c.dir_out.data(), &c.dir_enc_cache);

  c.color_in.resize(fdim + dir_dim);
  std::copy_n(c.f_ray.data(), fdim, c.color_in.data());
  std::copy_n(c.dir_out.data(), dir_dim, c.color_in.data() + fdim);
  auto logits = mlp_forward(nets.color_net, c.color_in.data(), 1, c.color_mlp);
  for (int ch = 0; ch < 3; ++ch) {
    c.rgb_logit[ch] = logits[ch];
    c.rgb[ch] = logistic(logits[ch]);
  }
}

// dcolor (3) and df_ray (F) may each be null. Importance weights are treated
// as constants, so no external weight gradient enters here.
template <typename T>
void render_ray_coarse_backward(RadianceNets<T>& nets, FeatureGrid<T>& grid, CrrCache<T>& c,
                                const std::type_identity_t<T>* dcolor,
                                const std::type_identity_t<T>* df_ray_extra, GradSink<T>& sink,
                                RayGrads<T>& rg) {
  const int n = c.n;
  const int pos_dim = nets.pos_enc.out_dim(3);
  const int gdim = grid.feature_dim();
  const int fdim = nets.feat_dim;
  const int dir_dim = nets.dir_enc.out_dim(3);

  std::vector<T> df(fdim, T(0));
  if (df_ray_extra) std::copy_n(df_ray_extra, fdim, df.data());

  Vec3<T> dd{};  // gradient on the unit direction

  if (dcolor) {
    T dlogit[3];
    for (int ch = 0; ch < 3; ++ch)
      dlogit[ch] = dcolor[ch] * c.rgb[ch] * (T(1) - c.rgb[ch]);
    auto& dci = c.scratch_dcolor_in;
    dci.assign(size_t(fdim) + dir_dim, T(0));
    mlp_backward(nets.color_net, c.color_mlp, dlogit, sink, dci.data());
    kernels::add(dci.data(), df.data(), fdim);
    T dd_arr[3] = {0, 0, 0};
    positional_encode_backward(nets.dir_enc, c.dir_enc_cache, dci.data() + fdim, dd_arr);
    dd += Vec3<T>{dd_arr[0], dd_arr[1], dd_arr[2]};
  }

  // f_ray = sum_i w_i feats_i
  auto& dw = c.scratch_dw;
  dw.resize(n);
  auto& dsig_out = c.scratch_dsig_out;
  dsig_out.assign(size_t(n) * (1 + fdim), T(0));
  for (int i = 0; i < n; ++i) {
    const T* fi = c.feats.data() + size_t(i) * fdim;
    dw[i] = kernels::dot(fi, df.data(), fdim);
    // dfeats_i = w_i * df  (written into the sigma head gradient, cols 1..F)
    T* drow = dsig_out.data() + size_t(i) * (1 + fdim);
    kernels::axpy(c.weights[i], df.data(), drow + 1, fdim);
  }

  auto& dsigma = c.scratch_dsigma;
  dsigma.resize(n);
  transmittance_weights_backward<T>(c.delta, c.trans, c.absorb, c.weights, dw, dsigma);
  for (int i = 0; i < n; ++i)
    dsig_out[size_t(i) * (1 + fdim)] = dsigma[i] * logistic(c.raw_sigma[i]);

  auto& dsig_in = c.scratch_dsig_in;
  dsig_in.assign(size_t(n) * (pos_dim + gdim), T(0));
  mlp_backward(nets.sigma_net, c.sig_mlp, dsig_out.data(), sink, dsig_in.data());

  auto& dpoints = c.scratch_dpoints;
  dpoints.assign(size_t(n) * 3, T(0));
  auto& dpos = c.scratch_dpos;
  dpos.resize(size_t(n) * pos_dim);
  for (int i = 0; i < n; ++i) {
    const T* row = dsig_in.data() + size_t(i) * (pos_dim + gdim);
    std::copy_n(row, pos_dim, dpos.data() + size_t(i) * pos_dim);
    grid_query_backward(grid, c.grid_cache[i], row + pos_dim, sink, dpoints.data() + i * 3);
  }
  positional_encode_backward(nets.pos_enc, c.pos_cache, dpos.data(), dpoints.data());

  Vec3<T> dorigin{};
  for (int i = 0; i < n; ++i) {
    const Vec3<T> dX{dpoints[i * 3 + 0], dpoints[i * 3 + 1], dpoints[i * 3 + 2]};
    dorigin += dX;
    dd += dX * c.t[i];
  }
  rg.origin += dorigin;
  rg.direction += dd;
}

// ---------------------------------------------------------------------------
// Fine voxel renderer: per-sample density and color on the merged depth set,
// alpha-composited per the volume rendering sum.

template <typename T>
struct FvrCache {
  int n = 0;
  Ray<T> ray;
  RayDirCache<T> dir_cache;
  std::vector<T> t, delta;
  std::vector<T> points;
  std::vector<T> pos_out;
  EncodingCache<T> pos_cache;
  std::vector<GridCache<T>> gc_coar, gc_fine;
  std::vector<T> feat_coar, feat_fine;
  std::vector<T> sig_in;
  MlpCache<T> sig_mlp;
  std::vector<T> raw_sigma, sigma;
  std::vector<T> trans, absorb, weights;
  std::vector<T> feats;     // n x F
  std::vector<T> dir_out;   // dir_dim (single row; shared by all samples)
  EncodingCache<T> dir_enc_cache;
  std::vector<T> color_in;  // n x (F + dir_dim)
  MlpCache<T> color_mlp;
  std::vector<T> logits;    // n x 3
  std::vector<T> colors;    // n x 3
  std::array<T, 3> rgb{};
  std::vector<T> scratch_dlogits, scratch_dcolor_in, scratch_dsig_out, scratch_dsig_in,
      scratch_dpoints, scratch_dpos, scratch_dw, scratch_dsigma;
};

template <typename T>
void render_ray_fine(const RadianceNets<T>& nets, const FeatureGrid<T>& grid_coar,
                     const FeatureGrid<T>& grid_fine, const Ray<T>& ray,
                     const RayDirCache<T>& dir_cache, const RaySamples<T>& samples,
                     FvrCache<T>& c) {
  const int n = int(samples.t.size());
  const int pos_dim = nets.pos_enc.out_dim(3);
  const int gc = grid_coar.feature_dim();
  const int gf = grid_fine.feature_dim();
  const int fdim = nets.feat_dim;
  c.n = n;
  c.ray = ray;
  c.dir_cache = dir_cache;
  c.t = samples.t;
  c.delta = samples.delta;

  c.points.resize(size_t(n) * 3);
  for (int i = 0; i < n; ++i) {
    c.points[i * 3 + 0] = ray.origin.x + samples.t[i] * ray.direction.x;
    c.points[i * 3 + 1] = ray.origin.y + samples.t[i] * ray.direction.y;
    c.points[i * 3 + 2] = ray.origin.z + samples.t[i] * ray.direction.z;
  }
  c.pos_out.resize(size_t(n) * pos_dim);
  positional_encode(nets.pos_enc, c.points.data(), n, 3, c.pos_out.data(), &c.pos_cache);

  c.gc_coar.resize(n);
  c.gc_fine.resize(n);
  c.feat_coar.resize(size_t(n) * gc);
  c.feat_fine.resize(size_t(n) * gf);
  for (int i = 0; i < n; ++i) {
    grid_query(grid_coar, c.points.data() + i * 3, c.feat_coar.data() + size_t(i) * gc,
               &c.gc_coar[i]);
    grid_query(grid_fine, c.points.data() + i * 3, c.feat_fine.data() + size_t(i) * gf,
               &c.gc_fine[i]);
  }

  const int sig_in_dim = pos_dim + gc + gf;
  c.sig_in.resize(size_t(n) * sig_in_dim);
  for (int i = 0; i < n; ++i) {
    T* row = c.sig_in.data() + size_t(i) * sig_in_dim;
    std::copy_n(c.pos_out.data() + size_t(i) * pos_dim, pos_dim, row);
    std::copy_n(c.feat_coar.data() + size_t(i) * gc, gc, row + pos_dim);
    std::copy_n(c.feat_fine.data() + size_t(i) * gf, gf, row + pos_dim + gc);
  }
  auto sig_out = mlp_forward(nets.sigma_net, c.sig_in.data(), n, c.sig_mlp);

  c.raw_sigma.resize(n);
  c.sigma.resize(n);
  c.feats.resize(size_t(n) * fdim);
  for (int i = 0; i < n; ++i) {
    const T* row = sig_out.data() + size_t(i) * (1 + fdim);
    c.raw_sigma[i] = row[0];
    c.sigma[i] = softplus(row[0]);
    std::copy_n(row + 1, fdim, c.feats.data() + size_t(i) * fdim);
  }

  c.trans.resize(n);
  c.absorb.resize(n);
  c.weights.resize(n);
  transmittance_weights<T>(c.sigma, c.delta, c.trans, c.absorb, c.weights);

  const int dir_dim = nets.dir_enc.out_dim(3);
  c.dir_out.resize(dir_dim);
  const T dir_arr[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
  positional_encode(nets.dir_enc, dir_arr, 1, 3, c.dir_out.data(), &c.dir_enc_cache);

  c.color_in.resize(size_t(n) * (fdim + dir_dim));
  for (int i = 0; i < n; ++i) {
    T* row = c.color_in.data() + size_t(i) * (fdim + dir_dim);
    std::copy_n(c.feats.data() + size_t(i) * fdim, fdim, row);
    std::copy_n(c.dir_out.data(), dir_dim, row + fdim);
  }
  auto logits = mlp_forward(nets.color_net, c.color_in.data(), n, c.color_mlp);
  c.logits.assign(logits.begin(), logits.end());
  c.colors.resize(size_t(n) * 3);
  for (size_t i = 0; i < c.colors.size(); ++i) c.colors[i] = logistic(c.logits[i]);

  c.rgb = {0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < 3; ++ch) c.rgb[ch] += c.weights[i] * c.colors[size_t(i) * 3 + ch];
}

template <typename T>
void render_ray_fine_backward(RadianceNets<T>& nets, FeatureGrid<T>& grid_coar,
                              FeatureGrid<T>& grid_fine, FvrCache<T>& c, const T* dcolor,
                              GradSink<T>& sink, RayGrads<T>& rg) {
  const int n = c.n;
  const int pos_dim = nets.pos_enc.out_dim(3);
  const int gc = grid_coar.feature_dim();
  const int gf = grid_fine.feature_dim();
  const int fdim = nets.feat_dim;
  const int dir_dim = nets.dir_enc.out_dim(3);

  // rgb = sum_i w_i c_i
  auto& dw = c.scratch_dw;
  dw.resize(n);
  auto& dlogits = c.scratch_dlogits;
  dlogits.resize(size_t(n) * 3);
  for (int i = 0; i < n; ++i) {
    const T* ci = c.colors.data() + size_t(i) * 3;
    dw[i] = ci[0] * dcolor[0] + ci[1] * dcolor[1] + ci[2] * dcolor[2];
    for (int ch = 0; ch < 3; ++ch) {
      const T cc = ci[ch];
      dlogits[size_t(i) * 3 + ch] = c.weights[i] * dcolor[ch] * cc * (T(1) - cc);
    }
  }

  auto& dci = c.scratch_dcolor_in;
  dci.assign(size_t(n) * (fdim + dir_dim), T(0));
  mlp_backward(nets.color_net, c.color_mlp, dlogits.data(), sink, dci.data());

  auto& dsigma = c.scratch_dsigma;
  dsigma.resize(n);
  transmittance_weights_backward<T>(c.delta, c.trans, c.absorb, c.weights, dw, dsigma);

  auto& dsig_out = c.scratch_dsig_out;
  dsig_out.resize(size_t(n) * (1 + fdim));
  T dd_arr[3] = {0, 0, 0};
  std::vector<T> ddir_enc(dir_dim, T(0));
  for (int i = 0; i < n; ++i) {
    const T* row = dci.data() + size_t(i) * (fdim + dir_dim);
    T* orow = dsig_out.data() + size_t(i) * (1 + fdim);
    orow[0] = dsigma[i] * logistic(c.raw_sigma[i]);
    std::copy_n(row, fdim, orow + 1);
    kernels::add(row + fdim, ddir_enc.data(), dir_dim);
  }
  positional_encode_backward(nets.dir_enc, c.dir_enc_cache, ddir_enc.data(), dd_arr);

  auto& dsig_in = c.scratch_dsig_in;
  dsig_in.assign(size_t(n) * (pos_dim + gc + gf), T(0));
  mlp_backward(nets.sigma_net, c.sig_mlp, dsig_out.data(), sink, dsig_in.data());

  auto& dpoints = c.scratch_dpoints;
  dpoints.assign(size_t(n) * 3, T(0));
  auto& dpos = c.scratch_dpos;
  dpos.resize(size_t(n) * pos_dim);
  for (int i = 0; i < n; ++i) {
    const T* row = dsig_in.data() + size_t(i) * (pos_dim + gc + gf);
    std::copy_n(row, pos_dim, dpos.data() + size_t(i) * pos_dim);
    grid_query_backward(grid_coar, c.gc_coar[i], row + pos_dim, sink, dpoints.data() + i * 3);
    grid_query_backward(grid_fine, c.gc_fine[i], row + pos_dim + gc, sink, dpoints.data() + i * 3);
  }
  positional_encode_backward(nets.pos_enc, c.pos_cache, dpos.data(), dpoints.data());

  Vec3<T> dorigin{};
  Vec3<T> dd{dd_arr[0], dd_arr[1], dd_arr[2]};
  for (int i = 0; i < n; ++i) {
    const Vec3<T> dX{dpoints[i * 3 + 0], dpoints[i * 3 + 1], dpoints[i * 3 + 2]};
    dorigin += dX;
    dd += dX * c.t[i];
  }
  rg.origin += dorigin;
  rg.direction += dd;
}

}  // namespace pdrf
