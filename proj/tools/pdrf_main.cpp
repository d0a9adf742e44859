// Copyright 2026 The pdrf Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pdrf/dataset.hpp"
#include "pdrf/kernels/kernels.hpp"
#include "pdrf/metrics.hpp"
#include "pdrf/trainer.hpp"

namespace {

using namespace pdrf;

int cmd_make_scene(const std::string& out_dir, const std::string& preset, const std::string& blur,
                   int views, int res, uint64_t seed) {
  const SceneDataset ds = make_preset_dataset(preset, blur, views, res, seed);
  write_manifest(ds, out_dir);
  std::printf("wrote %zu training + %zu held-out views to %s\n", ds.train.size(),
              ds.held_out.size(), out_dir.c_str());
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& config_path,
              const std::string& out_ckpt, const TrainConfig& overrides,
              const std::vector<std::string>& set_keys) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = load_config_file(config_path);
  // Command-line overrides merge last-wins via the recorded key list.
  for (const auto& key : set_keys) {
    if (key == "threads") cfg.threads = overrides.threads;
    else if (key == "kernel_size") cfg.kernel_size = overrides.kernel_size;
    else if (key == "pbe") cfg.pbe = overrides.pbe;
    else if (key == "seed") cfg.seed = overrides.seed;
    else if (key == "iterations") cfg.iterations = overrides.iterations;
    else if (key == "batch_rays") cfg.batch_rays = overrides.batch_rays;
  }

  const std::string effective = config_to_string(cfg);
  std::printf("kernel backend: %s\neffective config:\n%s", std::string(kernels::backend_name()).c_str(),
              effective.c_str());
  {
    std::ofstream cfg_out(out_ckpt + ".config.txt");
    cfg_out << effective;
  }

  const SceneDataset ds = read_manifest(data_dir);
  train(ds, cfg, out_ckpt, [](const TrainLogRow& r) {
    std::printf("iter %6d  l_crr %.5f  l_fvr %.5f  l_tv %.6f  l_total %.5f\n", r.iteration, r.l_crr,
                r.l_fvr, r.l_tv, r.l_total);
    std::fflush(stdout);
  });
  std::printf("checkpoint written to %s\n", out_ckpt.c_str());
  return 0;
}

int cmd_render(const std::string& ckpt, const std::string& data_dir, const std::string& out_dir,
               int view) {
  const PdrfModel<float> model = PdrfModel<float>::load(ckpt);
  const SceneDataset ds = read_manifest(data_dir);
  if (int(ds.train.size()) != model.cfg.num_views)
    throw std::runtime_error("checkpoint/dataset mismatch: checkpoint has " +
                             std::to_string(model.cfg.num_views) + " views, dataset " +
                             std::to_string(ds.train.size()));
  std::filesystem::create_directories(out_dir);
  auto render_view = [&](const SceneView& v) {
    const Image img = render_deblurred(model, camera_cast<float>(v.camera));
    const std::string path = out_dir + "/" + v.name + "_deblurred.png";
    write_png(path, img, 8);
    std::printf("wrote %s\n", path.c_str());
  };
  if (view >= 0) {
    if (view >= int(ds.train.size()))
      throw std::runtime_error("view " + std::to_string(view) + " out of range");
    render_view(ds.train[view]);
  } else {
    for (const auto& v : ds.train) render_view(v);
    for (const auto& v : ds.held_out) render_view(v);
  }
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& data_dir, const std::string& out_csv) {
  const PdrfModel<float> model = PdrfModel<float>::load(ckpt);
  const SceneDataset ds = read_manifest(data_dir);
  if (int(ds.train.size()) != model.cfg.num_views)
    throw std::runtime_error("checkpoint/dataset mismatch: checkpoint has " +
                             std::to_string(model.cfg.num_views) + " views, dataset " +
                             std::to_string(ds.train.size()));
  if (ds.held_out.empty()) throw std::runtime_error("dataset has no held-out views to evaluate");
  for (const auto& v : ds.held_out)
    if (v.image.width < 11 || v.image.height < 11)
      throw std::runtime_error("held-out views too small for the SSIM window");
  const MetricReport report = evaluate_holdout(model, ds);
  std::fputs(metric_report_table(report).c_str(), stdout);
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write '" + out_csv + "'");
    out << metric_report_csv(report);
  }
  return 0;
}

int cmd_viz_blur(const std::string& ckpt, const std::string& data_dir, int view,
                 const std::string& out_png) {
  PdrfModel<float> model = PdrfModel<float>::load(ckpt);
  const SceneDataset ds = read_manifest(data_dir);
  if (view < 0 || view >= int(ds.train.size()))
    throw std::runtime_error("view " + std::to_string(view) + " out of range (0.." +
                             std::to_string(ds.train.size() - 1) + ")");
  Image map = blur_variance_map(model, camera_cast<float>(ds.train[view].camera),
                                ds.train[view].image, view);
  const auto [lo, hi] = normalize_minmax(map);
  write_png(out_png, map, 8);
  std::ofstream sidecar(out_png + ".range.txt");
  sidecar << lo << " " << hi << "\n";
  std::printf("wrote %s (variance range [%g, %g])\n", out_png.c_str(), lo, hi);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdrf: radiance-field reconstruction from blurry multi-view images"};
  app.require_subcommand(1);

  // make-scene
  auto* mk = app.add_subcommand("make-scene", "synthesize a posed dataset with optional blur");
  std::string mk_out, mk_preset = "spheres", mk_blur = "none";
  int mk_views = 8, mk_res = 64;
  uint64_t mk_seed = 0;
  mk->add_option("--out", mk_out, "output dataset directory")->required();
  mk->add_option("--preset", mk_preset, "scene preset (spheres)");
  mk->add_option("--blur", mk_blur, "blur type: motion|defocus|none");
  mk->add_option("--views", mk_views, "number of training views");
  mk->add_option("--res", mk_res, "image resolution (pixels per side)");
  mk->add_option("--seed", mk_seed, "rng seed");

  // train
  auto* tr = app.add_subcommand("train", "optimize a radiance field on a dataset");
  std::string tr_data, tr_config, tr_out = "model.ckpt";
  TrainConfig tr_over;
  bool tr_single = false;
  tr->add_option("--data", tr_data, "dataset directory")->required();
  tr->add_option("--config", tr_config, "key-value config file");
  tr->add_option("--out", tr_out, "output checkpoint path");
  auto* opt_threads = tr->add_option("--threads", tr_over.threads, "worker threads");
  auto* opt_kernel = tr->add_option("--kernel", tr_over.kernel_size, "blur kernel size P");
  auto* opt_flag_single = tr->add_flag("--single-stage", tr_single, "first-stage-only blur model");
  auto* opt_seed = tr->add_option("--seed", tr_over.seed, "rng seed");
  auto* opt_iters = tr->add_option("--iterations", tr_over.iterations, "training iterations");
  auto* opt_batch = tr->add_option("--batch", tr_over.batch_rays, "rays per batch");

  // render
  auto* rd = app.add_subcommand("render", "render deblurred images from a checkpoint");
  std::string rd_ckpt, rd_data, rd_out;
  int rd_view = -1;
  rd->add_option("--ckpt", rd_ckpt, "checkpoint path")->required();
  rd->add_option("--data", rd_data, "dataset directory")->required();
  rd->add_option("--out", rd_out, "output directory")->required();
  rd->add_option("--view", rd_view, "render a single training view");

  // eval
  auto* ev = app.add_subcommand("eval", "PSNR/SSIM of held-out views");
  std::string ev_ckpt, ev_data, ev_out;
  ev->add_option("--ckpt", ev_ckpt, "checkpoint path")->required();
  ev->add_option("--data", ev_data, "dataset directory")->required();
  ev->add_option("--out", ev_out, "metrics CSV path");

  // viz-blur
  auto* vz = app.add_subcommand("viz-blur", "per-pixel blur variance diagnostic image");
  std::string vz_ckpt, vz_data, vz_out;
  int vz_view = 0;
  vz->add_option("--ckpt", vz_ckpt, "checkpoint path")->required();
  vz->add_option("--data", vz_data, "dataset directory")->required();
  vz->add_option("--view", vz_view, "training view index");
  vz->add_option("--out", vz_out, "output PNG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (mk->parsed()) return cmd_make_scene(mk_out, mk_preset, mk_blur, mk_views, mk_res, mk_seed);
    if (tr->parsed()) {
      std::vector<std::string> keys;
      if (*opt_threads) keys.push_back("threads");
      if (*opt_kernel) keys.push_back("kernel_size");
      if (*opt_flag_single) {
        tr_over.pbe = "single";
        keys.push_back("pbe");
      }
      if (*opt_seed) keys.push_back("seed");
      if (*opt_iters) keys.push_back("iterations");
      if (*opt_batch) keys.push_back("batch_rays");
      return cmd_train(tr_data, tr_config, tr_out, tr_over, keys);
    }
    if (rd->parsed()) return cmd_render(rd_ckpt, rd_data, rd_out, rd_view);
    if (ev->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_out);
    if (vz->parsed()) return cmd_viz_blur(vz_ckpt, vz_data, vz_view, vz_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
