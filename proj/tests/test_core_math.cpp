#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fd_check.hpp"
#include "pdrf/adam.hpp"
#include "pdrf/checkpoint.hpp"
#include "pdrf/encoding.hpp"
#include "pdrf/mlp.hpp"

using namespace pdrf;

TEST_CASE("positional encoding: fixed values") {
  {
    const double x[1] = {0.0};
    double out[4];
    positional_encode<double>({2, false}, x, 1, 1, out);
    CHECK(out[0] == doctest::Approx(0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(1).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(0).epsilon(1e-12));
    CHECK(out[3] == doctest::Approx(1).epsilon(1e-12));
  }
  {
    const double x[1] = {0.5};
    double out[3];
    positional_encode<double>({1, true}, x, 1, 1, out);
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == doctest::Approx(1.0));
    CHECK(out[2] == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    const double x[2] = {0.25, 0.0};
    double out[4];
    positional_encode<double>({1, false}, x, 1, 2, out);
    CHECK(out[0] == doctest::Approx(0.70710678118654752));
    CHECK(out[1] == doctest::Approx(0.70710678118654752));
    CHECK(out[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out[3] == doctest::Approx(1.0));
  }
}

TEST_CASE("positional encoding: dimension law and doubling accuracy") {
  Rng rng(3);
  for (int in_dim : {1, 2, 3, 5}) {
    for (int L : {0, 1, 4, 10}) {
      for (bool inc : {false, true}) {
        const EncodingSpec spec{L, inc};
        CHECK(spec.out_dim(in_dim) == in_dim * (2 * L + (inc ? 1 : 0)));
        std::vector<double> x(in_dim);
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        std::vector<double> out(spec.out_dim(in_dim));
        positional_encode<double>(spec, x.data(), 1, in_dim, out.data());
        // every band matches a direct sin/cos evaluation
        int o = 0;
        for (int c = 0; c < in_dim; ++c) {
          if (inc) CHECK(out[o++] == x[c]);
          for (int l = 0; l < L; ++l) {
            const double angle = std::pow(2.0, l) * std::numbers::pi * x[c];
            CHECK(out[o++] == doctest::Approx(std::sin(angle)).epsilon(1e-9));
            CHECK(out[o++] == doctest::Approx(std::cos(angle)).epsilon(1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("positional encoding: gradient matches finite differences") {
  Rng rng(5);
  const EncodingSpec spec{6, true};
  const int in_dim = 3;
  std::vector<double> x{0.31, -0.87, 1.43};
  std::vector<double> coef(spec.out_dim(in_dim));
  for (auto& c : coef) c = rng.uniform(-1.0, 1.0);

  auto loss = [&] {
    std::vector<double> out(coef.size());
    positional_encode<double>(spec, x.data(), 1, in_dim, out.data());
    double acc = 0;
    for (size_t i = 0; i < out.size(); ++i) acc += coef[i] * out[i];
    return acc;
  };

  EncodingCache<double> cache;
  std::vector<double> out(coef.size());
  positional_encode<double>(spec, x.data(), 1, in_dim, out.data(), &cache);
  std::vector<double> dx(in_dim, 0.0);
  positional_encode_backward<double>(spec, cache, coef.data(), dx.data());

  const auto rep = fdcheck::check_values(x.data(), dx.data(), in_dim, loss);
  INFO(rep.worst);
  CHECK(rep.failures == 0);
}

TEST_CASE("mlp: degenerate and hand-evaluated forward") {
  Rng rng(1);
  // zero weights -> last bias, for any input
  auto net = Mlp<double>::make("t", {3, 4, 2}, rng);
  for (auto& w : net.weights) std::fill(w.values.begin(), w.values.end(), 0.0);
  net.biases[1].values = {0.25, -0.75};
  MlpCache<double> cache;
  const std::vector<double> x{3.0, -1.0, 0.5};
  auto y = mlp_forward<double>(net, x, cache);
  CHECK(y[0] == 0.25);
  CHECK(y[1] == -0.75);

  // single identity layer
  auto id = Mlp<double>::make("id", {3, 3}, rng);
  std::fill(id.weights[0].values.begin(), id.weights[0].values.end(), 0.0);
  for (int i = 0; i < 3; ++i) id.weights[0].values[i * 3 + i] = 1.0;
  auto y2 = mlp_forward<double>(id, x, cache);
  CHECK(y2[0] == x[0]);
  CHECK(y2[1] == x[1]);
  CHECK(y2[2] == x[2]);

  // two-layer net, hand evaluation of max(0, Wx+b) chain:
  // z1 = [1*1 + 1*(-1), 2*1 + 0*(-1)] + [0, 0.5] = [0, 2.5]; relu -> [0, 2.5]
  // y = 1*0 - 1*2.5 + 0.25 = -2.25
  auto h = Mlp<double>::make("h", {2, 2, 1}, rng);
  h.weights[0].values = {1, 1, 2, 0};
  h.biases[0].values = {0, 0.5};
  h.weights[1].values = {1, -1};
  h.biases[1].values = {0.25};
  auto y3 = mlp_forward<double>(h, std::vector<double>{1.0, -1.0}, cache);
  CHECK(y3[0] == doctest::Approx(-2.25).epsilon(1e-15));
}

TEST_CASE("mlp: dimension mismatch and missing forward are contract errors") {
  Rng rng(2);
  auto net = Mlp<double>::make("t", {3, 2}, rng);
  MlpCache<double> cache;
  CHECK_THROWS_AS(mlp_forward<double>(net, std::vector<double>{1.0, 2.0}, cache),
                  std::invalid_argument);
  MlpCache<double> fresh;
  GradSink<double> sink;
  CHECK_THROWS_AS(mlp_backward<double>(net, fresh, std::vector<double>{1.0, 1.0}, sink),
                  std::logic_error);
}

TEST_CASE("mlp backward: zero upstream, linear adjoint, FD check") {
  Rng rng(9);
  auto net = Mlp<double>::make("t", {4, 8, 8, 3}, rng);
  std::vector<ParamTensor<double>*> params;
  net.collect_params(params);
  for (size_t i = 0; i < params.size(); ++i) params[i]->uid = int(i);

  MlpCache<double> cache;
  GradSink<double> sink;
  const std::vector<double> x{0.3, -0.8, 1.2, 0.05};

  // zero output_grad leaves accumulated grads unchanged
  mlp_forward<double>(net, x, cache);
  mlp_backward<double>(net, cache, std::vector<double>{0, 0, 0}, sink);
  for (auto* p : params)
    for (double g : p->grad) CHECK(g == 0.0);

  // single linear layer: input_grad = W^T dy
  auto lin = Mlp<double>::make("lin", {3, 2}, rng);
  MlpCache<double> lcache;
  mlp_forward<double>(lin, std::vector<double>{1.0, 2.0, 3.0}, lcache);
  const std::vector<double> dy{0.5, -1.5};
  GradSink<double> lsink;
  lin.weights[0].uid = 100;  // unused by direct sink
  auto dx = mlp_backward<double>(lin, lcache, dy, lsink);
  const auto& w = lin.weights[0].values;
  for (int j = 0; j < 3; ++j)
    CHECK(dx[j] == doctest::Approx(w[j] * dy[0] + w[3 + j] * dy[1]).epsilon(1e-14));

  // random small net: every parameter and input gradient matches central FD
  std::vector<double> coef{0.7, -0.2, 1.1};
  auto loss = [&] {
    MlpCache<double> c;
    auto y = mlp_forward<double>(net, x, c);
    return coef[0] * y[0] + coef[1] * y[1] + coef[2] * y[2];
  };
  for (auto* p : params) p->zero_grads();
  MlpCache<double> c2;
  mlp_forward<double>(net, x, c2);
  GradSink<double> s2;
  std::vector<double> x_mut = x;
  auto dxin = mlp_backward<double>(net, c2, coef, s2);
  auto rep = fdcheck::check_params(params, loss);
  INFO(rep.worst);
  CHECK(rep.failures == 0);
  CHECK(rep.checked > 50);

  auto loss_x = [&] {
    MlpCache<double> c;
    auto y = mlp_forward<double>(net, x_mut, c);
    return coef[0] * y[0] + coef[1] * y[1] + coef[2] * y[2];
  };
  auto repx = fdcheck::check_values(x_mut.data(), dxin.data(), x_mut.size(), loss_x);
  INFO(repx.worst);
  CHECK(repx.failures == 0);
}

TEST_CASE("adam: fixed-point behaviors") {
  AdamConfig<double> cfg;
  Adam<double> opt(cfg);

  ParamTensor<double> p("p", {1});
  p.values[0] = 1.0;
  p.uid = 0;
  std::vector<ParamTensor<double>*> params{&p};

  // zero grads -> parameter unchanged
  opt.step(params, 0.1, 1);
  CHECK(p.values[0] == 1.0);

  // g = 1 at step 1: bias-corrected step is lr / (1 + eps) to first order
  Adam<double> opt2(cfg);
  p.grad[0] = 1.0;
  opt2.step(params, 0.1, 1);
  CHECK(p.values[0] == doctest::Approx(0.9).epsilon(1e-6));

  // two identical params with identical grads stay identical
  ParamTensor<double> a("a", {4}), b("b", {4});
  a.uid = 0;
  b.uid = 1;
  a.values = b.values = {0.5, -0.5, 1.0, 2.0};
  Adam<double> opt3(cfg);
  Rng rng(17);
  std::vector<ParamTensor<double>*> both{&a, &b};
  for (int t = 1; t <= 20; ++t) {
    for (int i = 0; i < 4; ++i) a.grad[i] = b.grad[i] = rng.uniform(-1.0, 1.0);
    opt3.step(both, 0.05, t);
    for (int i = 0; i < 4; ++i) CHECK(a.values[i] == b.values[i]);
  }

  // non-finite grad -> hard error naming the parameter
  a.grad[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(opt3.step(both, 0.05, 21), doctest::Contains("'a'"), std::runtime_error);
}

TEST_CASE("param tensor: zero_grads and shape invariants") {
  ParamTensor<float> p("x", {3, 4});
  CHECK(p.values.size() == 12);
  CHECK(p.grad.size() == p.values.size());
  for (auto& g : p.grad) g = 1.f;
  p.zero_grads();
  for (auto g : p.grad) CHECK(g == 0.f);
}

TEST_CASE("checkpoint container: bit-exact round trip and error paths") {
  const std::string dir = (std::filesystem::temp_directory_path() / "pdrf_ckpt_test").string();
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/a.ckpt";

  Rng rng(5);
  std::vector<CheckpointRecord> records;
  records.push_back({"grid.coar.x", {4, 16}, std::vector<float>(64)});
  records.push_back({"mlp.w0", {3, 5}, std::vector<float>(15)});
  for (auto& r : records)
    for (auto& v : r.values) v = float(rng.uniform(-1.0, 1.0));

  write_checkpoint(path, records);
  const auto loaded = read_checkpoint(path);
  REQUIRE(loaded.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded[i].name == records[i].name);
    CHECK(loaded[i].shape == records[i].shape);
    CHECK(loaded[i].values == records[i].values);
  }

  const std::string path2 = dir + "/b.ckpt";
  write_checkpoint(path2, loaded);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);

  // bad magic
  {
    std::ofstream bad(dir + "/bad.ckpt", std::ios::binary);
    bad << "NOPE" << std::string(16, '\0');
  }
  CHECK_THROWS_WITH_AS(read_checkpoint(dir + "/bad.ckpt"), doctest::Contains("magic"),
                       std::runtime_error);

  // version mismatch
  {
    std::ofstream v2(dir + "/v2.ckpt", std::ios::binary);
    const uint32_t version = kCheckpointVersion + 7;
    v2 << "PDRF";
    v2.write(reinterpret_cast<const char*>(&version), 4);
  }
  CHECK_THROWS_WITH_AS(read_checkpoint(dir + "/v2.ckpt"), doctest::Contains("version"),
                       std::runtime_error);

  // truncation
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    std::ofstream out(dir + "/trunc.ckpt", std::ios::binary);
    out.write(bytes.data(), long(bytes.size() / 2));
  }
  CHECK_THROWS_AS(read_checkpoint(dir + "/trunc.ckpt"), std::runtime_error);
}
