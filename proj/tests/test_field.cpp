#include <doctest.h>

#include <vector>

#include "fd_check.hpp"
#include "pdrf/grid.hpp"

using namespace pdrf;

namespace {

FeatureGrid<double> tiny_grid(Rng& rng, std::array<int, 3> res = {4, 5, 6},
                              std::array<int, 3> chans = {3, 2, 2}) {
  Box<double> box;
  box.lo = {-1, -1, -1};
  box.hi = {1, 1, 1};
  return FeatureGrid<double>::make("g", res, chans, box, rng);
}

}  // namespace

TEST_CASE("grid_query: constant field anywhere in bounds") {
  Rng rng(1);
  auto g = tiny_grid(rng);
  for (auto& f : g.factors)
    for (auto& v : f.values) v = 0.75;
  std::vector<double> out(g.feature_dim());
  Rng qr(2);
  for (int k = 0; k < 20; ++k) {
    const double p[3] = {qr.uniform(-1.0, 1.0), qr.uniform(-1.0, 1.0), qr.uniform(-1.0, 1.0)};
    grid_query<double>(g, p, out.data(), nullptr);
    for (double v : out) CHECK(v == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("grid_query: exact at nodes, linear between them") {
  Rng rng(3);
  auto g = tiny_grid(rng);
  const double step_x = 2.0 / (g.resolution[0] - 1);
  const double step_y = 2.0 / (g.resolution[1] - 1);
  const double step_z = 2.0 / (g.resolution[2] - 1);
  const double p[3] = {-1 + 1 * step_x, -1 + 2 * step_y, -1 + 3 * step_z};
  std::vector<double> out(g.feature_dim());
  grid_query<double>(g, p, out.data(), nullptr);
  int off = 0;
  const int nodes[3] = {1, 2, 3};
  for (int a = 0; a < 3; ++a) {
    for (int ch = 0; ch < g.channels[a]; ++ch)
      CHECK(out[off + ch] ==
            doctest::Approx(g.factors[a].values[size_t(ch) * g.resolution[a] + nodes[a]])
                .epsilon(1e-12));
    off += g.channels[a];
  }

  // linearity along x between nodes 1 and 2 at t in {0, .25, .5, .75, 1}
  std::vector<double> at_node1(out), at_node2(g.feature_dim());
  const double p2[3] = {-1 + 2 * step_x, p[1], p[2]};
  grid_query<double>(g, p2, at_node2.data(), nullptr);
  for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double pt[3] = {p[0] + t * step_x, p[1], p[2]};
    grid_query<double>(g, pt, out.data(), nullptr);
    for (int ch = 0; ch < g.channels[0]; ++ch)
      CHECK(out[ch] == doctest::Approx((1 - t) * at_node1[ch] + t * at_node2[ch]).epsilon(1e-6));
  }
}

TEST_CASE("grid_query: 1-D midpoint interpolation") {
  Rng rng(4);
  Box<double> box;
  box.lo = {0, 0, 0};
  box.hi = {1, 1, 1};
  auto g = FeatureGrid<double>::make("g", {2, 2, 2}, {1, 1, 1}, box, rng);
  g.factors[0].values = {0.0, 1.0};
  const double p[3] = {0.5, 0.25, 0.75};
  std::vector<double> out(3);
  grid_query<double>(g, p, out.data(), nullptr);
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("grid_query: out-of-bounds queries clamp") {
  Rng rng(5);
  auto g = tiny_grid(rng);
  std::vector<double> inside(g.feature_dim()), outside(g.feature_dim());
  const double pi[3] = {1.0, 0.3, -1.0};
  const double po[3] = {1.9, 0.3, -4.0};
  grid_query<double>(g, pi, inside.data(), nullptr);
  grid_query<double>(g, po, outside.data(), nullptr);
  for (size_t i = 0; i < inside.size(); ++i) CHECK(inside[i] == doctest::Approx(outside[i]));
}

TEST_CASE("grid_query: gradients match finite differences") {
  Rng rng(6);
  auto g = tiny_grid(rng);
  std::vector<ParamTensor<double>*> params;
  g.collect_params(params);
  for (size_t i = 0; i < params.size(); ++i) params[i]->uid = int(i);

  std::vector<double> coef(g.feature_dim());
  for (auto& c : coef) c = rng.uniform(-1.0, 1.0);
  double point[3] = {0.23, -0.57, 0.78};

  auto loss = [&] {
    std::vector<double> out(g.feature_dim());
    grid_query<double>(g, point, out.data(), nullptr);
    double acc = 0;
    for (size_t i = 0; i < out.size(); ++i) acc += coef[i] * out[i];
    return acc;
  };

  GridCache<double> cache;
  std::vector<double> out(g.feature_dim());
  grid_query<double>(g, point, out.data(), &cache);
  GradSink<double> sink;
  double dpoint[3] = {0, 0, 0};
  grid_query_backward<double>(g, cache, coef.data(), sink, dpoint);

  auto rep = fdcheck::check_params(params, loss);
  INFO(rep.worst);
  CHECK(rep.failures == 0);
  auto repx = fdcheck::check_values(point, dpoint, 3, loss);
  INFO(repx.worst);
  CHECK(repx.failures == 0);
}

TEST_CASE("tv_loss: fixed values and properties") {
  Rng rng(7);
  auto g = tiny_grid(rng);
  for (auto& f : g.factors)
    for (auto& v : f.values) v = 0.4;
  CHECK(tv_loss<double>(g) == 0.0);

  // single row [0,1,0]: mean of {1,1} = 1
  Box<double> box;
  auto g1 = FeatureGrid<double>::make("g1", {3, 2, 2}, {1, 1, 1}, box, rng);
  g1.factors[0].values = {0.0, 1.0, 0.0};
  std::fill(g1.factors[1].values.begin(), g1.factors[1].values.end(), 0.0);
  std::fill(g1.factors[2].values.begin(), g1.factors[2].values.end(), 0.0);
  CHECK(tv_loss<double>(g1) == doctest::Approx(1.0).epsilon(1e-12));

  // doubling all factor values quadruples the loss
  auto g2 = tiny_grid(rng);
  const double base = tv_loss<double>(g2);
  for (auto& f : g2.factors)
    for (auto& v : f.values) v *= 2.0;
  CHECK(tv_loss<double>(g2) == doctest::Approx(4.0 * base).epsilon(1e-9));
  CHECK(base >= 0.0);
}

TEST_CASE("tv_loss: zero iff every factor row is constant") {
  Rng rng(8);
  auto g = tiny_grid(rng);
  for (int a = 0; a < 3; ++a)
    for (int ch = 0; ch < g.channels[a]; ++ch) {
      const double v = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < g.resolution[a]; ++i)
        g.factors[a].values[size_t(ch) * g.resolution[a] + i] = v;
    }
  CHECK(tv_loss<double>(g) == 0.0);
  g.factors[1].values[3] += 1e-3;
  CHECK(tv_loss<double>(g) > 0.0);
}

TEST_CASE("tv_loss: gradient matches finite differences") {
  Rng rng(9);
  auto g = tiny_grid(rng);
  std::vector<ParamTensor<double>*> params;
  g.collect_params(params);
  for (size_t i = 0; i < params.size(); ++i) params[i]->uid = int(i);

  GradSink<double> sink;
  tv_loss_backward<double>(g, 1.0, sink);
  auto rep = fdcheck::check_params(params, [&] { return tv_loss<double>(g); });
  INFO(rep.worst);
  CHECK(rep.failures == 0);
}
