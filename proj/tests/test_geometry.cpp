#include <doctest.h>

#include <cmath>
#include <vector>

#include "pdrf/camera.hpp"
#include "pdrf/sampling.hpp"

using namespace pdrf;

namespace {

Camera<double> identity_cam(double focal, double cx, double cy, int w = 100, int h = 100) {
  Camera<double> c;
  c.focal = focal;
  c.cx = cx;
  c.cy = cy;
  c.width = w;
  c.height = h;
  return c;
}

}  // namespace

TEST_CASE("generate_ray: fixed directions and unit norm") {
  const auto cam = identity_cam(100, 50, 50);
  const auto on_axis = generate_ray<double>(cam, 50, 50);
  CHECK(on_axis.origin.x == 0);
  CHECK(on_axis.direction.x == doctest::Approx(0));
  CHECK(on_axis.direction.y == doctest::Approx(0));
  CHECK(on_axis.direction.z == doctest::Approx(-1));

  const auto off = generate_ray<double>(cam, 150, 50);
  CHECK(off.direction.x == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(off.direction.y == doctest::Approx(0));
  CHECK(off.direction.z == doctest::Approx(-1 / std::sqrt(2.0)));

  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto r = generate_ray<double>(cam, rng.uniform(-20, 120), rng.uniform(-20, 120));
    CHECK(norm(r.direction) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("generate_ray / project round-trip on pixels") {
  const auto cam = Camera<double>::look_at({2.5, -1.0, 3.0}, {0, 0, 0}, {0, -1, 0}, 90, 64, 64);
  // rotation stays orthonormal with unit determinant
  const auto& m = cam.rotation.m;
  const Vec3<double> c0 = cam.rotation.col(0), c1 = cam.rotation.col(1), c2 = cam.rotation.col(2);
  CHECK(dot(c0, c1) == doctest::Approx(0).epsilon(1e-9));
  CHECK(dot(c0, c2) == doctest::Approx(0).epsilon(1e-9));
  CHECK(norm(c0) == doctest::Approx(1));
  const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
  CHECK(det == doctest::Approx(1.0).epsilon(1e-9));

  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const double px = rng.uniform(-5, 69), py = rng.uniform(-5, 69);
    const auto ray = generate_ray<double>(cam, px, py);
    const Vec3<double> point = ray.origin + ray.direction * rng.uniform(0.5, 10.0);
    double qx, qy;
    project(cam, point, &qx, &qy);
    CHECK(std::abs(qx - px) < 1e-4);
    CHECK(std::abs(qy - py) < 1e-4);
  }
  auto project_behind = [&] {
    double qx, qy;
    project(cam, cam.origin + cam.rotation.col(2) * 2.0, &qx, &qy);  // behind the camera
  };
  CHECK_THROWS_AS(project_behind(), std::invalid_argument);
}

TEST_CASE("ray direction pixel-gradient matches finite differences") {
  const auto cam = Camera<double>::look_at({1.0, 2.0, 3.5}, {0, 0, 0}, {0, -1, 0}, 80, 64, 64);
  Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    const double px = rng.uniform(0, 63), py = rng.uniform(0, 63);
    const Vec3<double> coef{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    RayDirCache<double> cache;
    generate_ray<double>(cam, px, py, &cache);
    double dpx = 0, dpy = 0;
    ray_dir_backward(cam, cache, coef, &dpx, &dpy);
    const double h = 1e-5;
    auto value = [&](double x, double y) {
      return dot(coef, generate_ray<double>(cam, x, y).direction);
    };
    const double fdx = (value(px + h, py) - value(px - h, py)) / (2 * h);
    const double fdy = (value(px, py + h) - value(px, py - h)) / (2 * h);
    CHECK(dpx == doctest::Approx(fdx).epsilon(1e-5));
    CHECK(dpy == doctest::Approx(fdy).epsilon(1e-5));
  }
}

TEST_CASE("stratified_samples: midpoints, jitter containment, edge cases") {
  Rng rng(4);
  const auto s = stratified_samples<double>(0, 1, 4, false, rng);
  REQUIRE(s.t.size() == 4);
  CHECK(s.t[0] == doctest::Approx(0.125));
  CHECK(s.t[1] == doctest::Approx(0.375));
  CHECK(s.t[2] == doctest::Approx(0.625));
  CHECK(s.t[3] == doctest::Approx(0.875));
  CHECK(s.delta[0] == doctest::Approx(0.25));
  CHECK(s.delta[3] == doctest::Approx(0.125));  // far - t_N

  for (int k = 0; k < 20; ++k) {
    const auto j = stratified_samples<double>(2, 4, 8, true, rng);
    for (int i = 0; i < 8; ++i) {
      CHECK(j.t[i] >= 2 + i * 0.25);
      CHECK(j.t[i] < 2 + (i + 1) * 0.25);
    }
    for (size_t i = 1; i < j.t.size(); ++i) CHECK(j.t[i] > j.t[i - 1]);
  }

  const auto one = stratified_samples<double>(2, 4, 1, false, rng);
  CHECK(one.t[0] == doctest::Approx(3.0));

  CHECK_THROWS_AS(stratified_samples<double>(4, 2, 4, false, rng), std::invalid_argument);
  CHECK_THROWS_AS(stratified_samples<double>(0, 1, 0, false, rng), std::invalid_argument);
}

TEST_CASE("importance_sample: hand CDF inversion") {
  // 2 bins over [0,1], weights (0.25, 0.75), variate u = 0.5:
  // depth = 0.5 + ((0.5 - 0.25) / 0.75) * 0.5 = 2/3
  const std::vector<double> w{0.25, 0.75};
  // stratified with n_f=1 gives u = uniform()/1; pick a seed-free check by
  // scanning seeds until the variate is close to 0.5 is fragile; instead use
  // n_f large and verify the CDF inversion at the exact stratified points.
  // Directly: u = (j + r)/n with r = 0 via a zero rng is not exposed, so we
  // check the quantile through the empirical distribution instead:
  Rng rng(5);
  const auto out = importance_sample<double>(w, 0, 1, 200000, rng);
  // Quantile at 0.5: count of samples below the hand value ~ 50%
  const double hand = 0.5 + ((0.5 - 0.25) / 0.75) * 0.5;
  int below = 0;
  for (double d : out)
    if (d < hand) ++below;
  CHECK(double(below) / double(out.size()) == doctest::Approx(0.5).epsilon(0.01));
  // all samples from bin 2 map inside it, bin 1 inside it
  for (double d : out) CHECK((d >= 0 && d <= 1));
}

TEST_CASE("importance_sample: point mass and uniform fallback") {
  Rng rng(6);
  std::vector<double> w(8, 0.0);
  w[5] = 3.0;
  const auto out = importance_sample<double>(w, 0, 2, 500, rng);
  for (double d : out) {
    CHECK(d >= 5 * 0.25);
    CHECK(d <= 6 * 0.25);
  }

  const std::vector<double> zeros(8, 0.0);
  const auto fb = importance_sample<double>(zeros, 0, 2, 4000, rng);
  double mn = 1e9, mx = -1e9, mean = 0;
  for (double d : fb) {
    mn = std::min(mn, d);
    mx = std::max(mx, d);
    mean += d;
  }
  mean /= double(fb.size());
  CHECK(mn < 0.05);
  CHECK(mx > 1.95);
  CHECK(mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("importance_sample: empirical histogram matches the target PDF") {
  Rng rng(7);
  const int bins = 64;
  std::vector<double> w(bins);
  for (auto& x : w) x = rng.uniform(0.0, 1.0);
  double total = 0;
  for (double x : w) total += x;

  const int n = 100000;
  const auto out = importance_sample<double>(w, 0, 1, n, rng);
  std::vector<int> hist(bins, 0);
  for (double d : out) {
    int b = int(d * bins);
    if (b == bins) b = bins - 1;
    ++hist[b];
  }
  double l1 = 0;
  for (int b = 0; b < bins; ++b) l1 += std::abs(double(hist[b]) / n - w[b] / total);
  CHECK(l1 < 0.05);
}

TEST_CASE("merge_depths: strictly increasing with N_c + N_f entries") {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto coarse = stratified_samples<double>(1, 5, 16, true, rng);
    std::vector<double> w(16);
    for (auto& x : w) x = rng.uniform(0.0, 1.0);
    auto fine = importance_sample<double>(w, 1, 5, 16, rng);
    std::sort(fine.begin(), fine.end());
    const auto merged = merge_depths<double>(coarse.t, fine, 1, 5);
    REQUIRE(merged.t.size() == 32);
    for (size_t i = 1; i < merged.t.size(); ++i) CHECK(merged.t[i] > merged.t[i - 1]);
    for (size_t i = 0; i + 1 < merged.t.size(); ++i)
      CHECK(merged.delta[i] == doctest::Approx(merged.t[i + 1] - merged.t[i]));
  }

  // exact duplicates get nudged
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{2.0, 2.0, 4.0};
  const auto m = merge_depths<double>(a, b, 1, 5);
  for (size_t i = 1; i < m.t.size(); ++i) CHECK(m.t[i] > m.t[i - 1]);
}
