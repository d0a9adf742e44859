#include <doctest.h>

#include <cmath>
#include <vector>

#include "pdrf/kernels/kernels.hpp"
#include "pdrf/rng.hpp"

using namespace pdrf;

namespace {

std::vector<float> random_vec(size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform(-1.0, 1.0));
  return v;
}

void check_close(const std::vector<float>& a, const std::vector<float>& b, float tol) {
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const float mag = std::max({std::abs(a[i]), std::abs(b[i]), 1.f});
    CHECK(std::abs(a[i] - b[i]) <= tol * mag);
  }
}

struct Dims {
  size_t m, n, k;
};

const Dims kDims[] = {{1, 1, 1},    {2, 4, 8},  {3, 5, 17},   {7, 9, 33},
                      {16, 16, 64}, {5, 3, 7},  {8, 12, 100}, {2, 6, 255}};

}  // namespace

TEST_CASE("dispatched gemm kernels match the scalar reference") {
  // On AVX2 hosts this exercises the SIMD variants; elsewhere it degenerates
  // to an identity check. Either way dispatch must agree with ref::.
  INFO("active backend: ", kernels::backend_name());
  Rng rng(42);

  for (const auto& d : kDims) {
    CAPTURE(d.m);
    CAPTURE(d.n);
    CAPTURE(d.k);
    const auto a = random_vec(d.m * d.k, rng);
    const auto b_nt = random_vec(d.n * d.k, rng);
    const auto b_nn = random_vec(d.k * d.n, rng);
    auto c0 = random_vec(d.m * d.n, rng);
    auto c1 = c0;

    kernels::gemm_nt(a.data(), b_nt.data(), c0.data(), d.m, d.n, d.k, 0.f);
    kernels::ref::gemm_nt(a.data(), b_nt.data(), c1.data(), d.m, d.n, d.k, 0.f);
    check_close(c0, c1, 1e-5f);

    kernels::gemm_nt(a.data(), b_nt.data(), c0.data(), d.m, d.n, d.k, 0.5f);
    kernels::ref::gemm_nt(a.data(), b_nt.data(), c1.data(), d.m, d.n, d.k, 0.5f);
    check_close(c0, c1, 1e-5f);

    kernels::gemm_nn(a.data(), b_nn.data(), c0.data(), d.m, d.n, d.k, 0.f);
    kernels::ref::gemm_nn(a.data(), b_nn.data(), c1.data(), d.m, d.n, d.k, 0.f);
    check_close(c0, c1, 1e-5f);

    const auto at = random_vec(d.k * d.m, rng);
    const auto bt = random_vec(d.k * d.n, rng);
    kernels::gemm_tn_acc(at.data(), bt.data(), c0.data(), d.m, d.n, d.k);
    kernels::ref::gemm_tn_acc(at.data(), bt.data(), c1.data(), d.m, d.n, d.k);
    check_close(c0, c1, 1e-5f);
  }
}

TEST_CASE("elementwise kernels match the scalar reference") {
  Rng rng(7);
  for (size_t n : {size_t(1), size_t(7), size_t(8), size_t(9), size_t(31), size_t(64),
                   size_t(1000)}) {
    CAPTURE(n);
    const auto x = random_vec(n, rng);
    const auto z = random_vec(n, rng);
    auto y0 = random_vec(n, rng);
    auto y1 = y0;

    std::vector<float> a0(n), a1(n);
    kernels::relu(z.data(), a0.data(), n);
    kernels::ref::relu(z.data(), a1.data(), n);
    CHECK(a0 == a1);

    kernels::relu_backward(z.data(), x.data(), a0.data(), n);
    kernels::ref::relu_backward(z.data(), x.data(), a1.data(), n);
    CHECK(a0 == a1);

    kernels::axpy(0.37f, x.data(), y0.data(), n);
    kernels::ref::axpy(0.37f, x.data(), y1.data(), n);
    check_close(y0, y1, 1e-6f);

    kernels::add(x.data(), y0.data(), n);
    kernels::ref::add(x.data(), y1.data(), n);
    check_close(y0, y1, 1e-6f);

    kernels::scale(-1.7f, y0.data(), n);
    kernels::ref::scale(-1.7f, y1.data(), n);
    check_close(y0, y1, 1e-6f);

    const float d0 = kernels::dot(x.data(), z.data(), n);
    const float d1 = kernels::ref::dot(x.data(), z.data(), n);
    CHECK(std::abs(d0 - d1) <= 1e-5f * std::max(1.f, std::abs(d1)));

    kernels::fill(0.25f, y0.data(), n);
    kernels::ref::fill(0.25f, y1.data(), n);
    CHECK(y0 == y1);
  }
}

TEST_CASE("matrix reduction kernels match the scalar reference") {
  Rng rng(11);
  for (const auto& d : kDims) {
    const auto f = random_vec(d.m * d.n, rng);
    const auto w = random_vec(d.m, rng);
    std::vector<float> o0(d.n), o1(d.n);
    kernels::weighted_rowsum(f.data(), w.data(), o0.data(), d.m, d.n);
    kernels::ref::weighted_rowsum(f.data(), w.data(), o1.data(), d.m, d.n);
    check_close(o0, o1, 1e-5f);

    auto y0 = random_vec(d.m * d.n, rng);
    auto y1 = y0;
    const auto bias = random_vec(d.n, rng);
    kernels::add_bias_rows(y0.data(), bias.data(), d.m, d.n);
    kernels::ref::add_bias_rows(y1.data(), bias.data(), d.m, d.n);
    check_close(y0, y1, 1e-6f);

    auto s0 = random_vec(d.n, rng);
    auto s1 = s0;
    kernels::colsum_acc(y0.data(), s0.data(), d.m, d.n);
    kernels::ref::colsum_acc(y1.data(), s1.data(), d.m, d.n);
    check_close(s0, s1, 1e-5f);
  }
}

TEST_CASE("adam kernel matches the scalar reference") {
  Rng rng(23);
  for (size_t n : {size_t(1), size_t(5), size_t(8), size_t(100), size_t(257)}) {
    auto p0 = random_vec(n, rng);
    auto p1 = p0;
    const auto g = random_vec(n, rng);
    auto m0 = random_vec(n, rng);
    auto m1 = m0;
    auto v0 = random_vec(n, rng);
    for (auto& x : v0) x = std::abs(x);
    auto v1 = v0;
    kernels::adam_update(p0.data(), g.data(), m0.data(), v0.data(), n, 1e-3f, 0.9f, 0.999f, 1e-8f,
                         10.f, 1000.f);
    kernels::ref::adam_update(p1.data(), g.data(), m1.data(), v1.data(), n, 1e-3f, 0.9f, 0.999f,
                              1e-8f, 10.f, 1000.f);
    check_close(p0, p1, 1e-6f);
    check_close(m0, m1, 1e-6f);
    check_close(v0, v1, 1e-6f);
  }
}
