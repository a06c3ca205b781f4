#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcn/conv.hpp"
#include "lcn/poly.hpp"
#include "test_support.hpp"

using namespace lcn;
using test::make_vector;

TEST_CASE("architecture dimension derivation") {
  auto a = Architecture::create(8, {4}, {2});
  CHECK(a.dims() == std::vector<int>{8, 3});

  auto b = Architecture::create(5, {1}, {1});
  CHECK(b.dims() == std::vector<int>{5, 5});

  auto c = Architecture::create(10, {2, 3}, {2, 2});
  CHECK(c.dims() == std::vector<int>{10, 5, 2});
  CHECK(c.final_width() == 6);
  CHECK(c.final_stride() == 4);
}

TEST_CASE("architecture validation errors") {
  try {
    Architecture::create(8, {3}, {2});
    FAIL("expected NonIntegerDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegerDimension);
  }
  try {
    Architecture::create(2, {3}, {1});
    FAIL("expected FilterTooWide");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FilterTooWide);
  }
  try {
    Architecture::create(4, {2, 2}, {1, 0});
    FAIL("expected NonPositiveDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveDimension);
  }
  CHECK_THROWS_AS(Architecture::create(4, {2, 2}, {1}), Error);
}

TEST_CASE("to_matrix banded layout") {
  // The 3x8, stride-2 example.
  auto cm = to_matrix(make_vector({1.0, 2.0, 3.0, 4.0}), 8, 2);
  Eigen::MatrixXd m = cm.dense();
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 8);
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 8; ++c) {
      const int n = c - 2 * j;
      const double expect = (n >= 0 && n < 4) ? n + 1.0 : 0.0;
      CHECK(m(j, c) == expect);
    }

  CHECK(to_matrix(make_vector({1.0}), 4, 1)
            .dense()
            .isApprox(Eigen::MatrixXd::Identity(4, 4)));

  Eigen::MatrixXd band = to_matrix(make_vector({1.0, 2.0}), 3, 1).dense();
  Eigen::MatrixXd expect(2, 3);
  expect << 1, 2, 0, 0, 1, 2;
  CHECK(band.isApprox(expect));
}

TEST_CASE("final filter recursion") {
  auto arch = Architecture::create(10, {2, 3}, {2, 2});
  FilterStack w;
  w.filters = {make_vector({1.0, 2.0}), make_vector({3.0, 4.0, 5.0})};
  auto v = final_filter(arch, w);
  REQUIRE(v.coeffs.size() == 6);
  CHECK(v.stride == 4);
  Eigen::VectorXd expect = make_vector({3.0, 6.0, 4.0, 8.0, 5.0, 10.0});
  CHECK((v.coeffs - expect).cwiseAbs().maxCoeff() == 0.0);

  // Network matrix equals the explicit two-matrix product.
  Eigen::MatrixXd prod = network_dense(arch, w);
  CHECK((network_matrix(arch, w).dense() - prod).cwiseAbs().maxCoeff() <
        1e-12);

  // Binomial convolution.
  auto arch2 = Architecture::create(4, {2, 2}, {1, 1});
  FilterStack ones;
  ones.filters = {make_vector({1.0, 1.0}), make_vector({1.0, 1.0})};
  auto v2 = final_filter(arch2, ones);
  CHECK(v2.coeffs.isApprox(make_vector({1.0, 2.0, 1.0})));

  // Single layer: identity with to_matrix.
  auto arch1 = Architecture::create(8, {4}, {2});
  FilterStack w1;
  w1.filters = {make_vector({1.0, 2.0, 3.0, 4.0})};
  CHECK(final_filter(arch1, w1).coeffs.isApprox(w1.filters[0]));
  CHECK(network_matrix(arch1, w1).dense().isApprox(
      to_matrix(w1.filters[0], 8, 2).dense()));

  // A zero layer annihilates the final filter.
  FilterStack wz = w;
  wz.filters[1].setZero();
  CHECK(final_filter(arch, wz).coeffs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("filling candidate predicate") {
  CHECK(Architecture::create(11, {3, 5, 3}, {1, 1, 1}).is_filling_candidate());
  CHECK_FALSE(Architecture::create(4, {2, 2}, {1, 1}).is_filling_candidate());
  CHECK_FALSE(Architecture::create(8, {4}, {2}).is_filling_candidate());
}

TEST_CASE("shape mismatch is rejected") {
  auto arch = Architecture::create(10, {2, 3}, {2, 2});
  FilterStack bad;
  bad.filters = {make_vector({1.0, 2.0, 3.0}), make_vector({3.0, 4.0, 5.0})};
  CHECK_THROWS_AS(final_filter(arch, bad), Error);
}

TEST_CASE("property: network matrix equals structured form") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    auto arch = test::random_architecture(rng, 4, 5, 3, 64);
    auto w = test::random_filters(rng, arch);
    Eigen::MatrixXd a = network_matrix(arch, w).dense();
    Eigen::MatrixXd b = network_dense(arch, w);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("property: pairwise rescaling leaves the final filter unchanged") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto arch = test::random_architecture(rng, 4, 5, 3, 64, 2);
    auto w = test::random_filters(rng, arch);
    const int N = arch.depth();
    const int i = static_cast<int>(rng.uniform_int(0, N - 1));
    int j = static_cast<int>(rng.uniform_int(0, N - 1));
    if (j == i) j = (j + 1) % N;
    const double kappa = rng.uniform(0.25, 4.0);

    FilterStack scaled = w;
    scaled.filters[i] /= kappa;
    scaled.filters[j] *= kappa;

    auto v0 = final_filter(arch, w).coeffs;
    auto v1 = final_filter(arch, scaled).coeffs;
    const double scale = std::max(1.0, v0.cwiseAbs().maxCoeff());
    CHECK((v0 - v1).cwiseAbs().maxCoeff() / scale < 1e-12);
  }
}

TEST_CASE("property: final filter equals the strided polynomial product") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto arch = test::random_architecture(rng, 4, 5, 3, 64);
    auto w = test::random_filters(rng, arch);
    RealPoly prod{{1.0}};
    for (int i = 1; i <= arch.depth(); ++i)
      prod = multiply(prod, stretch(w.filters[i - 1], i, arch.strides()));
    auto v = final_filter(arch, w).coeffs;
    REQUIRE(static_cast<int>(prod.coeffs.size()) == v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      CHECK(std::abs(prod.coeffs[i] - v(i)) < 1e-12);
  }
}
