#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "fstress/faa_di_bruno.hpp"
#include "fstress/verify.hpp"
#include "support.hpp"

using namespace fstress;

namespace {

SymmetricMatrix matrix2(double a00, double a01, double a11) {
  SymmetricMatrix a(2);
  a.set(0, 0, a00);
  a.set(0, 1, a01);
  a.set(1, 1, a11);
  return a;
}

SymmetricMatrix random_symmetric(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SymmetricMatrix a(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) a.set(i, j, unit(rng));
  return a;
}

}  // namespace

TEST_CASE("quadratic form application") {
  const SymmetricMatrix a = matrix2(2.0, 1.0, 0.0);
  const std::vector<double> x = {1.0, 2.0};
  const QuadForm q = quad_form_apply(a, x);
  REQUIRE(q.ax.size() == 2);
  CHECK(q.ax[0] == 4.0);
  CHECK(q.ax[1] == 1.0);
  CHECK(q.gx == 6.0);
}

TEST_CASE("identity function on x'x has constant Hessian") {
  const SymmetricMatrix a = SymmetricMatrix::identity(3);
  const std::vector<double> x = {0.5, -1.0, 2.0};
  const DerivTensors t = faa_di_bruno_general(x, a, {BaseFunction::Identity, 1.0});
  CHECK(t.value == doctest::Approx(0.25 + 1.0 + 4.0).epsilon(1e-15));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.g1(i) == doctest::Approx(2.0 * x[i]).epsilon(1e-15));
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(t.h2(i, j) == (i == j ? 2.0 : 0.0));
  }
  // Orders three and four of a quadratic vanish identically.
  for (double v : t.third) CHECK(v == 0.0);
  for (double v : t.fourth) CHECK(v == 0.0);
}

TEST_CASE("squared quadratic form at a hand-checked point") {
  // f = t^2 composed with t = x'Ax, A = [[1,-1],[-1,1]], x = (0,1):
  // t = 1, Ax = (-1, 1).
  const SymmetricMatrix a = matrix2(1.0, -1.0, 1.0);
  const std::vector<double> x = {0.0, 1.0};
  const DerivTensors t = faa_di_bruno_general(x, a, {BaseFunction::Identity, 2.0});

  CHECK(t.value == 1.0);
  CHECK(t.g1(0) == -4.0);
  CHECK(t.g1(1) == 4.0);
  CHECK(t.h2(0, 0) == 12.0);
  CHECK(t.h2(0, 1) == -12.0);
  CHECK(t.h2(1, 0) == -12.0);
  CHECK(t.h2(1, 1) == 12.0);
  // Every order-3 entry is +-24; the sign flips with each index moved
  // between 0 and 1.
  CHECK(t.h3(0, 0, 0) == -24.0);
  CHECK(t.h3(0, 0, 1) == 24.0);
  CHECK(t.h3(0, 1, 1) == -24.0);
  CHECK(t.h3(1, 1, 1) == 24.0);
  CHECK(t.h4(0, 0, 0, 0) == 24.0);
  CHECK(t.h4(0, 0, 0, 1) == -24.0);
  CHECK(t.h4(0, 1, 0, 1) == 24.0);
  CHECK(t.h4(1, 1, 1, 1) == 24.0);
}

TEST_CASE("scaling the matrix scales value and form linearly for identity") {
  std::mt19937_64 rng(11);
  const SymmetricMatrix a = random_symmetric(rng, 4);
  SymmetricMatrix ca = a;
  ca.scale(3.0);
  std::vector<double> x = {0.3, -0.8, 1.1, 0.5};
  const QuadForm qa = quad_form_apply(a, x);
  const QuadForm qc = quad_form_apply(ca, x);
  CHECK(qc.gx == doctest::Approx(3.0 * qa.gx).epsilon(1e-15));
  const DerivTensors ta = faa_di_bruno_general(x, a, {BaseFunction::Identity, 1.0});
  const DerivTensors tc = faa_di_bruno_general(x, ca, {BaseFunction::Identity, 1.0});
  CHECK(tc.value == doctest::Approx(3.0 * ta.value).epsilon(1e-15));
}

TEST_CASE("gradient matches coordinate-wise central differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (BaseFunction base : kAllBaseFunctions) {
    for (double q : {0.5, 1.0, 2.0}) {
      // Draw until the quadratic form is comfortably positive; the
      // logarithm with a fractional power additionally needs ln(gx) > 0.
      const double floor_gx =
          base == BaseFunction::Log && q != std::floor(q) ? 1.2 : 0.25;
      SymmetricMatrix a;
      std::vector<double> x(5);
      double gx = 0.0;
      do {
        a = random_symmetric(rng, 5);
        for (double& v : x) v = unit(rng);
        gx = quad_form_apply(a, x).gx;
      } while (gx < floor_gx);

      const FSpec spec{base, q};
      const DerivTensors t = faa_di_bruno_general(x, a, spec);
      const auto field = [&](std::span<const double> y) {
        return faa_di_bruno_general(y, a, spec, 0).value;
      };
      const std::vector<double> fd = fd_gradient(field, x);
      CHECK(testsup::max_rel_dev(fd, t.grad) < 1e-6);
    }
  }
}

TEST_CASE("each order agrees with directional differences of the last") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SymmetricMatrix a;
  std::vector<double> x(4);
  double gx = 0.0;
  do {
    a = random_symmetric(rng, 4);
    for (double& v : x) v = unit(rng);
    gx = quad_form_apply(a, x).gx;
  } while (gx < 1.2);

  const FSpec spec{BaseFunction::Log, 1.5};
  const DerivTensors t = faa_di_bruno_general(x, a, spec);
  for (int r = 2; r <= 4; ++r) {
    const TensorField lower = [&, r](std::span<const double> y) {
      return faa_di_bruno_general(y, a, spec, r - 1).order(r - 1);
    };
    const double dev =
        directional_fd_deviation(lower, t.order(r), r, 4, x, 99, 16);
    CHECK(dev < (r == 2 ? 1e-6 : 1e-5));
  }
}

TEST_CASE("order-3 and order-4 tensors are super-symmetric") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SymmetricMatrix a = random_symmetric(rng, 3);
  std::vector<double> x = {0.9, -0.4, 1.2};
  const DerivTensors t =
      faa_di_bruno_general(x, a, {BaseFunction::Exp, 2.0});
  const SymmetryReport rep = symmetry_report(t);
  CHECK(rep.hessian_exact);
  CHECK(rep.worst_ratio() < 1e-12);
}

TEST_CASE("identity with power one has zero high orders exactly") {
  std::mt19937_64 rng(37);
  const SymmetricMatrix a = random_symmetric(rng, 4);
  std::vector<double> x = {1.0, 0.25, -0.75, 0.4};
  const DerivTensors t =
      faa_di_bruno_general(x, a, {BaseFunction::Identity, 1.0});
  for (double v : t.third) CHECK(v == 0.0);
  for (double v : t.fourth) CHECK(v == 0.0);
}

TEST_CASE("coordinate count must match the matrix") {
  const SymmetricMatrix a = SymmetricMatrix::identity(3);
  std::vector<double> x = {1.0, 2.0};
  CHECK_THROWS_AS(
      faa_di_bruno_general(x, a, {BaseFunction::Identity, 1.0}),
      DimensionMismatch);
}
